#include <set>

#include <gtest/gtest.h>

#include "langprof/builtin.h"
#include "langprof/errors.h"
#include "langprof/grammar.h"
#include "langprof/negatives.h"
#include "langprof/recognizer.h"
#include "langprof/rng.h"
#include "langprof/sampler.h"

namespace langprof {
namespace {

TEST(ApplyEditTest, ForcedOutcomes) {
  EXPECT_EQ(ApplyEdit({"3", "1"}, {EditKind::kDelete, 1, ""}), TokenSeq{"3"});
  EXPECT_EQ(ApplyEdit({"3", "1"}, {EditKind::kAdd, 2, "7"}), (TokenSeq{"3", "1", "7"}));
  EXPECT_EQ(ApplyEdit({"3", "1"}, {EditKind::kReplace, 0, "2"}), (TokenSeq{"2", "1"}));
  EXPECT_THROW(ApplyEdit({"3"}, {EditKind::kDelete, 3, ""}), ValidationError);
}

TEST(MutateTest, SingleTokenNeverDeletes) {
  std::vector<std::string> alphabet = {"1", "2", "3"};
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    std::vector<Edit> edits;
    TokenSeq out = Mutate({"1"}, 1, alphabet, rng, &edits);
    ASSERT_EQ(edits.size(), 1u);
    EXPECT_NE(edits[0].kind, EditKind::kDelete);
    if (edits[0].kind == EditKind::kReplace) {
      EXPECT_NE(out[0], "1");
    }
  }
}

TEST(MutateTest, DistanceIsBoundedByK) {
  Grammar g = Builtin(LanguageId::kL1);
  auto samples = SampleDataset(g, 50, Rng(1));
  Rng rng(2);
  for (int k : {1, 2, 4, 8}) {
    for (const StringSample& s : samples) {
      TokenSeq out = Mutate(s.tokens, k, g.alphabet(), rng);
      EXPECT_LE(Levenshtein(s.tokens, out), static_cast<std::size_t>(k));
    }
  }
}

TEST(MutateTest, UniformOverAdmissibleTypes) {
  std::vector<std::string> alphabet = {"1", "2"};
  int counts[3] = {0, 0, 0};
  Rng rng(5);
  for (int i = 0; i < 30000; ++i) {
    std::vector<Edit> edits;
    Mutate({"1", "2", "1"}, 1, alphabet, rng, &edits);
    ++counts[static_cast<int>(edits[0].kind)];
  }
  for (int c : counts) EXPECT_NEAR(c / 30000.0, 1.0 / 3, 0.02);
}

TEST(EditNegativesTest, ContractOnL1) {
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  auto positives = SampleDataset(g, 256, Rng(3));
  for (int k : {1, 2, 4, 8}) {
    GenerationStats stats;
    auto negs = GenerateEditNegatives(rec, positives, k, 256, Rng(4), {}, &stats);
    ASSERT_EQ(negs.size(), 256u);
    std::set<EditKind> kinds;
    for (const NegativeSample& n : negs) {
      EXPECT_FALSE(rec.Accepts(n.tokens));
      EXPECT_TRUE(n.verified);
      EXPECT_EQ(n.kind, NegativeKind::kEdit);
      EXPECT_EQ(n.nominal_edit_distance, k);
      EXPECT_EQ(n.edits.size(), static_cast<std::size_t>(k));
      const StringSample* src = nullptr;
      for (const StringSample& p : positives) {
        if (p.id == n.source_id) src = &p;
      }
      ASSERT_NE(src, nullptr);
      EXPECT_EQ(Levenshtein(src->tokens, n.tokens), static_cast<std::size_t>(k));
      kinds.insert(n.edits.begin(), n.edits.end());
    }
    EXPECT_EQ(kinds.size(), 3u);
    if (k == 1) {
      EXPECT_GT(stats.acceptance_rate(), 0.5);
    }
  }
}

TEST(EditNegativesTest, Deterministic) {
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  auto positives = SampleDataset(g, 64, Rng(3));
  auto a = GenerateEditNegatives(rec, positives, 2, 64, Rng(4));
  auto b = GenerateEditNegatives(rec, positives, 2, 64, Rng(4));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].tokens, b[i].tokens);
    EXPECT_EQ(a[i].id, "e2_" + std::to_string(i));
  }
}

TEST(EditNegativesTest, StrictModeOnASmallLanguage) {
  Grammar g = ParseGrammar("S -> 1 2 [0.5]\nS -> 1 3 [0.5]");
  Recognizer rec(g);
  std::vector<StringSample> positives = {{"p0", {"1", "2"}, 0.0, ""}};
  NegativeOptions opts;
  opts.strict = true;
  auto negs = GenerateEditNegatives(rec, positives, 1, 50, Rng(1), opts);
  for (const NegativeSample& n : negs) {
    for (const SupportEntry& e : EnumerateSupport(g)) EXPECT_GE(Levenshtein(e.tokens, n.tokens), 1u);
    EXPECT_FALSE(rec.Accepts(n.tokens));
  }
}

TEST(EditNegativesTest, AttemptCapReportsRate) {
  // Over a one-token alphabet the only string at distance 2 from "1" is
  // "1 1 1", which is a member.
  Grammar g = ParseGrammar("S -> 1 1 1 [0.5]\nS -> 1 [0.5]");
  Recognizer rec(g);
  std::vector<StringSample> positives = {{"p0", {"1"}, 0.0, ""}};
  NegativeOptions opts;
  opts.attempt_cap = 50;
  try {
    GenerateEditNegatives(rec, positives, 2, 1, Rng(1), opts);
    FAIL() << "expected AttemptCapExceeded";
  } catch (const AttemptCapExceeded& e) {
    EXPECT_EQ(e.attempts(), 50u);
    EXPECT_EQ(e.accepted(), 0u);
  }
}

TEST(RandomNegativesTest, ContractOnL1) {
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  LengthHistogram h = LengthHistogram::FromSamples(SampleDataset(g, 5000, Rng(1)));
  auto negs = GenerateRandomNegatives(rec, h, 1024, Rng(2));
  ASSERT_EQ(negs.size(), 1024u);
  for (const NegativeSample& n : negs) {
    EXPECT_FALSE(rec.Accepts(n.tokens));
    EXPECT_EQ(n.kind, NegativeKind::kRandom);
    EXPECT_GE(n.tokens.size(), 30u);
    EXPECT_LE(n.tokens.size(), 72u);
  }
}

TEST(RandomNegativesTest, DegenerateLanguageHitsCap) {
  Grammar g = ParseGrammar("S -> 1 1 [1]");
  Recognizer rec(g);
  EXPECT_THROW(GenerateRandomNegatives(rec, LengthHistogram({{2, 1.0}}), 1, Rng(0)),
               AttemptCapExceeded);
}

}  // namespace
}  // namespace langprof
