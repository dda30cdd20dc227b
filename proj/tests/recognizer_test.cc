#include <cmath>

#include <gtest/gtest.h>

#include "langprof/builtin.h"
#include "langprof/errors.h"
#include "langprof/grammar.h"
#include "langprof/recognizer.h"
#include "langprof/rng.h"
#include "langprof/sampler.h"

namespace langprof {
namespace {

TokenSeq Toks(const std::string& s) {
  TokenSeq out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Every nonterminal expanded by its first rule. A19 -> A18 A16, so the
// derivation applies 23 binary choices.
TokenSeq FirstRuleString() {
  return Toks(
      // A18 -> A15 A14 A13
      "6 5 9 8 7 3 1 "  // A15 -> A11 A12 A10
      "6 5 3 1 9 8 7 "  // A14 -> A11 A10 A12
      "3 1 9 8 7 6 5 "  // A13 -> A10 A12 A11
      // A16 -> A14 A15
      "6 5 3 1 9 8 7 "
      "6 5 9 8 7 3 1");
}

TEST(RecognizerTest, SingleRule) {
  Grammar g = ParseGrammar("S -> 1 [1]");
  EXPECT_EQ(InsideLogprob(g, Toks("1")), 0.0);
  EXPECT_FALSE(Accepts(g, Toks("1 1")));
}

TEST(RecognizerTest, L1Examples) {
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  EXPECT_FALSE(rec.Accepts(Toks("1")));
  EXPECT_FALSE(rec.Accepts({}));
  EXPECT_FALSE(rec.Accepts(Toks("x y z")));
  TokenSeq s = FirstRuleString();
  ASSERT_EQ(s.size(), 35u);
  ParseResult r = rec.Parse(s);
  ASSERT_TRUE(r.member);
  EXPECT_NEAR(*r.inside_logprob, 23 * std::log(0.5), 1e-9);
  EXPECT_EQ(r.derivation_count, 1u);
  EXPECT_THROW(rec.InsideLogprob(Toks("1 2")), NotAMemberError);
}

TEST(RecognizerTest, SampledStringsAreMembersWithAtLeastTheirDerivationMass) {
  for (LanguageId id : {LanguageId::kL1, LanguageId::kL4}) {
    Grammar g = Builtin(id);
    Recognizer rec(g);
    for (const StringSample& s : SampleDataset(g, 200, Rng(8))) {
      ParseResult r = rec.Parse(s.tokens);
      ASSERT_TRUE(r.member);
      EXPECT_GE(*r.inside_logprob, s.logprob - 1e-9);
    }
  }
}

TEST(RecognizerTest, L1BranchTwoProbability) {
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  for (const StringSample& s : SampleDataset(g, 300, Rng(21))) {
    double lp = rec.InsideLogprob(s.tokens);
    // 2^22 + 2^35 derivations with no collisions: the inside value is the
    // sampled derivation's value.
    EXPECT_NEAR(lp, s.logprob, 1e-9);
  }
}

TEST(RecognizerTest, AgreesWithEnumerationOnSmallGrammars) {
  const char* grammars[] = {
      "S -> A B [0.3]\nS -> B A [0.7]\nA -> 1 [0.4]\nA -> 1 1 [0.6]\nB -> 1 [0.5]\nB -> 2 [0.5]",
      // Ambiguous through unary chains, including a duplicated unary rule.
      "S -> A [0.5]\nS -> B [0.5]\nA -> C [0.5]\nA -> C [0.5]\nB -> C [1]\nC -> 1 2 [0.25]\n"
      "C -> 1 [0.75]",
      "S -> X Y Z [1]\nX -> 1 [0.5]\nX -> 1 2 [0.5]\nY -> 2 [0.5]\nY -> 2 3 [0.5]\n"
      "Z -> 3 [0.5]\nZ -> 2 3 [0.5]",
  };
  for (const char* text : grammars) {
    Grammar g = ParseGrammar(text);
    Recognizer rec(g);
    double sum = 0;
    for (const SupportEntry& e : EnumerateSupport(g)) {
      double lp = rec.InsideLogprob(e.tokens);
      EXPECT_NEAR(lp, std::log(e.probability), 1e-9) << text;
      sum += std::exp(lp);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(RecognizerTest, CountsDerivations) {
  Grammar g = ParseGrammar("S -> A [0.5]\nS -> B [0.5]\nA -> 1 [1]\nB -> 1 [1]");
  ParseResult r = Recognizer(g).Parse(Toks("1"));
  EXPECT_EQ(r.derivation_count, 2u);
  EXPECT_FALSE(r.count_overflow);
}

TEST(RecognizerTest, UnaryCycleHasFiniteMass) {
  // S -> S [0.5] loops; total mass of "1" is 0.5 / (1 - 0.5) = 1.
  Grammar g = ParseGrammar("S -> S [0.5]\nS -> 1 [0.5]");
  ParseResult r = Recognizer(g).Parse(Toks("1"));
  ASSERT_TRUE(r.member);
  EXPECT_NEAR(*r.inside_logprob, 0.0, 1e-12);
  EXPECT_TRUE(r.count_overflow);
}

TEST(RecognizerTest, LongRules) {
  Grammar g = Builtin(LanguageId::kL5);
  Recognizer rec(g);
  for (const StringSample& s : SampleDataset(g, 100, Rng(2))) EXPECT_TRUE(rec.Accepts(s.tokens));
}

TEST(LevenshteinTest, Examples) {
  EXPECT_EQ(Levenshtein(Toks("1 2 3"), Toks("1 2 3")), 0u);
  EXPECT_EQ(Levenshtein(Toks("1 2 3"), Toks("1 3")), 1u);
  EXPECT_EQ(Levenshtein(Toks("1 2 3"), Toks("3 2 1")), 2u);
  EXPECT_EQ(Levenshtein(Toks(""), Toks("1 2")), 2u);
  EXPECT_EQ(Levenshtein(Toks("10 2"), Toks("1 02")), 2u);
}

TEST(LevenshteinTest, MetricProperties) {
  Rng rng(99);
  auto random_seq = [&] {
    TokenSeq s(rng.UniformInt(7));
    for (auto& t : s) t = std::to_string(rng.UniformInt(3));
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    TokenSeq a = random_seq(), b = random_seq(), c = random_seq();
    std::size_t ab = Levenshtein(a, b);
    EXPECT_EQ(ab, Levenshtein(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(Levenshtein(a, c), ab + Levenshtein(b, c));
  }
}

}  // namespace
}  // namespace langprof
