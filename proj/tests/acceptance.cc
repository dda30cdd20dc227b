// Acceptance checks for the primary pipeline. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "langprof/builtin.h"
#include "langprof/errors.h"
#include "langprof/evaluation/distance.h"
#include "langprof/evaluation/loss_record.h"
#include "langprof/evaluation/metrics.h"
#include "langprof/evaluation/scorers.h"
#include "langprof/finite_language.h"
#include "langprof/grammar.h"
#include "langprof/harness/config.h"
#include "langprof/harness/dataset_io.h"
#include "langprof/harness/experiment.h"
#include "langprof/harness/manifest.h"
#include "langprof/negatives.h"
#include "langprof/perturbation.h"
#include "langprof/recognizer.h"
#include "langprof/rng.h"
#include "langprof/sampler.h"

namespace langprof {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances and thresholds.
constexpr double kLogprobTolerance = 1e-9;
constexpr double kUniformityTolerance = 1e-9;
constexpr double kMassTolerance = 1e-9;
constexpr double kChiSquareAlpha = 0.01;
constexpr double kRandomAucLow = 0.45;
constexpr double kRandomAucHigh = 0.55;
constexpr double kMaxInversion = 0.02;
constexpr double kPearsonTolerance = 1e-9;
constexpr double kAntiSymmetryTolerance = 1e-12;
constexpr int kPropertyCases = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; passes until the first failed check.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && outcome_.pass) {
      outcome_.pass = false;
      outcome_.detail = what;
    }
  }
  void Note(const std::string& s) {
    if (outcome_.pass) outcome_.detail += (outcome_.detail.empty() ? "" : "; ") + s;
  }
  bool ok() const { return outcome_.pass; }
  Outcome outcome() const { return outcome_; }

 private:
  Outcome outcome_;
};

std::string Num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

fs::path TempRoot(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("langprof_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = ReadFile(e.path());
  }
  return out;
}

double PerToken(double total, std::size_t len) { return total / static_cast<double>(len); }

// Each nonterminal expanded by its first rule (35 tokens, 23 binary choices).
TokenSeq FirstRuleString() {
  return ParseTokens(
      "6 5 9 8 7 3 1 6 5 3 1 9 8 7 3 1 9 8 7 6 5 6 5 3 1 9 8 7 6 5 9 8 7 3 1");
}

// The start symbol's single unary rule leads to A19; each A19 rule is one
// branch. A branch with D equally likely derivations of distinct strings
// gives every one of its strings probability p_branch / D. Equality in
// Cauchy-Schwarz, D * sum P(s)^2 = (sum P(s))^2, holds iff all D strings
// have the same probability, so this covers the whole support without
// listing it.
Outcome BranchProbabilities() {
  Checker c;
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  ParseResult fig = rec.Parse(FirstRuleString());
  const double want23 = 23 * std::log(0.5), want36 = 36 * std::log(0.5);
  c.Expect(fig.member && std::abs(*fig.inside_logprob - want23) <= kLogprobTolerance,
           "first-rule string inside logprob " +
               (fig.member ? Num(*fig.inside_logprob) : std::string("non-member")));
  if (fig.member) c.Note("first-rule string logprob " + Num(*fig.inside_logprob));

  FiniteLanguage all = FiniteLanguage::Compile(g);
  c.Expect(all.IsUnambiguous(), "L1 is ambiguous");
  c.Expect(std::abs(all.TotalProbability() - 1.0) <= kMassTolerance, "L1 mass != 1");

  std::vector<Rule> branch_rules;
  for (const Rule& r : g.rules()) {
    if (r.lhs == "A19") branch_rules.push_back(r);
  }
  c.Expect(branch_rules.size() == 2, "A19 does not have two rules");
  std::vector<FiniteLanguage> branches;
  std::vector<double> branch_prob;
  for (const Rule& b : branch_rules) {
    std::vector<Rule> rules = g.rules();
    rules.push_back({"Branch", b.rhs, 1.0});
    FiniteLanguage sub = FiniteLanguage::Compile(Grammar::FromRules(rules, "Branch"));
    const double d = sub.DerivationCount();
    const double self = FiniteLanguage::InnerProduct(sub, sub);
    c.Expect(sub.IsUnambiguous(), "branch is ambiguous");
    c.Expect(std::abs(sub.TotalProbability() - 1.0) <= kMassTolerance, "branch mass != 1");
    c.Expect(std::abs(d * self - 1.0) <= kUniformityTolerance,
             "branch strings are not equiprobable: D*<b,b> = " + Num(d * self));
    branch_prob.push_back(b.probability / d);
    branches.push_back(std::move(sub));
  }
  if (!c.ok()) return c.outcome();
  c.Expect(FiniteLanguage::InnerProduct(branches[0], branches[1]) == 0.0,
           "the two branches share strings");
  c.Expect(std::abs(std::log(branch_prob[0]) - want23) <= kLogprobTolerance,
           "branch 1 probability " + Num(branch_prob[0]));
  c.Expect(std::abs(std::log(branch_prob[1]) - want36) <= kLogprobTolerance,
           "branch 2 probability " + Num(branch_prob[1]));
  c.Note("branch probabilities 2^" + Num(std::log2(branch_prob[0])) + " and 2^" +
         Num(std::log2(branch_prob[1])) + " over " + Num(all.DerivationCount()) + " strings");

  // Spot check against the recognizer on sampled strings.
  for (const StringSample& s : SampleDataset(g, 2000, Rng(31))) {
    const double lp = rec.InsideLogprob(s.tokens);
    const bool one = std::abs(lp - want23) <= kLogprobTolerance ||
                     std::abs(lp - want36) <= kLogprobTolerance;
    c.Expect(one, "sampled string with inside logprob " + Num(lp));
  }
  return c.outcome();
}

Outcome OracleCalibration() {
  Checker c;
  for (LanguageId id : {LanguageId::kL1, LanguageId::kL4}) {
    Grammar g = Builtin(id);
    const std::string name = ToString(id);
    Recognizer rec(g);
    OracleScorer oracle(g);
    auto pos = SampleDataset(g, 1024, Rng(1).Fork(name));
    std::vector<double> pos_scores;
    for (const StringSample& s : pos) {
      pos_scores.push_back(PerToken(oracle.Score(s.tokens).total_neglogprob, s.tokens.size()));
    }
    std::map<std::string, std::vector<NegativeSample>> buckets;
    buckets["edit1"] = GenerateEditNegatives(rec, pos, 1, 1024, Rng(2).Fork(name).Fork(1));
    buckets["edit4"] = GenerateEditNegatives(rec, pos, 4, 1024, Rng(2).Fork(name).Fork(4));
    buckets["random"] = GenerateRandomNegatives(rec, LengthHistogram::FromSamples(pos), 1024,
                                                Rng(2).Fork(name).Fork("random"));
    for (const auto& [bucket, negs] : buckets) {
      std::vector<double> neg_scores;
      for (const NegativeSample& n : negs) {
        neg_scores.push_back(PerToken(oracle.Score(n.tokens).total_neglogprob, n.tokens.size()));
      }
      const double auc = AucFromScores(pos_scores, neg_scores);
      c.Expect(negs.size() == 1024 && auc == 1.0,
               name + " " + bucket + " AUC " + Num(auc) + " over " +
                   std::to_string(negs.size()) + " negatives");
    }
  }
  c.Note("AUC 1 on L1, L4 x {edit1, edit4, random}");
  return c.outcome();
}

Outcome NullCalibration() {
  Checker c;
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  auto pos = SampleDataset(g, 1024, Rng(5));
  auto negs = GenerateEditNegatives(rec, pos, 1, 1024, Rng(6));
  for (std::uint64_t seed : {0, 1, 2}) {
    RandomScorer scorer(seed);
    std::vector<double> p, n;
    for (const StringSample& s : pos) {
      p.push_back(PerToken(scorer.Score(s.id, s.tokens).total_neglogprob, s.tokens.size()));
    }
    for (const NegativeSample& s : negs) {
      n.push_back(PerToken(scorer.Score(s.id, s.tokens).total_neglogprob, s.tokens.size()));
    }
    const double auc = AucFromScores(p, n);
    c.Expect(auc >= kRandomAucLow && auc <= kRandomAucHigh,
             "seed " + std::to_string(seed) + " AUC " + Num(auc));
    c.Note("seed " + std::to_string(seed) + " AUC " + Num(auc));
  }
  return c.outcome();
}

// Chi-square against exact probabilities in three views of the same
// distribution: string length and 8-token prefix over all of L1, and whole
// strings of the A16 subtree whose support can be listed.
Outcome SamplingFidelity() {
  Checker c;
  Grammar g = Builtin(LanguageId::kL1);
  FiniteLanguage lang = FiniteLanguage::Compile(g);
  auto samples = SampleDataset(g, 100000, Rng(2024));
  c.Expect(std::abs(lang.TotalProbability() - 1.0) <= kMassTolerance, "L1 mass != 1");

  std::vector<double> len_p = lang.LengthDistribution();
  std::vector<double> len_obs(len_p.size(), 0.0);
  double len_sum = 0;
  for (double p : len_p) len_sum += p;
  c.Expect(std::abs(len_sum - 1.0) <= kMassTolerance, "length distribution mass != 1");
  for (const StringSample& s : samples) {
    if (s.tokens.size() >= len_obs.size()) {
      c.Expect(false, "sampled length outside support");
      return c.outcome();
    }
    len_obs[s.tokens.size()] += 1;
  }
  GoodnessOfFit len_fit = ChiSquareGoodnessOfFit(len_obs, len_p);
  c.Expect(len_fit.p_value >= kChiSquareAlpha, "length chi-square p " + Num(len_fit.p_value));
  c.Note("length p=" + Num(len_fit.p_value) + " (" + std::to_string(len_fit.bins) + " bins)");

  constexpr std::size_t kPrefix = 8;
  std::vector<SupportEntry> prefixes = lang.PrefixDistribution(kPrefix);
  std::map<TokenSeq, std::size_t> prefix_index;
  std::vector<double> pre_p, pre_obs(prefixes.size(), 0.0);
  double pre_sum = 0;
  for (const SupportEntry& e : prefixes) {
    prefix_index[e.tokens] = pre_p.size();
    pre_p.push_back(e.probability);
    pre_sum += e.probability;
  }
  c.Expect(std::abs(pre_sum - 1.0) <= kMassTolerance, "prefix distribution mass != 1");
  for (const StringSample& s : samples) {
    TokenSeq head(s.tokens.begin(), s.tokens.begin() + std::min(kPrefix, s.tokens.size()));
    auto it = prefix_index.find(head);
    if (it == prefix_index.end()) {
      c.Expect(false, "sampled prefix outside support");
      return c.outcome();
    }
    pre_obs[it->second] += 1;
  }
  GoodnessOfFit pre_fit = ChiSquareGoodnessOfFit(pre_obs, pre_p);
  c.Expect(pre_fit.p_value >= kChiSquareAlpha, "prefix chi-square p " + Num(pre_fit.p_value));
  c.Note("prefix p=" + Num(pre_fit.p_value) + " (" + std::to_string(pre_fit.bins) + " bins)");

  Grammar sub = Grammar::FromRules(g.rules(), "A16");
  std::vector<SupportEntry> support = EnumerateSupport(sub);
  std::map<TokenSeq, std::size_t> sub_index;
  std::vector<double> sub_p, sub_obs(support.size(), 0.0);
  double sub_sum = 0;
  for (const SupportEntry& e : support) {
    sub_index[e.tokens] = sub_p.size();
    sub_p.push_back(e.probability);
    sub_sum += e.probability;
  }
  c.Expect(std::abs(sub_sum - 1.0) <= kMassTolerance, "A16 support mass != 1");
  for (const StringSample& s : SampleDataset(sub, 100000, Rng(2025))) {
    auto it = sub_index.find(s.tokens);
    if (it == sub_index.end()) {
      c.Expect(false, "A16 sample outside enumerated support");
      return c.outcome();
    }
    sub_obs[it->second] += 1;
  }
  GoodnessOfFit sub_fit = ChiSquareGoodnessOfFit(sub_obs, sub_p);
  c.Expect(sub_fit.p_value >= kChiSquareAlpha, "A16 chi-square p " + Num(sub_fit.p_value));
  c.Note("A16 strings p=" + Num(sub_fit.p_value) + " (" + std::to_string(sub_fit.bins) +
         " bins)");
  return c.outcome();
}

// Both emissions of the default grid are shared by the split and negative
// checks.
struct DefaultEmission {
  fs::path a, b;
  ExperimentIndex index;
};

const DefaultEmission& EmitDefaultGrid() {
  static const DefaultEmission e = [] {
    DefaultEmission d{TempRoot("default_a"), TempRoot("default_b"), {}};
    ExperimentConfig c;
    c.scorer.kind = "external";
    d.index = EmitManifests(c, d.a);
    EmitManifests(c, d.b);
    return d;
  }();
  return e;
}

Outcome SplitContract() {
  Checker c;
  const DefaultEmission& e = EmitDefaultGrid();
  std::set<std::pair<std::size_t, int>> seen;
  for (const RunEntry& run : e.index.runs) {
    DatasetManifest m = LoadManifest(e.a / run.dir);
    const ManifestSet& train = m.Set(m.language, "train");
    const ManifestSet& test = m.Set(m.language, "test");
    std::set<TokenSeq> train_strings;
    for (const ManifestString& s : train.strings) train_strings.insert(s.tokens);
    std::size_t shared = 0;
    for (const ManifestString& s : test.strings) shared += train_strings.count(s.tokens);
    c.Expect(shared == 0, run.dir + ": " + std::to_string(shared) + " test strings in train");
    c.Expect(train.strings.size() == run.n_train && test.strings.size() == 1024,
             run.dir + ": wrong split sizes");
    seen.insert({run.n_train, run.replicate});
  }
  ExperimentConfig defaults;
  c.Expect(seen.size() == defaults.n_train.size() * defaults.replicates,
           "grid not fully covered");
  auto ta = ReadTree(e.a), tb = ReadTree(e.b);
  c.Expect(ta == tb, "two emissions of the same config differ");
  std::size_t bytes = 0;
  for (const auto& [name, body] : ta) bytes += body.size();
  c.Note(std::to_string(seen.size()) + " (n_train, replicate) runs disjoint; " +
         std::to_string(ta.size()) + " files, " + std::to_string(bytes) +
         " bytes identical across reruns");
  return c.outcome();
}

Outcome NegativeContract() {
  Checker c;
  const DefaultEmission& e = EmitDefaultGrid();
  Grammar g = Builtin(LanguageId::kL1);
  Recognizer rec(g);
  std::map<int, std::size_t> edit_counts;
  std::size_t random_count = 0;
  for (const RunEntry& run : e.index.runs) {
    DatasetManifest m = LoadManifest(e.a / run.dir);
    std::map<std::string, const TokenSeq*> sources;
    for (const ManifestSet& set : m.sets) {
      if (!set.is_positive) continue;
      for (const ManifestString& s : set.strings) sources[s.id] = &s.tokens;
    }
    for (const ManifestSet& set : m.sets) {
      if (set.is_positive) continue;
      for (const ManifestString& s : set.strings) {
        c.Expect(!rec.Accepts(s.tokens), run.dir + ": negative " + s.id + " is a member");
        if (set.kind == "edit") {
          auto it = sources.find(s.source_id);
          c.Expect(it != sources.end(), run.dir + ": unknown source " + s.source_id);
          if (it == sources.end()) continue;
          const std::size_t d = Levenshtein(*it->second, s.tokens);
          c.Expect(d == static_cast<std::size_t>(set.edit_distance),
                   run.dir + ": " + s.id + " at distance " + std::to_string(d));
          ++edit_counts[set.edit_distance];
        } else {
          ++random_count;
        }
      }
    }
  }
  c.Expect(edit_counts.size() == 4 && edit_counts.count(1) && edit_counts.count(2) &&
               edit_counts.count(4) && edit_counts.count(8),
           "edit distances {1,2,4,8} not all emitted");
  // The same contract on a second language, generated directly.
  Grammar l4 = Builtin(LanguageId::kL4);
  Recognizer rec4(l4);
  auto pos4 = SampleDataset(l4, 1024, Rng(8));
  std::map<std::string, const TokenSeq*> src4;
  for (const StringSample& s : pos4) src4[s.id] = &s.tokens;
  std::size_t l4_count = 0;
  for (int k : {1, 2, 4, 8}) {
    for (const NegativeSample& n : GenerateEditNegatives(rec4, pos4, k, 1024, Rng(9).Fork(k))) {
      c.Expect(!rec4.Accepts(n.tokens), "L4 negative is a member");
      c.Expect(Levenshtein(*src4.at(n.source_id), n.tokens) == static_cast<std::size_t>(k),
               "L4 edit distance mismatch");
      ++l4_count;
    }
  }
  std::size_t total = random_count;
  for (const auto& [k, n] : edit_counts) total += n;
  c.Note(std::to_string(total) + " emitted L1 negatives and " + std::to_string(l4_count) +
         " L4 edit negatives rejected, distances exact");
  return c.outcome();
}

Outcome DistanceChain() {
  Checker c;
  Grammar g = Builtin(LanguageId::kL1);
  std::vector<Perturbation> chain = DefaultPerturbationChain(g.alphabet());
  std::vector<double> d;
  for (int level = 0; level <= 5; ++level) {
    d.push_back(LanguageDistanceL2(g, Perturb(g, chain, level)));
  }
  c.Expect(d[0] == 0.0, "dist(L1, L1) = " + Num(d[0]));
  std::string list;
  for (std::size_t l = 0; l < d.size(); ++l) {
    if (l > 0) c.Expect(d[l] >= d[l - 1], "distance decreases at level " + std::to_string(l));
    list += (l ? ", " : "") + Num(d[l]);
  }
  c.Note("levels 0..5: " + list);
  return c.outcome();
}

Outcome TrigramTrend() {
  Checker c;
  ExperimentConfig cfg = ConfigFromJson(nlohmann::json::parse(R"({
    "language": "L1", "n_train": [16, 64, 256, 1024], "n_test": 1024, "replicates": 3,
    "modes": ["FT"], "edit_distances": [1, 4], "random_negatives": false,
    "scorer": {"kind": "ngram", "order": 3, "smoothing": 0.1}
  })"));
  ReportSet r = RunExperiment(cfg, TempRoot("trend"));
  std::map<std::pair<std::string, std::size_t>, double> auc;
  for (const SummaryRow& row : r.summary) {
    if (row.condition.test_language != "L1" || row.condition.mode != "FT") continue;
    c.Expect(row.replicates == 3, "summary row without 3 replicates");
    auc[{row.condition.bucket, row.condition.n_train}] = row.mean_auc;
  }
  std::vector<std::size_t> grid = {16, 64, 256, 1024};
  int inversions = 0;
  std::string list;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!auc.count({"edit1", grid[i]})) {
      c.Expect(false, "missing edit1 at n_train " + std::to_string(grid[i]));
      return c.outcome();
    }
    const double a = auc[{"edit1", grid[i]}];
    list += (i ? ", " : "") + Num(a);
    if (i == 0) continue;
    const double prev = auc[{"edit1", grid[i - 1]}];
    if (a <= prev) {
      ++inversions;
      c.Expect(prev - a <= kMaxInversion, "inversion of " + Num(prev - a) + " at n_train " +
                                               std::to_string(grid[i]));
    }
  }
  c.Expect(inversions <= 1, std::to_string(inversions) + " inversions");
  const double e1 = auc[{"edit1", 1024}], e4 = auc[{"edit4", 1024}];
  c.Expect(e4 >= e1, "edit4 AUC " + Num(e4) + " < edit1 AUC " + Num(e1) + " at n_train 1024");
  c.Note("edit1 AUC at n_train 16..1024: " + list + "; edit4 at 1024: " + Num(e4));
  return c.outcome();
}

Outcome MetricProperties() {
  Checker c;
  Rng rng(77);
  auto values = [&](std::size_t n, bool ties) {
    std::vector<double> v(n);
    for (double& x : v) {
      x = ties ? static_cast<double>(rng.UniformInt(6)) : rng.UniformReal() * 10 - 5;
      if (ties && rng.UniformInt(20) == 0) x = std::numeric_limits<double>::infinity();
    }
    return v;
  };
  auto transform = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(x / 4) + x * x * x;
    return v;
  };
  for (int i = 0; i < kPropertyCases; ++i) {
    const bool ties = i % 2 == 0;
    auto pos = values(1 + rng.UniformInt(30), ties);
    auto neg = values(1 + rng.UniformInt(30), ties);
    const double auc = AucFromScores(pos, neg);
    c.Expect(AucFromScores(transform(pos), transform(neg)) == auc,
             "AUC changed under an increasing transform (case " + std::to_string(i) + ")");
    c.Expect(std::abs(auc + AucFromScores(neg, pos) - 1.0) <= kAntiSymmetryTolerance,
             "AUC anti-symmetry fails (case " + std::to_string(i) + ")");
  }
  int pearson_cases = 0;
  while (pearson_cases < kPropertyCases) {
    const std::size_t n = 2 + rng.UniformInt(40);
    auto x = values(n, false), y = values(n, false);
    double a = rng.UniformReal() * 8 - 4;
    if (std::abs(a) < 1e-3) continue;
    const double b = rng.UniformReal() * 100 - 50;
    std::vector<double> ax(n);
    for (std::size_t k = 0; k < n; ++k) ax[k] = a * x[k] + b;
    const double r = Pearson(x, y), ra = Pearson(ax, y);
    c.Expect(std::abs(ra - (a > 0 ? r : -r)) <= kPearsonTolerance,
             "Pearson not affine invariant: " + Num(r) + " vs " + Num(ra));
    ++pearson_cases;
  }
  c.Note(std::to_string(kPropertyCases) + " AUC cases (half with ties and infinities), " +
         std::to_string(pearson_cases) + " Pearson cases");
  return c.outcome();
}

// The builtin path against emission plus externally written JSONL plus
// ingestion, compared as whole directory trees.
Outcome RoundTrip() {
  Checker c;
  ExperimentConfig cfg = ConfigFromJson(nlohmann::json::parse(R"({
    "n_train": [1, 16, 64], "n_test": 256, "replicates": 2, "modes": ["FT", "ICL"],
    "m": {"FT": [1, 2, 5], "ICL": [1, 2, 4]}, "test_perturbations": [1, 2]
  })"));
  fs::path built = TempRoot("rt_builtin"), ext = TempRoot("rt_external"),
           losses = TempRoot("rt_losses");
  RunExperiment(cfg, built);
  ExperimentConfig external = cfg;
  external.scorer.kind = "external";
  EmitManifests(external, ext);
  std::unique_ptr<Scorer> oracle = MakeBuiltinScorer(cfg, ResolveGrammar(cfg));
  fs::create_directories(losses);
  std::vector<fs::path> files;
  for (const RunEntry& run : LoadIndex(ext).runs) {
    std::vector<LossRecord> records = ScoreManifest(LoadManifest(ext / run.dir), *oracle);
    files.push_back(losses / (std::to_string(files.size()) + ".jsonl"));
    WriteLossRecords(files.back(), records);
  }
  IngestLosses(ext, files);
  auto a = ReadTree(built), b = ReadTree(ext);
  std::size_t compared = 0, normalized = 0;
  for (const auto& [name, body] : a) {
    if (fs::path(name).filename() == kLossFile) continue;  // external losses live elsewhere
    auto it = b.find(name);
    c.Expect(it != b.end(), "missing " + name + " after ingest");
    if (it == b.end()) continue;
    const std::string file = fs::path(name).filename().string();
    if (file == kManifestFile || file == kIndexFile) {
      // These record the configured scorer kind, which differs by design.
      auto x = nlohmann::json::parse(body), y = nlohmann::json::parse(it->second);
      x["config"]["scorer"].erase("kind");
      y["config"]["scorer"].erase("kind");
      c.Expect(x == y, name + " differs beyond the scorer kind");
      ++normalized;
    } else {
      c.Expect(it->second == body, name + " differs after ingest");
      ++compared;
    }
  }
  for (const auto& [name, body] : b) {
    c.Expect(a.count(name) == 1, "unexpected " + name + " after ingest");
  }
  c.Note(std::to_string(compared) + " report and data files byte-identical; " +
         std::to_string(normalized) + " manifests equal up to the scorer kind");
  return c.outcome();
}

struct Criterion {
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

int Main() {
  const std::vector<Criterion> criteria = {
      {"branch probabilities", 10, BranchProbabilities},
      {"oracle calibration", 60, OracleCalibration},
      {"null calibration", 0, NullCalibration},
      {"sampling fidelity", 0, SamplingFidelity},
      {"split contract", 0, SplitContract},
      {"negative contract", 0, NegativeContract},
      {"distance chain", 60, DistanceChain},
      {"trigram trend", 300, TrigramTrend},
      {"metric properties", 0, MetricProperties},
      {"round trip", 0, RoundTrip},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& k = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = k.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && k.time_limit_s > 0 && secs > k.time_limit_s) {
      o = {false, "took " + Num(secs) + " s, limit " + Num(k.time_limit_s) + " s"};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s [%zu] %s: %s (%.1f s%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                k.name.c_str(), o.detail.c_str(), secs,
                k.time_limit_s > 0 ? (", limit " + Num(k.time_limit_s) + " s").c_str() : "");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace langprof

int main() { return langprof::Main(); }
