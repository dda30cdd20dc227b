#ifndef LANGPROF_SAMPLER_H_
#define LANGPROF_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "langprof/grammar.h"
#include "langprof/rng.h"

namespace langprof {

struct StringSample {
  std::string id;
  TokenSeq tokens;
  // Natural-log probability of the sampled derivation (not summed over
  // alternative derivations; see Recognizer::InsideLogprob).
  double logprob = 0.0;
  std::string seed_path;
};

struct SampleOptions {
  // Only reachable for recursive grammars.
  std::size_t max_depth = 1000;
};

// Top-down, leftmost expansion from the start symbol. id is left empty and
// seed_path is the stream's path. Throws DepthExceededError.
StringSample SampleString(const Grammar& g, Rng& rng,
                          const SampleOptions& options = {});

// Sample i is drawn from rng.Fork(i) and gets id `id_prefix` + i, so any
// prefix of a dataset is reproducible on its own.
std::vector<StringSample> SampleDataset(const Grammar& g, std::size_t count,
                                        const Rng& rng,
                                        const std::string& id_prefix = "s",
                                        const SampleOptions& options = {});

struct SplitSpec {
  std::size_t n_train = 1024;
  std::size_t n_test = 1024;
  std::uint64_t seed = 0;
  int replicate = 0;
};

struct Split {
  std::vector<StringSample> train;
  std::vector<StringSample> test;
};

// Walks `order` (distinct token sequences) and alternately assigns every
// pool occurrence of each one to train, then test, then train, ... Pool
// order is preserved within each side. Strings absent from `order` are
// dropped.
Split AlternateAssign(std::span<const StringSample> pool,
                      std::span<const TokenSeq> order);

// Unique strings in shuffled order, alternately assigned with all their
// occurrences; each side is then shuffled and truncated to its target size.
// The shuffles depend only on (seed, replicate), so for a fixed pool the
// train set for a smaller n_train is a prefix of the one for a larger
// n_train and the test set does not depend on n_train at all. Throws
// ShortfallError when a side has fewer strings than requested.
Split StratifiedSplit(std::span<const StringSample> pool, const SplitSpec& spec);

// max(8 * (n_train + n_test), 10000).
std::size_t DefaultPoolSize(std::size_t n_train, std::size_t n_test);

// Empirical distribution over string lengths.
class LengthHistogram {
 public:
  LengthHistogram() = default;
  explicit LengthHistogram(std::map<std::size_t, double> weights);

  static LengthHistogram FromSamples(std::span<const StringSample> samples);
  static LengthHistogram FromSequences(std::span<const TokenSeq> sequences);

  std::size_t Sample(Rng& rng) const;
  bool empty() const { return lengths_.empty(); }
  const std::vector<std::size_t>& lengths() const { return lengths_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<std::size_t> lengths_;
  std::vector<double> weights_;
};

// Length from `lengths`, tokens i.i.d. uniform over `alphabet`.
TokenSeq RandomString(const std::vector<std::string>& alphabet,
                      const LengthHistogram& lengths, Rng& rng);

struct GoodnessOfFit {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  std::size_t bins = 0;  // after pooling
};

// Pearson chi-square test of observed counts against expected
// probabilities (same indexing). Adjacent bins are pooled in order until
// each pooled bin expects at least `min_expected` observations; the
// remainder joins the last pooled bin. Expected counts are n * p with n the
// total observed count, so the probabilities should cover the whole
// outcome space.
GoodnessOfFit ChiSquareGoodnessOfFit(std::span<const double> observed,
                                     std::span<const double> expected_probability,
                                     double min_expected = 5.0);

}  // namespace langprof

#endif  // LANGPROF_SAMPLER_H_
