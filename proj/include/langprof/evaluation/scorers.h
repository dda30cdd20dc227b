#ifndef LANGPROF_EVALUATION_SCORERS_H_
#define LANGPROF_EVALUATION_SCORERS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "langprof/grammar.h"
#include "langprof/recognizer.h"

namespace langprof {

struct ScorerDescriptor {
  std::string name;
  std::string kind;  // oracle | ngram | random | external
  // The scorer vocabulary V and how grammar tokens map into it.
  std::string vocabulary_info;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

struct ScoreResult {
  double total_neglogprob = 0.0;
  std::optional<std::vector<double>> per_token;
};

// What a model has seen before scoring: FT passes over the training strings
// for `m` epochs; ICL sees `prompt_prefix` (training block, separators) in
// its context and is scored over the target only.
struct ScoringContext {
  std::string mode;  // "FT" or "ICL"
  std::span<const TokenSeq> train;
  int m = 1;
  std::span<const std::string> prompt_prefix;
};

// A model state, ready to score strings.
class StringScorer {
 public:
  virtual ~StringScorer() = default;
  virtual ScoreResult Score(std::string_view string_id,
                            std::span<const std::string> target) const = 0;
};

// A scorer family. Prepare() is the (possibly expensive) training or
// in-context conditioning step; the returned object is immutable.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual ScorerDescriptor descriptor() const = 0;
  virtual std::unique_ptr<StringScorer> Prepare(const ScoringContext& context) const = 0;
};

// Loss -log P_L(s) from the grammar itself (+infinity off-language); needs
// no training. Whole-string loss only, so per_token is absent.
class OracleScorer : public Scorer {
 public:
  explicit OracleScorer(Grammar g);
  ScorerDescriptor descriptor() const override;
  std::unique_ptr<StringScorer> Prepare(const ScoringContext& context) const override;
  ScoreResult Score(std::span<const std::string> target) const;

 private:
  std::shared_ptr<const Recognizer> recognizer_;
};

// Per-token loss u ~ Uniform(0, 1) per string, derived from (seed,
// string_id) only; total = u * |s|.
class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed);
  ScorerDescriptor descriptor() const override;
  std::unique_ptr<StringScorer> Prepare(const ScoringContext& context) const override;
  ScoreResult Score(std::string_view string_id, std::span<const std::string> target) const;

 private:
  std::uint64_t seed_;
};

}  // namespace langprof

#endif  // LANGPROF_EVALUATION_SCORERS_H_
