#include "langprof/evaluation/scorers.h"

#include <cmath>

#include "langprof/rng.h"

namespace langprof {
namespace {

class OracleState : public StringScorer {
 public:
  explicit OracleState(const OracleScorer* owner) : owner_(owner) {}
  ScoreResult Score(std::string_view, std::span<const std::string> target) const override {
    return owner_->Score(target);
  }

 private:
  const OracleScorer* owner_;
};

class RandomState : public StringScorer {
 public:
  explicit RandomState(const RandomScorer* owner) : owner_(owner) {}
  ScoreResult Score(std::string_view id, std::span<const std::string> target) const override {
    return owner_->Score(id, target);
  }

 private:
  const RandomScorer* owner_;
};

}  // namespace

OracleScorer::OracleScorer(Grammar g)
    : recognizer_(std::make_shared<const Recognizer>(std::move(g))) {}

ScorerDescriptor OracleScorer::descriptor() const {
  ScorerDescriptor d;
  d.name = "oracle";
  d.kind = "oracle";
  d.vocabulary_info = "grammar alphabet; tokens outside it are non-members";
  d.config["grammar"] = recognizer_->grammar().metadata();
  return d;
}

std::unique_ptr<StringScorer> OracleScorer::Prepare(const ScoringContext&) const {
  return std::make_unique<OracleState>(this);
}

ScoreResult OracleScorer::Score(std::span<const std::string> target) const {
  ParseResult r = recognizer_->Parse(target);
  ScoreResult out;
  // 0.0 - x keeps a probability-1 string at +0 rather than -0.
  out.total_neglogprob = r.member ? 0.0 - *r.inside_logprob : INFINITY;
  return out;
}

RandomScorer::RandomScorer(std::uint64_t seed) : seed_(seed) {}

ScorerDescriptor RandomScorer::descriptor() const {
  ScorerDescriptor d;
  d.name = "random";
  d.kind = "random";
  d.vocabulary_info = "any token";
  d.config["seed"] = seed_;
  return d;
}

std::unique_ptr<StringScorer> RandomScorer::Prepare(const ScoringContext&) const {
  return std::make_unique<RandomState>(this);
}

ScoreResult RandomScorer::Score(std::string_view string_id,
                                std::span<const std::string> target) const {
  Rng rng = Rng(seed_).Fork(string_id);
  const double u = rng.UniformReal();
  ScoreResult out;
  out.total_neglogprob = u * static_cast<double>(target.size());
  out.per_token = std::vector<double>(target.size(), u);
  return out;
}

}  // namespace langprof
