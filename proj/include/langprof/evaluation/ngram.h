#ifndef LANGPROF_EVALUATION_NGRAM_H_
#define LANGPROF_EVALUATION_NGRAM_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "langprof/evaluation/scorers.h"

namespace langprof {

struct NgramOptions {
  int order = 3;
  double smoothing = 0.1;  // additive k
  // Also charge the end-of-string event, folded into the last position.
  bool include_end = false;
};

// Additive-k smoothed n-gram model. The predicted vocabulary is the given
// tokens plus the end marker; the begin marker only ever appears as
// (padding) context:
//
//   P(w | h) = (c(h, w) + k) / (c(h) + k * |V|)
//
// which is a proper distribution over V at every context, seen or not.
class NgramModel {
 public:
  static constexpr std::string_view kBegin = "<s>";
  static constexpr std::string_view kEnd = "</s>";

  NgramModel(const std::vector<std::string>& vocabulary, NgramOptions options = {});

  // One string: begin padding, its tokens, end marker.
  void AddString(std::span<const std::string> tokens, double weight = 1.0);
  // A running token stream (a prompt): begin padding, no end marker.
  void AddStream(std::span<const std::string> tokens, double weight = 1.0);

  // `context` may contain kBegin; only its last order-1 entries matter and
  // shorter contexts are begin-padded.
  double Probability(std::span<const std::string> context, std::string_view token) const;

  // Per-token negative log probabilities of `target` as a fresh string.
  std::vector<double> ScoreString(std::span<const std::string> target) const;
  // ... as the continuation of `history` (e.g. a prompt ending in a
  // separator).
  std::vector<double> ScoreContinuation(std::span<const std::string> history,
                                        std::span<const std::string> target) const;

  std::size_t vocabulary_size() const { return vocab_size_; }
  const NgramOptions& options() const { return options_; }
  // Contexts observed at least once.
  std::size_t num_contexts() const { return counts_.size(); }

 private:
  struct ContextCounts {
    double total = 0.0;
    std::unordered_map<int, double> next;
  };

  int Id(std::string_view token) const;
  std::string Key(std::span<const int> context) const;
  void Observe(std::span<const int> ids, double weight);
  std::vector<double> ScoreIds(std::vector<int> context, std::span<const std::string> target) const;
  double Prob(std::span<const int> context, int token) const;

  NgramOptions options_;
  std::unordered_map<std::string, int> ids_;
  std::size_t vocab_size_;
  std::unordered_map<std::string, ContextCounts> counts_;
};

// Builtin n-gram scorer. FT: counts over the training strings, weighted by
// the epoch count m. ICL: counts over the prompt prefix itself (vocabulary
// extended by the separator); the target is scored as the continuation of
// the prompt.
class NgramScorer : public Scorer {
 public:
  NgramScorer(std::vector<std::string> alphabet, std::string separator,
              NgramOptions options = {});
  ScorerDescriptor descriptor() const override;
  std::unique_ptr<StringScorer> Prepare(const ScoringContext& context) const override;

 private:
  std::vector<std::string> alphabet_;
  std::string separator_;
  NgramOptions options_;
};

}  // namespace langprof

#endif  // LANGPROF_EVALUATION_NGRAM_H_
