#ifndef LANGPROF_NEGATIVES_H_
#define LANGPROF_NEGATIVES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "langprof/grammar.h"
#include "langprof/recognizer.h"
#include "langprof/rng.h"
#include "langprof/sampler.h"

namespace langprof {

enum class NegativeKind { kEdit, kRandom };
enum class EditKind { kAdd, kDelete, kReplace };

std::string ToString(NegativeKind kind);
std::string ToString(EditKind kind);
NegativeKind ParseNegativeKind(std::string_view text);

struct Edit {
  EditKind kind;
  std::size_t position;  // 0-based; for kAdd the insertion point in [0, len]
  std::string token;     // inserted or replacement token; empty for kDelete
};

TokenSeq ApplyEdit(const TokenSeq& tokens, const Edit& edit);

struct NegativeSample {
  std::string id;
  TokenSeq tokens;
  NegativeKind kind = NegativeKind::kEdit;
  std::string source_id;          // edit kind only
  int nominal_edit_distance = 0;  // edit kind only
  bool verified = false;
  std::vector<EditKind> edits;    // edit kind only, in application order
};

// Applies k sequential single-token edits at uniformly random positions.
// Each edit type is uniform over the admissible ones: add always, delete
// when the current length is at least 2, replace when the alphabet offers a
// different token. Inserted and replacement tokens are uniform over the
// alphabet (replacements exclude the current token).
TokenSeq Mutate(const TokenSeq& tokens, int k, const std::vector<std::string>& alphabet,
                Rng& rng, std::vector<Edit>* applied = nullptr);

struct NegativeOptions {
  std::size_t attempt_cap = 1000;  // per emitted sample
  std::string id_prefix;           // default "e<k>_" or "rand_"
  // Also require the candidate to be exactly k edits from every string in
  // the language (minimum over the enumerated support). Small languages only.
  bool strict = false;
};

struct GenerationStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  double acceptance_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted) / attempts;
  }
};

// Each sample i draws from rng.Fork(i): a uniformly chosen positive is
// mutated k times; the candidate is kept only if the recognizer rejects it
// and its Levenshtein distance to the source is exactly k. Throws
// AttemptCapExceeded (with the acceptance rate so far) when one sample
// exhausts the cap.
std::vector<NegativeSample> GenerateEditNegatives(
    const Recognizer& recognizer, std::span<const StringSample> positives, int k,
    std::size_t count, const Rng& rng, const NegativeOptions& options = {},
    GenerationStats* stats = nullptr);

// Length from `lengths`, tokens uniform over the grammar alphabet, kept only
// if the recognizer rejects it.
std::vector<NegativeSample> GenerateRandomNegatives(
    const Recognizer& recognizer, const LengthHistogram& lengths, std::size_t count,
    const Rng& rng, const NegativeOptions& options = {},
    GenerationStats* stats = nullptr);

}  // namespace langprof

#endif  // LANGPROF_NEGATIVES_H_
