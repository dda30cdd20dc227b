#include "langprof/negatives.h"

#include <algorithm>

#include "langprof/errors.h"

namespace langprof {

std::string ToString(NegativeKind kind) {
  return kind == NegativeKind::kEdit ? "edit" : "random";
}

std::string ToString(EditKind kind) {
  switch (kind) {
    case EditKind::kAdd:
      return "add";
    case EditKind::kDelete:
      return "delete";
    case EditKind::kReplace:
      return "replace";
  }
  return "unknown";
}

NegativeKind ParseNegativeKind(std::string_view text) {
  if (text == "edit") return NegativeKind::kEdit;
  if (text == "random") return NegativeKind::kRandom;
  throw ValidationError("unknown negative kind '" + std::string(text) + "'");
}

TokenSeq ApplyEdit(const TokenSeq& tokens, const Edit& edit) {
  TokenSeq out = tokens;
  switch (edit.kind) {
    case EditKind::kAdd:
      if (edit.position > out.size()) throw ValidationError("add position out of range");
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(edit.position), edit.token);
      break;
    case EditKind::kDelete:
      if (edit.position >= out.size()) throw ValidationError("delete position out of range");
      out.erase(out.begin() + static_cast<std::ptrdiff_t>(edit.position));
      break;
    case EditKind::kReplace:
      if (edit.position >= out.size()) throw ValidationError("replace position out of range");
      out[edit.position] = edit.token;
      break;
  }
  return out;
}

TokenSeq Mutate(const TokenSeq& tokens, int k, const std::vector<std::string>& alphabet,
                Rng& rng, std::vector<Edit>* applied) {
  if (k < 1) throw ValidationError("edit count must be at least 1");
  if (alphabet.empty()) throw ValidationError("empty alphabet");
  TokenSeq cur = tokens;
  std::vector<EditKind> admissible;
  for (int step = 0; step < k; ++step) {
    admissible = {EditKind::kAdd};
    if (cur.size() >= 2) admissible.push_back(EditKind::kDelete);
    if (!cur.empty() && alphabet.size() >= 2) admissible.push_back(EditKind::kReplace);
    Edit edit{admissible[rng.UniformInt(admissible.size())], 0, ""};
    switch (edit.kind) {
      case EditKind::kAdd:
        edit.position = rng.UniformInt(cur.size() + 1);
        edit.token = alphabet[rng.UniformInt(alphabet.size())];
        break;
      case EditKind::kDelete:
        edit.position = rng.UniformInt(cur.size());
        break;
      case EditKind::kReplace: {
        edit.position = rng.UniformInt(cur.size());
        std::vector<const std::string*> others;
        for (const std::string& t : alphabet) {
          if (t != cur[edit.position]) others.push_back(&t);
        }
        edit.token = *others[rng.UniformInt(others.size())];
        break;
      }
    }
    cur = ApplyEdit(cur, edit);
    if (applied) applied->push_back(std::move(edit));
  }
  return cur;
}

namespace {

std::vector<TokenSeq> StrictSupport(const Recognizer& recognizer, bool strict) {
  std::vector<TokenSeq> support;
  if (!strict) return support;
  for (SupportEntry& e : EnumerateSupport(recognizer.grammar())) {
    support.push_back(std::move(e.tokens));
  }
  return support;
}

bool FarFromLanguage(const TokenSeq& candidate, const std::vector<TokenSeq>& support,
                     std::size_t k) {
  for (const TokenSeq& s : support) {
    if (Levenshtein(candidate, s) < k) return false;
  }
  return true;
}

}  // namespace

std::vector<NegativeSample> GenerateEditNegatives(
    const Recognizer& recognizer, std::span<const StringSample> positives, int k,
    std::size_t count, const Rng& rng, const NegativeOptions& options,
    GenerationStats* stats) {
  if (k < 1) throw ValidationError("edit distance must be at least 1");
  if (count > 0 && positives.empty()) throw ValidationError("no positives to edit");
  const std::vector<std::string>& alphabet = recognizer.grammar().alphabet();
  const std::string prefix =
      options.id_prefix.empty() ? "e" + std::to_string(k) + "_" : options.id_prefix;
  const std::vector<TokenSeq> support = StrictSupport(recognizer, options.strict);
  GenerationStats local;
  GenerationStats& st = stats ? *stats : local;

  std::vector<NegativeSample> out;
  out.reserve(count);
  std::vector<Edit> edits;
  for (std::size_t i = 0; i < count; ++i) {
    Rng child = rng.Fork(i);
    bool done = false;
    for (std::size_t attempt = 0; attempt < options.attempt_cap; ++attempt) {
      ++st.attempts;
      const StringSample& source = positives[child.UniformInt(positives.size())];
      edits.clear();
      TokenSeq candidate = Mutate(source.tokens, k, alphabet, child, &edits);
      if (Levenshtein(source.tokens, candidate) != static_cast<std::size_t>(k)) continue;
      if (recognizer.Accepts(candidate)) continue;
      if (options.strict && !FarFromLanguage(candidate, support, k)) continue;
      ++st.accepted;
      NegativeSample neg;
      neg.id = prefix + std::to_string(i);
      neg.tokens = std::move(candidate);
      neg.kind = NegativeKind::kEdit;
      neg.source_id = source.id;
      neg.nominal_edit_distance = k;
      neg.verified = true;
      for (const Edit& e : edits) neg.edits.push_back(e.kind);
      out.push_back(std::move(neg));
      done = true;
      break;
    }
    if (!done) {
      throw AttemptCapExceeded(
          "edit negatives (k=" + std::to_string(k) + "): sample " + std::to_string(i) +
              " not found within " + std::to_string(options.attempt_cap) +
              " attempts; acceptance rate " + std::to_string(st.acceptance_rate()),
          st.attempts, st.accepted);
    }
  }
  return out;
}

std::vector<NegativeSample> GenerateRandomNegatives(
    const Recognizer& recognizer, const LengthHistogram& lengths, std::size_t count,
    const Rng& rng, const NegativeOptions& options, GenerationStats* stats) {
  const std::vector<std::string>& alphabet = recognizer.grammar().alphabet();
  const std::string prefix = options.id_prefix.empty() ? "rand_" : options.id_prefix;
  GenerationStats local;
  GenerationStats& st = stats ? *stats : local;

  std::vector<NegativeSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng child = rng.Fork(i);
    bool done = false;
    for (std::size_t attempt = 0; attempt < options.attempt_cap; ++attempt) {
      ++st.attempts;
      TokenSeq candidate = RandomString(alphabet, lengths, child);
      if (recognizer.Accepts(candidate)) continue;
      ++st.accepted;
      NegativeSample neg;
      neg.id = prefix + std::to_string(i);
      neg.tokens = std::move(candidate);
      neg.kind = NegativeKind::kRandom;
      neg.verified = true;
      out.push_back(std::move(neg));
      done = true;
      break;
    }
    if (!done) {
      throw AttemptCapExceeded(
          "random negatives: sample " + std::to_string(i) + " not found within " +
              std::to_string(options.attempt_cap) + " attempts; acceptance rate " +
              std::to_string(st.acceptance_rate()),
          st.attempts, st.accepted);
    }
  }
  return out;
}

}  // namespace langprof
