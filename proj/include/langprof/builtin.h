#ifndef LANGPROF_BUILTIN_H_
#define LANGPROF_BUILTIN_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "langprof/grammar.h"

namespace langprof {

// The six shipped languages: two grammar skeletons, three alphabets each.
//   L1 alpha/numerical   L2 alpha/latin   L3 alpha/under-trained
//   L4 beta/numerical    L5 beta/latin    L6 beta/under-trained
enum class LanguageId { kL1 = 1, kL2, kL3, kL4, kL5, kL6 };

std::optional<LanguageId> ParseLanguageId(std::string_view text);
std::string ToString(LanguageId id);

// Grammar text with the numerical alphabet 1..9.
std::string_view AlphaGrammarText();
std::string_view BetaGrammarText();

// Alphabet used for a language: 1..9, a..i, or the caller's 9 tokens for
// the under-trained variants (mapped positionally onto 1..9).
std::vector<std::string> BuiltinAlphabet(
    LanguageId id, const std::vector<std::string>& substitution = {});

// Throws ValidationError if L3/L6 is requested without exactly 9 distinct
// substitution tokens.
Grammar Builtin(LanguageId id, const std::vector<std::string>& substitution = {});

// Rewrites every terminal of `g` through a positional mapping from `from`
// onto `to` (same length).
Grammar SubstituteAlphabet(const Grammar& g, const std::vector<std::string>& from,
                           const std::vector<std::string>& to);

}  // namespace langprof

#endif  // LANGPROF_BUILTIN_H_
