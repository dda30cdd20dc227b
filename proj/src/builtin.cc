#include "langprof/builtin.h"

#include <set>
#include <unordered_map>

#include "langprof/errors.h"

namespace langprof {
namespace {

constexpr std::string_view kAlphaText = R"(%name G_alpha
%alphabet 1 2 3 4 5 6 7 8 9
S -> A19 [1]
A19 -> A18 A16 [0.50]
A19 -> A16 A18 A17 [0.50]
A18 -> A15 A14 A13 [0.50]
A18 -> A14 A15 A13 [0.50]
A17 -> A14 A13 A15 [0.50]
A17 -> A13 A14 A15 [0.50]
A16 -> A14 A15 [0.50]
A16 -> A15 A14 [0.50]
A15 -> A11 A12 A10 [0.50]
A15 -> A12 A10 A11 [0.50]
A14 -> A11 A10 A12 [0.50]
A14 -> A10 A11 A12 [0.50]
A13 -> A10 A12 A11 [0.50]
A13 -> A12 A11 A10 [0.50]
A12 -> 9 8 7 [0.50]
A12 -> 8 7 [0.50]
A11 -> 6 5 [0.50]
A11 -> 6 4 5 [0.50]
A10 -> 3 1 [0.50]
A10 -> 1 2 3 [0.50]
)";

// The duplicated rules (B3 -> B2, B2 -> B1, E3 -> E2) are part of the
// grammar as published and are kept as distinct rules.
constexpr std::string_view kBetaText = R"(%name G_beta
%alphabet 1 2 3 4 5 6 7 8 9
S -> S5 [1]
S5 -> B4 C1_1 E4 T1_1 [0.25]
S5 -> B4 C1_2 E4 T1_2 [0.25]
S5 -> B4 C1_3 E4 T1_3 [0.25]
S5 -> B4 C1_4 E4 T1_4 [0.25]
B4 -> B3 [0.3333]
B4 -> B3 B3 B3 [0.3333]
B4 -> B3 B3 [0.3333]
B3 -> B2 [0.3333]
B3 -> B2 [0.3333]
B3 -> B2 B2 [0.3333]
B2 -> B1 [0.3333]
B2 -> B1 [0.3333]
B2 -> B1 B1 B1 [0.3333]
B1 -> 2 9 3 [0.3333]
B1 -> 9 6 1 [0.3333]
B1 -> 1 8 6 2 [0.3333]
E4 -> E3 [0.3333]
E4 -> E3 E3 [0.3333]
E4 -> E3 E3 E3 [0.3333]
E3 -> E2 [0.3333]
E3 -> E2 E2 [0.3333]
E3 -> E2 [0.3333]
E2 -> E1 E1 [0.3333]
E2 -> E1 [0.3333]
E2 -> E1 E1 E1 [0.3333]
E1 -> 5 6 [0.3333]
E1 -> 1 8 6 6 [0.3333]
E1 -> 1 5 1 5 5 9 [0.3333]
T1_1 -> 1 [1]
T1_2 -> 2 [1]
T1_3 -> 3 [1]
T1_4 -> 4 [1]
C1_1 -> 5 [1]
C1_2 -> 6 [1]
C1_3 -> 7 [1]
C1_4 -> 8 [1]
C1_5 -> 9 [1]
)";

const std::vector<std::string>& NumericalAlphabet() {
  static const std::vector<std::string> kTokens = {"1", "2", "3", "4", "5",
                                                   "6", "7", "8", "9"};
  return kTokens;
}

const std::vector<std::string>& LatinAlphabet() {
  static const std::vector<std::string> kTokens = {"a", "b", "c", "d", "e",
                                                   "f", "g", "h", "i"};
  return kTokens;
}

}  // namespace

std::optional<LanguageId> ParseLanguageId(std::string_view text) {
  if (text.size() == 2 && (text[0] == 'L' || text[0] == 'l') &&
      text[1] >= '1' && text[1] <= '6') {
    return static_cast<LanguageId>(text[1] - '0');
  }
  return std::nullopt;
}

std::string ToString(LanguageId id) {
  return "L" + std::to_string(static_cast<int>(id));
}

std::string_view AlphaGrammarText() { return kAlphaText; }
std::string_view BetaGrammarText() { return kBetaText; }

std::vector<std::string> BuiltinAlphabet(
    LanguageId id, const std::vector<std::string>& substitution) {
  switch (id) {
    case LanguageId::kL1:
    case LanguageId::kL4:
      return NumericalAlphabet();
    case LanguageId::kL2:
    case LanguageId::kL5:
      return LatinAlphabet();
    case LanguageId::kL3:
    case LanguageId::kL6: {
      if (substitution.size() != 9) {
        throw ValidationError(ToString(id) +
                              " needs an alphabet substitution list of exactly "
                              "9 tokens (got " +
                              std::to_string(substitution.size()) + ")");
      }
      std::set<std::string> distinct(substitution.begin(), substitution.end());
      if (distinct.size() != 9) {
        throw ValidationError(ToString(id) + " substitution tokens must be distinct");
      }
      for (const std::string& t : substitution) {
        if (t.empty() || t.find_first_of(" \t\r\n") != std::string::npos) {
          throw ValidationError("substitution token '" + t +
                                "' is empty or contains whitespace");
        }
      }
      return substitution;
    }
  }
  throw ValidationError("unknown language id");
}

Grammar SubstituteAlphabet(const Grammar& g, const std::vector<std::string>& from,
                           const std::vector<std::string>& to) {
  if (from.size() != to.size()) {
    throw ValidationError("alphabet substitution lists differ in length");
  }
  std::unordered_map<std::string, std::string> map;
  for (std::size_t i = 0; i < from.size(); ++i) map[from[i]] = to[i];
  std::vector<Rule> rules = g.rules();
  for (Rule& r : rules) {
    for (std::string& s : r.rhs) {
      if (g.IsNonterminal(s)) continue;
      auto it = map.find(s);
      if (it != map.end()) s = it->second;
    }
  }
  std::vector<std::string> alphabet;
  for (const std::string& t : g.alphabet()) {
    auto it = map.find(t);
    alphabet.push_back(it != map.end() ? it->second : t);
  }
  return Grammar::FromRules(std::move(rules), g.start(), std::move(alphabet), g.metadata())
      .WithWarnings(g.warnings());
}

Grammar Builtin(LanguageId id, const std::vector<std::string>& substitution) {
  const bool alpha = static_cast<int>(id) <= 3;
  std::vector<std::string> alphabet = BuiltinAlphabet(id, substitution);
  Grammar base = ParseGrammar(alpha ? kAlphaText : kBetaText);
  Grammar g = alphabet == NumericalAlphabet()
                  ? base
                  : SubstituteAlphabet(base, NumericalAlphabet(), alphabet);
  return g.WithMetadata(ToString(id));
}

}  // namespace langprof
