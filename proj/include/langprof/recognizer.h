#ifndef LANGPROF_RECOGNIZER_H_
#define LANGPROF_RECOGNIZER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "langprof/grammar.h"

namespace langprof {

struct ParseResult {
  bool member = false;
  // log P(tokens), summed over all derivations. Set iff member.
  std::optional<double> inside_logprob;
  // Number of distinct derivations, saturating at kDerivationCountCap.
  std::uint64_t derivation_count = 0;
  bool count_overflow = false;

  static constexpr std::uint64_t kDerivationCountCap = std::uint64_t{1} << 32;
};

// Earley chart parser over the grammar as written: rules of any arity, no
// normal-form conversion. Inside probabilities are carried on the chart in
// log space. Chains of unary nonterminal rules (A -> B) are folded into a
// precomputed closure, which also makes unary cycles well defined.
//
// Construction precomputes the closures; Parse() is const and keeps all
// chart state local, so one Recognizer can serve concurrent callers.
class Recognizer {
 public:
  explicit Recognizer(Grammar g);

  const Grammar& grammar() const { return grammar_; }

  // Unknown tokens and the empty sequence are non-members.
  ParseResult Parse(std::span<const std::string> tokens) const;
  bool Accepts(std::span<const std::string> tokens) const;
  // Throws NotAMemberError for non-members.
  double InsideLogprob(std::span<const std::string> tokens) const;

 private:
  struct Ancestor {
    int nonterminal;
    double log_weight;  // log of the summed unary-chain probability
    double count;       // number of unary chains, saturated
  };

  Grammar grammar_;
  // Rules that become chart items (every rule except A -> B unary ones).
  std::vector<bool> is_item_rule_;
  // For each B: every A with A =>* B through unary rules, including A = B.
  std::vector<std::vector<Ancestor>> unary_ancestors_;
  // For each A: item rules predicted when A is expected (left-corner
  // closure through first symbols and unary rules).
  std::vector<std::vector<int>> predict_rules_;
};

bool Accepts(const Grammar& g, std::span<const std::string> tokens);
double InsideLogprob(const Grammar& g, std::span<const std::string> tokens);

// Token-level edit distance (insert, delete, substitute; unit costs).
std::size_t Levenshtein(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace langprof

#endif  // LANGPROF_RECOGNIZER_H_
