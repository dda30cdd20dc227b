#ifndef LANGPROF_FINITE_LANGUAGE_H_
#define LANGPROF_FINITE_LANGUAGE_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "langprof/grammar.h"

namespace langprof {

// The string distribution of an acyclic grammar compiled into an
// epsilon-free weighted DAG automaton: every derivation corresponds to exactly
// one accepting path, and the path weight is the derivation probability.
//
// The automaton stays small even when the support does not (L1 has ~3.4e10
// strings but ~800 states), which makes exact sums over the support
// tractable: total mass, length distribution, prefix masses, and inner
// products between two languages via the product construction.
class FiniteLanguage {
 public:
  // Throws UnsupportedOperation for recursive grammars or when the automaton
  // would exceed `max_states`.
  static FiniteLanguage Compile(const Grammar& g,
                                std::size_t max_states = 5'000'000);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return out_.size(); }
  std::size_t num_edges() const;

  // Sum of P(s) over the support; 1 for a proper grammar.
  double TotalProbability() const;
  // Number of derivations. Exact while below 2^53.
  double DerivationCount() const;
  // Sum over strings of (number of derivations of s)^2; equals
  // DerivationCount() iff no string has two derivations.
  double CollisionCount() const;
  bool IsUnambiguous() const;

  // P(|s| = n), indexed by n.
  std::vector<double> LengthDistribution() const;
  LengthBounds Bounds() const;

  // Total probability of exactly this string (0 if not derivable).
  double StringProbability(std::span<const std::string> tokens) const;
  // Probability that a sampled string starts with `prefix`.
  double PrefixProbability(std::span<const std::string> prefix) const;

  // Distribution of the first `k` tokens; strings shorter than k appear
  // whole. Enumerates paths, so keep k small for branchy languages.
  std::vector<SupportEntry> PrefixDistribution(std::size_t k) const;

  // Sum over all strings s of P_a(s) * P_b(s). Tokens are matched by text.
  static double InnerProduct(const FiniteLanguage& a, const FiniteLanguage& b);

 private:
  struct Edge {
    int to;
    int token;
    double prob;
    double count;
  };

  FiniteLanguage() = default;
  std::vector<double> Backward(bool counts) const;
  static double Product(const FiniteLanguage& a, const FiniteLanguage& b,
                        bool counts);

  std::vector<std::string> alphabet_;
  // Edges always point to a higher state id; id order is topological.
  std::vector<std::vector<Edge>> out_;
  std::vector<double> final_prob_;
  std::vector<double> final_count_;
};

}  // namespace langprof

#endif  // LANGPROF_FINITE_LANGUAGE_H_
