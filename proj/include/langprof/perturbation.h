#ifndef LANGPROF_PERTURBATION_H_
#define LANGPROF_PERTURBATION_H_

#include <string>
#include <string_view>
#include <vector>

#include "langprof/grammar.h"

namespace langprof {

// Replace the right-hand side of one existing rule, keeping its probability.
struct Perturbation {
  std::string target_lhs;
  std::vector<std::string> original_rhs;
  std::vector<std::string> replacement_rhs;
  int index = 1;  // ordinal within its chain, 1-based

  bool operator==(const Perturbation&) const = default;
};

// Applies the first `level` perturbations of `chain` cumulatively. Level 0
// returns `g` unchanged. Each step rewrites the first rule matching
// (target_lhs, original_rhs); a step whose rule is absent (for example
// consumed by an earlier step) throws ValidationError naming the step.
Grammar Perturb(const Grammar& g, const std::vector<Perturbation>& chain,
                int level);

// Default five-step chain for the G_alpha skeleton, written over the
// numerical alphabet and mapped positionally onto `alphabet` (9 tokens).
//
//   1: A10  1 2 3 -> 1 3 2
//   2: A11  6 5   -> 5 6
//   3: A12  9 8 7 -> 8 7 9
//   4: A10  1 3 2 -> 3 1      (acts on the rule rewritten by step 1)
//   5: A12  8 7 9 -> 8 7      (acts on the rule rewritten by step 3)
//
// Steps 4 and 5 name an RHS identical to the sibling rule; the chain
// reads them as replacing the previously perturbed rule, which collapses
// A10 (resp. A12) onto a single expansion. The chain is plain data and can
// be replaced via LoadPerturbationChain.
std::vector<Perturbation> DefaultPerturbationChain(
    const std::vector<std::string>& alphabet);

// JSON list of {"lhs": ..., "original": [...], "replacement": [...]}.
std::vector<Perturbation> LoadPerturbationChain(std::string_view json_text);
std::string PerturbationChainToJson(const std::vector<Perturbation>& chain);

}  // namespace langprof

#endif  // LANGPROF_PERTURBATION_H_
