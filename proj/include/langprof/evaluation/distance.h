#ifndef LANGPROF_EVALUATION_DISTANCE_H_
#define LANGPROF_EVALUATION_DISTANCE_H_

#include "langprof/finite_language.h"
#include "langprof/grammar.h"

namespace langprof {

// Exact L2 distance between two string distributions,
//
//   sqrt(sum_s (P_a(s) - P_b(s))^2) = sqrt(<a,a> + <b,b> - 2 <a,b>),
//
// with the inner products summed over the product automaton, so the
// supports never need to be listed. Tokens are matched by text. Throws
// UnsupportedOperation for recursive grammars.
double LanguageDistanceL2(const Grammar& a, const Grammar& b);
double LanguageDistanceL2(const FiniteLanguage& a, const FiniteLanguage& b);

}  // namespace langprof

#endif  // LANGPROF_EVALUATION_DISTANCE_H_
