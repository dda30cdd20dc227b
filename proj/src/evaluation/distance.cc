#include "langprof/evaluation/distance.h"

#include <algorithm>
#include <cmath>

namespace langprof {

double LanguageDistanceL2(const FiniteLanguage& a, const FiniteLanguage& b) {
  const double aa = FiniteLanguage::InnerProduct(a, a);
  const double bb = FiniteLanguage::InnerProduct(b, b);
  const double ab = FiniteLanguage::InnerProduct(a, b);
  // Cancellation can leave a tiny negative residue for equal languages.
  return std::sqrt(std::max(0.0, aa + bb - 2.0 * ab));
}

double LanguageDistanceL2(const Grammar& a, const Grammar& b) {
  return LanguageDistanceL2(FiniteLanguage::Compile(a), FiniteLanguage::Compile(b));
}

}  // namespace langprof
