#ifndef LANGPROF_RNG_H_
#define LANGPROF_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace langprof {

// Seedable, splittable random source. Every consumer receives an explicit
// Rng; forks are derived from (seed, label path) only, so a child stream does
// not depend on how much the parent has been consumed.
//
// Distributions are implemented here instead of using <random>'s, whose
// output is implementation-defined; results are reproducible across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::string path = "");

  Rng Fork(std::string_view label) const;
  Rng Fork(std::uint64_t index) const;

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  // Uniform on [0, 1) with 53 bits of resolution.
  double UniformReal();
  // Index drawn proportionally to non-negative weights (at least one > 0).
  std::size_t Categorical(std::span<const double> weights);

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = UniformInt(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }
  // Human-readable provenance of this stream, e.g. "42/pool/r1/17".
  const std::string& path() const { return path_; }

 private:
  std::uint64_t seed_;
  std::string path_;
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view text);

}  // namespace langprof

#endif  // LANGPROF_RNG_H_
