#include "langprof/sampler.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <boost/math/distributions/chi_squared.hpp>

#include "langprof/errors.h"

namespace langprof {

StringSample SampleString(const Grammar& g, Rng& rng, const SampleOptions& options) {
  StringSample sample;
  sample.seed_path = rng.path();
  // Stack of (symbol, depth); popping left to right gives a leftmost
  // derivation, so the token order is the yield order.
  std::vector<std::pair<SymbolCode, std::size_t>> stack = {{g.start_id(), 0}};
  std::vector<double> weights;
  while (!stack.empty()) {
    auto [symbol, depth] = stack.back();
    stack.pop_back();
    if (IsTerminalCode(symbol)) {
      sample.tokens.push_back(g.alphabet()[TerminalIndex(symbol)]);
      continue;
    }
    if (depth >= options.max_depth) {
      throw DepthExceededError("expansion depth exceeded " +
                               std::to_string(options.max_depth) + " at " +
                               g.nonterminals()[symbol]);
    }
    const std::vector<int>& candidates = g.RulesFor(symbol);
    weights.clear();
    for (int ri : candidates) weights.push_back(g.compiled_rules()[ri].probability);
    const CompiledRule& rule = g.compiled_rules()[candidates[rng.Categorical(weights)]];
    sample.logprob += rule.logprob;
    for (auto it = rule.rhs.rbegin(); it != rule.rhs.rend(); ++it) {
      stack.emplace_back(*it, depth + 1);
    }
  }
  return sample;
}

std::vector<StringSample> SampleDataset(const Grammar& g, std::size_t count,
                                        const Rng& rng, const std::string& id_prefix,
                                        const SampleOptions& options) {
  std::vector<StringSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng child = rng.Fork(i);
    StringSample s = SampleString(g, child, options);
    s.id = id_prefix + std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

Split AlternateAssign(std::span<const StringSample> pool,
                      std::span<const TokenSeq> order) {
  std::map<TokenSeq, bool> to_train;
  for (std::size_t i = 0; i < order.size(); ++i) to_train[order[i]] = (i % 2 == 0);
  Split split;
  for (const StringSample& s : pool) {
    auto it = to_train.find(s.tokens);
    if (it == to_train.end()) continue;
    (it->second ? split.train : split.test).push_back(s);
  }
  return split;
}

Split StratifiedSplit(std::span<const StringSample> pool, const SplitSpec& spec) {
  if (spec.n_train == 0 || spec.n_test == 0) {
    throw ValidationError("split sizes must be at least 1");
  }
  std::vector<TokenSeq> order;
  {
    std::map<TokenSeq, bool> seen;
    for (const StringSample& s : pool) {
      if (seen.emplace(s.tokens, true).second) order.push_back(s.tokens);
    }
  }
  Rng rng = Rng(spec.seed).Fork("split").Fork(static_cast<std::uint64_t>(spec.replicate));
  Rng order_rng = rng.Fork("order");
  order_rng.Shuffle(order);
  Split split = AlternateAssign(pool, order);

  auto finish = [&](std::vector<StringSample>& side, std::size_t n,
                    std::string_view label) {
    if (side.size() < n) {
      throw ShortfallError("split r" + std::to_string(spec.replicate) + ": " +
                           std::string(label) + " side has " +
                           std::to_string(side.size()) + " strings, need " +
                           std::to_string(n) + "; enlarge the pool");
    }
    Rng side_rng = rng.Fork(label);
    side_rng.Shuffle(side);
    side.resize(n);
  };
  finish(split.train, spec.n_train, "train");
  finish(split.test, spec.n_test, "test");
  return split;
}

std::size_t DefaultPoolSize(std::size_t n_train, std::size_t n_test) {
  return std::max<std::size_t>(8 * (n_train + n_test), 10000);
}

LengthHistogram::LengthHistogram(std::map<std::size_t, double> weights) {
  for (const auto& [len, w] : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ValidationError("length histogram weights must be finite and non-negative");
    }
    if (w == 0.0) continue;
    if (len == 0) throw ValidationError("length histogram contains length 0");
    lengths_.push_back(len);
    weights_.push_back(w);
  }
}

LengthHistogram LengthHistogram::FromSamples(std::span<const StringSample> samples) {
  std::map<std::size_t, double> counts;
  for (const StringSample& s : samples) counts[s.tokens.size()] += 1.0;
  return LengthHistogram(std::move(counts));
}

LengthHistogram LengthHistogram::FromSequences(std::span<const TokenSeq> sequences) {
  std::map<std::size_t, double> counts;
  for (const TokenSeq& s : sequences) counts[s.size()] += 1.0;
  return LengthHistogram(std::move(counts));
}

std::size_t LengthHistogram::Sample(Rng& rng) const {
  if (lengths_.empty()) throw ValidationError("empty length histogram");
  return lengths_[rng.Categorical(weights_)];
}

TokenSeq RandomString(const std::vector<std::string>& alphabet,
                      const LengthHistogram& lengths, Rng& rng) {
  if (alphabet.empty()) throw ValidationError("empty alphabet");
  std::size_t n = lengths.Sample(rng);
  TokenSeq out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(alphabet[rng.UniformInt(alphabet.size())]);
  return out;
}

GoodnessOfFit ChiSquareGoodnessOfFit(std::span<const double> observed,
                                     std::span<const double> expected_probability,
                                     double min_expected) {
  if (observed.size() != expected_probability.size() || observed.empty()) {
    throw ValidationError("chi-square: observed and expected must align and be nonempty");
  }
  double n = 0.0;
  for (double o : observed) n += o;
  std::vector<std::pair<double, double>> pooled;  // (observed, expected)
  double obs = 0.0, exp = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs += observed[i];
    exp += n * expected_probability[i];
    if (exp >= min_expected) {
      pooled.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (obs > 0.0 || exp > 0.0) {
    if (pooled.empty()) {
      pooled.emplace_back(obs, exp);
    } else {
      pooled.back().first += obs;
      pooled.back().second += exp;
    }
  }
  GoodnessOfFit result;
  result.bins = pooled.size();
  for (const auto& [o, e] : pooled) {
    if (e <= 0.0) {
      if (o > 0.0) result.statistic = INFINITY;
      continue;
    }
    result.statistic += (o - e) * (o - e) / e;
  }
  result.degrees_of_freedom = static_cast<int>(pooled.size()) - 1;
  if (result.degrees_of_freedom < 1) {
    result.p_value = 1.0;
  } else if (!std::isfinite(result.statistic)) {
    result.p_value = 0.0;
  } else {
    boost::math::chi_squared dist(result.degrees_of_freedom);
    result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  }
  return result;
}

}  // namespace langprof
