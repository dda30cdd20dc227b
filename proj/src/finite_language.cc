#include "langprof/finite_language.h"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <utility>

#include "langprof/errors.h"

namespace langprof {
namespace {

struct FrontierEntry {
  int state;
  double prob;
  double count;
};

using Frontier = std::vector<FrontierEntry>;

void MergeByState(Frontier& f) {
  std::sort(f.begin(), f.end(),
            [](const auto& a, const auto& b) { return a.state < b.state; });
  Frontier merged;
  for (const FrontierEntry& e : f) {
    if (!merged.empty() && merged.back().state == e.state) {
      merged.back().prob += e.prob;
      merged.back().count += e.count;
    } else {
      merged.push_back(e);
    }
  }
  f = std::move(merged);
}

}  // namespace

FiniteLanguage FiniteLanguage::Compile(const Grammar& g, std::size_t max_states) {
  if (IsRecursive(g)) {
    throw UnsupportedOperation(
        "FiniteLanguage requires an acyclic grammar; use Monte Carlo "
        "estimation for recursive grammars");
  }
  FiniteLanguage lang;
  lang.alphabet_ = g.alphabet();
  lang.out_.emplace_back();  // start state 0

  // Expanding a symbol from a frontier of (state, pending weight) pairs: a
  // terminal creates one fresh state that every frontier state links to, so
  // pending weights land on the emitted edge and no epsilon edges arise.
  auto expand = [&](auto&& self, const Frontier& frontier,
                    SymbolCode symbol) -> Frontier {
    if (IsTerminalCode(symbol)) {
      if (lang.out_.size() >= max_states) {
        throw UnsupportedOperation("FiniteLanguage exceeds " +
                                   std::to_string(max_states) + " states");
      }
      int target = static_cast<int>(lang.out_.size());
      lang.out_.emplace_back();
      for (const FrontierEntry& e : frontier) {
        lang.out_[e.state].push_back(
            {target, TerminalIndex(symbol), e.prob, e.count});
      }
      return {{target, 1.0, 1.0}};
    }
    Frontier result;
    for (int ri : g.RulesFor(symbol)) {
      const CompiledRule& rule = g.compiled_rules()[ri];
      Frontier f = frontier;
      for (FrontierEntry& e : f) e.prob *= rule.probability;
      for (SymbolCode s : rule.rhs) f = self(self, f, s);
      result.insert(result.end(), f.begin(), f.end());
    }
    MergeByState(result);
    return result;
  };

  Frontier final_frontier = expand(expand, {{0, 1.0, 1.0}}, g.start_id());
  lang.final_prob_.assign(lang.out_.size(), 0.0);
  lang.final_count_.assign(lang.out_.size(), 0.0);
  for (const FrontierEntry& e : final_frontier) {
    lang.final_prob_[e.state] += e.prob;
    lang.final_count_[e.state] += e.count;
  }
  for (auto& edges : lang.out_) {
    std::stable_sort(edges.begin(), edges.end(),
                     [](const Edge& a, const Edge& b) { return a.token < b.token; });
  }
  return lang;
}

std::size_t FiniteLanguage::num_edges() const {
  std::size_t n = 0;
  for (const auto& edges : out_) n += edges.size();
  return n;
}

std::vector<double> FiniteLanguage::Backward(bool counts) const {
  std::vector<double> beta(out_.size(), 0.0);
  for (std::size_t q = out_.size(); q-- > 0;) {
    double acc = counts ? final_count_[q] : final_prob_[q];
    for (const Edge& e : out_[q]) acc += (counts ? e.count : e.prob) * beta[e.to];
    beta[q] = acc;
  }
  return beta;
}

double FiniteLanguage::TotalProbability() const { return Backward(false)[0]; }

double FiniteLanguage::DerivationCount() const { return Backward(true)[0]; }

double FiniteLanguage::CollisionCount() const { return Product(*this, *this, true); }

bool FiniteLanguage::IsUnambiguous() const {
  return CollisionCount() == DerivationCount();
}

std::vector<double> FiniteLanguage::LengthDistribution() const {
  // alpha[q][n]: mass of paths of length n from the start to q.
  std::vector<std::vector<double>> alpha(out_.size());
  alpha[0] = {1.0};
  std::vector<double> dist;
  for (std::size_t q = 0; q < out_.size(); ++q) {
    const std::vector<double>& a = alpha[q];
    if (final_prob_[q] > 0.0) {
      if (dist.size() < a.size()) dist.resize(a.size(), 0.0);
      for (std::size_t n = 0; n < a.size(); ++n) dist[n] += a[n] * final_prob_[q];
    }
    for (const Edge& e : out_[q]) {
      std::vector<double>& b = alpha[e.to];
      if (b.size() < a.size() + 1) b.resize(a.size() + 1, 0.0);
      for (std::size_t n = 0; n < a.size(); ++n) b[n + 1] += a[n] * e.prob;
    }
    alpha[q].clear();
    alpha[q].shrink_to_fit();
  }
  return dist;
}

LengthBounds FiniteLanguage::Bounds() const {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> lo(out_.size(), kUnset), hi(out_.size(), 0);
  lo[0] = 0;
  LengthBounds b{kUnset, 0};
  for (std::size_t q = 0; q < out_.size(); ++q) {
    if (lo[q] == kUnset) continue;
    if (final_prob_[q] > 0.0) {
      b.min = std::min(b.min, lo[q]);
      b.max = std::max(b.max, hi[q]);
    }
    for (const Edge& e : out_[q]) {
      lo[e.to] = std::min(lo[e.to], lo[q] + 1);
      hi[e.to] = std::max(hi[e.to], hi[q] + 1);
    }
  }
  return b;
}

double FiniteLanguage::StringProbability(std::span<const std::string> tokens) const {
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) ids[alphabet_[i]] = static_cast<int>(i);
  std::map<int, double> cur = {{0, 1.0}};
  for (const std::string& t : tokens) {
    auto it = ids.find(t);
    if (it == ids.end()) return 0.0;
    std::map<int, double> next;
    for (const auto& [q, w] : cur) {
      for (const Edge& e : out_[q]) {
        if (e.token == it->second) next[e.to] += w * e.prob;
      }
    }
    if (next.empty()) return 0.0;
    cur = std::move(next);
  }
  double p = 0.0;
  for (const auto& [q, w] : cur) p += w * final_prob_[q];
  return p;
}

double FiniteLanguage::PrefixProbability(std::span<const std::string> prefix) const {
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) ids[alphabet_[i]] = static_cast<int>(i);
  std::map<int, double> cur = {{0, 1.0}};
  for (const std::string& t : prefix) {
    auto it = ids.find(t);
    if (it == ids.end()) return 0.0;
    std::map<int, double> next;
    for (const auto& [q, w] : cur) {
      for (const Edge& e : out_[q]) {
        if (e.token == it->second) next[e.to] += w * e.prob;
      }
    }
    if (next.empty()) return 0.0;
    cur = std::move(next);
  }
  std::vector<double> beta = Backward(false);
  double p = 0.0;
  for (const auto& [q, w] : cur) p += w * beta[q];
  return p;
}

std::vector<SupportEntry> FiniteLanguage::PrefixDistribution(std::size_t k) const {
  const std::vector<double> beta = Backward(false);
  std::map<std::vector<int>, double> mass;
  std::vector<int> prefix;
  auto walk = [&](auto&& self, int q, double w) -> void {
    if (prefix.size() == k) {
      mass[prefix] += w * beta[q];
      return;
    }
    if (final_prob_[q] > 0.0) mass[prefix] += w * final_prob_[q];
    for (const Edge& e : out_[q]) {
      prefix.push_back(e.token);
      self(self, e.to, w * e.prob);
      prefix.pop_back();
    }
  };
  walk(walk, 0, 1.0);
  std::vector<SupportEntry> out;
  out.reserve(mass.size());
  for (const auto& [ids, p] : mass) {
    SupportEntry entry;
    for (int t : ids) entry.tokens.push_back(alphabet_[t]);
    entry.probability = p;
    out.push_back(std::move(entry));
  }
  return out;
}

double FiniteLanguage::InnerProduct(const FiniteLanguage& a, const FiniteLanguage& b) {
  return Product(a, b, false);
}

double FiniteLanguage::Product(const FiniteLanguage& a, const FiniteLanguage& b,
                               bool counts) {
  // b's tokens re-indexed into a's alphabet; unmatched tokens never pair.
  std::unordered_map<std::string, int> a_ids;
  for (std::size_t i = 0; i < a.alphabet_.size(); ++i) {
    a_ids[a.alphabet_[i]] = static_cast<int>(i);
  }
  std::vector<int> b_to_a(b.alphabet_.size(), -1);
  for (std::size_t i = 0; i < b.alphabet_.size(); ++i) {
    auto it = a_ids.find(b.alphabet_[i]);
    if (it != a_ids.end()) b_to_a[i] = it->second;
  }
  std::vector<std::vector<Edge>> b_out(b.out_.size());
  for (std::size_t q = 0; q < b.out_.size(); ++q) {
    for (const Edge& e : b.out_[q]) {
      if (b_to_a[e.token] < 0) continue;
      Edge mapped = e;
      mapped.token = b_to_a[e.token];
      b_out[q].push_back(mapped);
    }
    std::stable_sort(b_out[q].begin(), b_out[q].end(),
                     [](const Edge& x, const Edge& y) { return x.token < y.token; });
  }

  // Both automata are topologically numbered and every product edge raises
  // both coordinates, so lexicographic pair order is a topological order.
  std::map<std::pair<int, int>, double> pending = {{{0, 0}, 1.0}};
  double total = 0.0;
  while (!pending.empty()) {
    auto it = pending.begin();
    const auto [qa, qb] = it->first;
    const double w = it->second;
    pending.erase(it);
    total += w * (counts ? a.final_count_[qa] * b.final_count_[qb]
                         : a.final_prob_[qa] * b.final_prob_[qb]);
    const auto& ea = a.out_[qa];
    const auto& eb = b_out[qb];
    std::size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
      if (ea[i].token < eb[j].token) {
        ++i;
      } else if (eb[j].token < ea[i].token) {
        ++j;
      } else {
        const int tok = ea[i].token;
        std::size_t i_end = i, j_end = j;
        while (i_end < ea.size() && ea[i_end].token == tok) ++i_end;
        while (j_end < eb.size() && eb[j_end].token == tok) ++j_end;
        for (std::size_t x = i; x < i_end; ++x) {
          for (std::size_t y = j; y < j_end; ++y) {
            double ww = counts ? ea[x].count * eb[y].count : ea[x].prob * eb[y].prob;
            pending[{ea[x].to, eb[y].to}] += w * ww;
          }
        }
        i = i_end;
        j = j_end;
      }
    }
  }
  return total;
}

}  // namespace langprof
