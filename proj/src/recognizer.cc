#include "langprof/recognizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "langprof/errors.h"

namespace langprof {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCountCap = static_cast<double>(ParseResult::kDerivationCountCap);

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double SatAdd(double a, double b) { return std::min(a + b, kCountCap); }
double SatMul(double a, double b) { return std::min(a * b, kCountCap); }

bool IsUnaryRule(const CompiledRule& r) {
  return r.rhs.size() == 1 && !IsTerminalCode(r.rhs[0]);
}

// Solves (I - U) W = I by Gauss-Jordan elimination with partial pivoting.
std::vector<std::vector<double>> InvertIMinus(const std::vector<std::vector<double>>& u) {
  const std::size_t n = u.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - u[i][j];
    a[i][n + i] = 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) {
      throw ValidationError("unary rule cycle carries all probability mass; "
                            "the grammar generates no finite strings");
    }
    std::swap(a[col], a[pivot]);
    const double d = a[col][col];
    for (double& x : a[col]) x /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < 2 * n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<std::vector<double>> w(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i][j] = std::max(0.0, a[i][n + j]);
  }
  return w;
}

struct Item {
  int rule;
  int dot;
  int origin;
  double logw;
  double count;
};

struct ChartSet {
  std::vector<Item> items;
  std::unordered_map<std::uint64_t, int> index;
  std::vector<std::vector<int>> waiting_nt;
  std::vector<std::vector<int>> waiting_t;
};

}  // namespace

Recognizer::Recognizer(Grammar g) : grammar_(std::move(g)) {
  const int n = grammar_.num_nonterminals();
  const auto& rules = grammar_.compiled_rules();

  is_item_rule_.resize(rules.size());
  std::vector<std::vector<double>> u(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<int>> unary_children(n);  // one entry per rule
  for (std::size_t r = 0; r < rules.size(); ++r) {
    is_item_rule_[r] = !IsUnaryRule(rules[r]);
    if (!is_item_rule_[r]) {
      u[rules[r].lhs][rules[r].rhs[0]] += rules[r].probability;
      unary_children[rules[r].lhs].push_back(rules[r].rhs[0]);
    }
  }

  // reach[a][b]: a =>* b by unary rules (reflexive).
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a) {
    reach[a][a] = true;
    for (int b : unary_children[a]) reach[a][b] = true;
  }
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < n; ++a) {
      if (!reach[a][k]) continue;
      for (int b = 0; b < n; ++b) {
        if (reach[k][b]) reach[a][b] = true;
      }
    }
  }
  std::vector<bool> cyclic(n, false);
  bool any_cycle = false;
  for (int a = 0; a < n; ++a) {
    for (int c : unary_children[a]) {
      if (reach[c][a]) cyclic[a] = true;
    }
    any_cycle = any_cycle || cyclic[a];
  }

  // Unary-chain weights: W = sum over chains = (I - U)^-1.
  std::vector<std::vector<double>> w;
  if (any_cycle) {
    w = InvertIMinus(u);
  } else {
    w.assign(n, {});
    auto solve = [&](auto&& self, int a) -> void {
      if (!w[a].empty()) return;
      std::vector<double> row(n, 0.0);
      row[a] = 1.0;
      for (int b = 0; b < n; ++b) {
        if (u[a][b] == 0.0) continue;
        self(self, b);
        for (int c = 0; c < n; ++c) row[c] += u[a][b] * w[b][c];
      }
      w[a] = std::move(row);
    };
    for (int a = 0; a < n; ++a) solve(solve, a);
  }

  // Chain counts; infinite (capped) whenever a chain can pass a cycle.
  std::vector<std::vector<double>> counts(n);
  auto count_row = [&](auto&& self, int a) -> const std::vector<double>& {
    if (!counts[a].empty()) return counts[a];
    std::vector<double> row(n, 0.0);
    if (cyclic[a]) {
      for (int b = 0; b < n; ++b) row[b] = reach[a][b] ? kCountCap : 0.0;
    } else {
      row[a] = 1.0;
      for (int c : unary_children[a]) {
        const std::vector<double>& sub = self(self, c);
        for (int b = 0; b < n; ++b) row[b] = SatAdd(row[b], sub[b]);
      }
    }
    counts[a] = std::move(row);
    return counts[a];
  };
  unary_ancestors_.assign(n, {});
  for (int a = 0; a < n; ++a) {
    const std::vector<double>& row = count_row(count_row, a);
    for (int b = 0; b < n; ++b) {
      if (!reach[a][b] || w[a][b] <= 0.0) continue;
      unary_ancestors_[b].push_back({a, std::log(w[a][b]), row[b]});
    }
  }

  // Left-corner closure for prediction.
  std::vector<std::vector<bool>> corner(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a) corner[a][a] = true;
  for (const CompiledRule& r : rules) {
    if (!IsTerminalCode(r.rhs[0])) corner[r.lhs][r.rhs[0]] = true;
  }
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < n; ++a) {
      if (!corner[a][k]) continue;
      for (int b = 0; b < n; ++b) {
        if (corner[k][b]) corner[a][b] = true;
      }
    }
  }
  predict_rules_.assign(n, {});
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (!corner[a][b]) continue;
      for (int r : grammar_.RulesFor(b)) {
        if (is_item_rule_[r]) predict_rules_[a].push_back(r);
      }
    }
  }
}

ParseResult Recognizer::Parse(std::span<const std::string> tokens) const {
  ParseResult result;
  std::optional<std::vector<int>> encoded = grammar_.Encode(tokens);
  if (!encoded || encoded->empty()) return result;
  const std::vector<int>& ids = *encoded;
  const std::size_t n = ids.size();
  const int num_nt = grammar_.num_nonterminals();
  const auto& rules = grammar_.compiled_rules();
  std::size_t max_rhs = 0;
  std::vector<double> rule_logp(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    max_rhs = std::max(max_rhs, rules[r].rhs.size());
    rule_logp[r] = std::log(rules[r].probability);
  }

  std::vector<ChartSet> chart(n + 1);
  auto key = [&](int rule, int dot, int origin) {
    return (static_cast<std::uint64_t>(rule) * (max_rhs + 1) + dot) * (n + 1) + origin;
  };
  // Returns (index, inserted). Duplicates accumulate weight when `accumulate`.
  auto add = [&](ChartSet& set, int rule, int dot, int origin, double logw,
                 double count, bool accumulate) -> std::pair<int, bool> {
    auto [it, inserted] = set.index.try_emplace(key(rule, dot, origin),
                                                static_cast<int>(set.items.size()));
    if (inserted) {
      set.items.push_back({rule, dot, origin, logw, count});
    } else if (accumulate) {
      Item& item = set.items[it->second];
      item.logw = LogAdd(item.logw, logw);
      item.count = SatAdd(item.count, count);
    }
    return {it->second, inserted};
  };
  auto is_complete = [&](const Item& item) {
    return static_cast<std::size_t>(item.dot) == rules[item.rule].rhs.size();
  };
  auto predict_and_index = [&](ChartSet& set, int position) {
    std::vector<bool> predicted(num_nt, false);
    const std::size_t existing = set.items.size();
    for (std::size_t i = 0; i < existing; ++i) {
      const Item item = set.items[i];
      if (is_complete(item)) continue;
      SymbolCode next = rules[item.rule].rhs[item.dot];
      if (IsTerminalCode(next) || predicted[next]) continue;
      predicted[next] = true;
      for (int r : predict_rules_[next]) add(set, r, 0, position, rule_logp[r], 1.0, false);
    }
    set.waiting_nt.assign(num_nt, {});
    set.waiting_t.assign(grammar_.num_terminals(), {});
    for (std::size_t i = 0; i < set.items.size(); ++i) {
      const Item& item = set.items[i];
      if (is_complete(item)) continue;
      SymbolCode next = rules[item.rule].rhs[item.dot];
      if (IsTerminalCode(next)) {
        set.waiting_t[TerminalIndex(next)].push_back(static_cast<int>(i));
      } else {
        set.waiting_nt[next].push_back(static_cast<int>(i));
      }
    }
  };

  for (int r : predict_rules_[grammar_.start_id()]) add(chart[0], r, 0, 0, rule_logp[r], 1.0, false);
  predict_and_index(chart[0], 0);

  double final_logw = kNegInf;
  double final_count = 0.0;
  std::vector<double> logb(num_nt), bcount(num_nt), logt(num_nt), tcount(num_nt);
  for (std::size_t j = 1; j <= n; ++j) {
    ChartSet& set = chart[j];
    const ChartSet& prev = chart[j - 1];
    // bucket[k]: complete items in set j with origin k.
    std::vector<std::vector<int>> bucket(j);
    for (int idx : prev.waiting_t[ids[j - 1]]) {
      const Item item = prev.items[idx];
      auto [ni, inserted] = add(set, item.rule, item.dot + 1, item.origin, item.logw,
                                item.count, true);
      if (inserted && is_complete(set.items[ni])) bucket[item.origin].push_back(ni);
    }
    if (set.items.empty()) return result;

    // Complete spans (k, j) from the right: a span completed at origin k only
    // ever yields complete items at origins < k.
    for (std::size_t k = j; k-- > 0;) {
      if (bucket[k].empty()) continue;
      std::fill(logb.begin(), logb.end(), kNegInf);
      std::fill(bcount.begin(), bcount.end(), 0.0);
      for (int idx : bucket[k]) {
        const Item& item = set.items[idx];
        const int lhs = rules[item.rule].lhs;
        logb[lhs] = LogAdd(logb[lhs], item.logw);
        bcount[lhs] = SatAdd(bcount[lhs], item.count);
      }
      std::fill(logt.begin(), logt.end(), kNegInf);
      std::fill(tcount.begin(), tcount.end(), 0.0);
      for (int b = 0; b < num_nt; ++b) {
        if (logb[b] == kNegInf) continue;
        for (const Ancestor& anc : unary_ancestors_[b]) {
          logt[anc.nonterminal] = LogAdd(logt[anc.nonterminal], anc.log_weight + logb[b]);
          tcount[anc.nonterminal] = SatAdd(tcount[anc.nonterminal], SatMul(anc.count, bcount[b]));
        }
      }
      if (j == n && k == 0) {
        final_logw = logt[grammar_.start_id()];
        final_count = tcount[grammar_.start_id()];
      }
      const ChartSet& origin_set = chart[k];
      for (int a = 0; a < num_nt; ++a) {
        if (logt[a] == kNegInf) continue;
        for (int idx : origin_set.waiting_nt[a]) {
          const Item item = origin_set.items[idx];
          auto [ni, inserted] = add(set, item.rule, item.dot + 1, item.origin,
                                    item.logw + logt[a], SatMul(item.count, tcount[a]), true);
          if (inserted && is_complete(set.items[ni])) {
            if (static_cast<std::size_t>(item.origin) >= k) {
              throw std::logic_error("Earley completion produced a non-decreasing origin");
            }
            bucket[item.origin].push_back(ni);
          }
        }
      }
    }
    if (j < n) predict_and_index(set, static_cast<int>(j));
  }

  if (final_logw == kNegInf) return result;
  result.member = true;
  result.inside_logprob = final_logw;
  result.count_overflow = final_count >= kCountCap;
  result.derivation_count = result.count_overflow
                                ? ParseResult::kDerivationCountCap
                                : static_cast<std::uint64_t>(final_count);
  return result;
}

bool Recognizer::Accepts(std::span<const std::string> tokens) const {
  return Parse(tokens).member;
}

double Recognizer::InsideLogprob(std::span<const std::string> tokens) const {
  ParseResult r = Parse(tokens);
  if (!r.member) {
    throw NotAMemberError("string of length " + std::to_string(tokens.size()) +
                          " is not in the language");
  }
  return *r.inside_logprob;
}

bool Accepts(const Grammar& g, std::span<const std::string> tokens) {
  return Recognizer(g).Accepts(tokens);
}

double InsideLogprob(const Grammar& g, std::span<const std::string> tokens) {
  return Recognizer(g).InsideLogprob(tokens);
}

std::size_t Levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace langprof
