#include "langprof/grammar.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_set>

#include "langprof/errors.h"

namespace langprof {
namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kRenormalizeTolerance = 1e-3;

std::string FormatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string JoinSymbols(const std::vector<std::string>& symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ' ';
    out += symbols[i];
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

Grammar Grammar::FromRules(std::vector<Rule> rules, std::string start,
                           std::vector<std::string> alphabet,
                           std::string metadata) {
  if (rules.empty()) throw ValidationError("grammar has no rules");
  Grammar g;
  g.metadata_ = std::move(metadata);

  for (const Rule& r : rules) {
    if (r.lhs.empty()) throw ValidationError("rule with empty left-hand side");
    if (r.rhs.empty()) {
      throw ValidationError("rule for " + r.lhs +
                            " has an empty right-hand side (epsilon rules are "
                            "not supported)");
    }
    if (!(r.probability > 0.0) || r.probability > 1.0 ||
        !std::isfinite(r.probability)) {
      throw ValidationError("rule " + r.lhs + " -> " + JoinSymbols(r.rhs) +
                            " has probability " + FormatDouble(r.probability) +
                            "; must be in (0, 1]");
    }
    if (!g.nonterminal_ids_.count(r.lhs)) {
      g.nonterminal_ids_.emplace(r.lhs, static_cast<int>(g.nonterminals_.size()));
      g.nonterminals_.push_back(r.lhs);
    }
  }

  if (!alphabet.empty()) {
    for (const std::string& t : alphabet) {
      if (g.nonterminal_ids_.count(t)) {
        throw ValidationError("symbol " + t +
                              " is both a nonterminal and an alphabet token");
      }
      if (g.terminal_ids_.count(t)) {
        throw ValidationError("duplicate alphabet token " + t);
      }
      g.terminal_ids_.emplace(t, static_cast<int>(g.alphabet_.size()));
      g.alphabet_.push_back(t);
    }
  }
  const bool fixed_alphabet = !alphabet.empty();
  for (const Rule& r : rules) {
    for (const std::string& s : r.rhs) {
      if (g.nonterminal_ids_.count(s) || g.terminal_ids_.count(s)) continue;
      if (fixed_alphabet) {
        throw ValidationError("unknown symbol " + s + " in rule " + r.lhs +
                              " -> " + JoinSymbols(r.rhs) +
                              " (not a nonterminal or alphabet token)");
      }
      g.terminal_ids_.emplace(s, static_cast<int>(g.alphabet_.size()));
      g.alphabet_.push_back(s);
    }
  }

  if (start.empty()) start = rules.front().lhs;
  auto sit = g.nonterminal_ids_.find(start);
  if (sit == g.nonterminal_ids_.end()) {
    throw ValidationError("start symbol " + start + " has no rules");
  }
  g.start_id_ = sit->second;

  // Per-LHS probability sums.
  std::vector<double> sums(g.nonterminals_.size(), 0.0);
  for (const Rule& r : rules) sums[g.nonterminal_ids_[r.lhs]] += r.probability;
  for (std::size_t a = 0; a < sums.size(); ++a) {
    double dev = std::abs(sums[a] - 1.0);
    if (dev <= kSumTolerance) continue;
    if (dev > kRenormalizeTolerance) {
      throw ValidationError("probabilities for " + g.nonterminals_[a] +
                            " sum to " + FormatDouble(sums[a]) +
                            ", expected 1");
    }
    for (Rule& r : rules) {
      if (r.lhs == g.nonterminals_[a]) r.probability /= sums[a];
    }
    g.warnings_.push_back("renormalized probabilities for " +
                          g.nonterminals_[a] + " (declared sum " +
                          FormatDouble(sums[a]) + ")");
  }

  g.rules_ = std::move(rules);
  g.rules_by_lhs_.assign(g.nonterminals_.size(), {});
  for (const Rule& r : g.rules_) {
    CompiledRule c;
    c.lhs = g.nonterminal_ids_[r.lhs];
    for (const std::string& s : r.rhs) {
      auto nt = g.nonterminal_ids_.find(s);
      c.rhs.push_back(nt != g.nonterminal_ids_.end()
                          ? nt->second
                          : TerminalCode(g.terminal_ids_[s]));
    }
    c.probability = r.probability;
    c.logprob = std::log(r.probability);
    g.rules_by_lhs_[c.lhs].push_back(static_cast<int>(g.compiled_.size()));
    g.compiled_.push_back(std::move(c));
  }
  return g;
}

bool Grammar::IsNonterminal(std::string_view symbol) const {
  return nonterminal_ids_.count(std::string(symbol)) > 0;
}

std::optional<int> Grammar::NonterminalId(std::string_view symbol) const {
  auto it = nonterminal_ids_.find(std::string(symbol));
  if (it == nonterminal_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Grammar::TerminalId(std::string_view token) const {
  auto it = terminal_ids_.find(std::string(token));
  if (it == terminal_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<int>> Grammar::Encode(
    std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) {
    auto it = terminal_ids_.find(t);
    if (it == terminal_ids_.end()) return std::nullopt;
    ids.push_back(it->second);
  }
  return ids;
}

TokenSeq Grammar::Decode(std::span<const int> terminal_indices) const {
  TokenSeq out;
  out.reserve(terminal_indices.size());
  for (int t : terminal_indices) out.push_back(alphabet_.at(t));
  return out;
}

Grammar Grammar::WithMetadata(std::string metadata) const {
  Grammar g = *this;
  g.metadata_ = std::move(metadata);
  return g;
}

Grammar Grammar::WithWarnings(const std::vector<std::string>& warnings) const {
  Grammar g = *this;
  g.warnings_.insert(g.warnings_.end(), warnings.begin(), warnings.end());
  return g;
}

bool Grammar::operator==(const Grammar& other) const {
  return rules_ == other.rules_ && alphabet_ == other.alphabet_ &&
         start() == other.start();
}

Grammar ParseGrammar(std::string_view text) {
  std::vector<Rule> rules;
  std::string start;
  std::string name;
  std::vector<std::string> alphabet;
  bool any_content = false;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::vector<std::string> words = SplitWhitespace(line);
    if (words.empty() || words[0][0] == '#') continue;
    any_content = true;

    if (words[0][0] == '%') {
      const std::string& directive = words[0];
      if (directive == "%start") {
        if (words.size() != 2) throw ParseError(line_no, "%start takes one symbol");
        start = words[1];
      } else if (directive == "%name") {
        std::string_view rest = line.substr(line.find("%name") + 5);
        while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
        while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
        name = std::string(rest);
      } else if (directive == "%alphabet") {
        if (words.size() < 2) throw ParseError(line_no, "%alphabet needs at least one token");
        alphabet.assign(words.begin() + 1, words.end());
      } else {
        throw ParseError(line_no, "unknown directive " + directive);
      }
      continue;
    }

    if (words.size() < 2 || words[1] != "->") {
      throw ParseError(line_no, "expected 'LHS -> symbols [probability]'");
    }
    const std::string& last = words.back();
    if (last.size() < 3 || last.front() != '[' || last.back() != ']') {
      throw ParseError(line_no, "missing bracketed probability at end of rule");
    }
    if (words.size() < 4) throw ParseError(line_no, "rule has an empty right-hand side");
    std::string num = last.substr(1, last.size() - 2);
    double prob = 0.0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), prob);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
      throw ParseError(line_no, "invalid probability '" + num + "'");
    }
    Rule r;
    r.lhs = words[0];
    r.rhs.assign(words.begin() + 2, words.end() - 1);
    for (const std::string& s : r.rhs) {
      if (s == "->") throw ParseError(line_no, "unexpected '->' in right-hand side");
    }
    r.probability = prob;
    rules.push_back(std::move(r));
  }
  if (!any_content) throw ParseError(1, "empty grammar text");
  if (rules.empty()) throw ParseError(line_no, "grammar has no rules");
  return Grammar::FromRules(std::move(rules), start, alphabet, name);
}

std::string GrammarToText(const Grammar& g) {
  std::ostringstream out;
  if (!g.metadata().empty()) out << "%name " << g.metadata() << "\n";
  out << "%start " << g.start() << "\n";
  out << "%alphabet";
  for (const std::string& t : g.alphabet()) out << ' ' << t;
  out << "\n";
  for (const Rule& r : g.rules()) {
    out << r.lhs << " ->";
    for (const std::string& s : r.rhs) out << ' ' << s;
    out << " [" << FormatDouble(r.probability) << "]\n";
  }
  return out.str();
}

namespace {

// Post-order over nonterminals; returns false if a cycle is found.
bool TopologicalOrder(const Grammar& g, std::vector<int>* order) {
  const int n = g.num_nonterminals();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::function<bool(int)> visit = [&](int a) {
    state[a] = 1;
    for (int ri : g.RulesFor(a)) {
      for (SymbolCode s : g.compiled_rules()[ri].rhs) {
        if (IsTerminalCode(s)) continue;
        if (state[s] == 1) return false;
        if (state[s] == 0 && !visit(s)) return false;
      }
    }
    state[a] = 2;
    if (order) order->push_back(a);
    return true;
  };
  for (int a = 0; a < n; ++a) {
    if (state[a] == 0 && !visit(a)) return false;
  }
  return true;
}

void RequireAcyclic(const Grammar& g, const char* what) {
  if (IsRecursive(g)) {
    throw UnsupportedOperation(std::string(what) +
                               " requires an acyclic grammar; use Monte Carlo "
                               "estimation from samples for recursive grammars");
  }
}

}  // namespace

bool IsRecursive(const Grammar& g) { return !TopologicalOrder(g, nullptr); }

LengthBounds ComputeLengthBounds(const Grammar& g) {
  std::vector<int> order;
  if (!TopologicalOrder(g, &order)) {
    throw UnsupportedOperation("length bounds are unbounded for recursive grammars");
  }
  std::vector<LengthBounds> nt(g.num_nonterminals());
  for (int a : order) {
    bool first = true;
    for (int ri : g.RulesFor(a)) {
      LengthBounds lb;
      for (SymbolCode s : g.compiled_rules()[ri].rhs) {
        if (IsTerminalCode(s)) {
          ++lb.min;
          ++lb.max;
        } else {
          lb.min += nt[s].min;
          lb.max += nt[s].max;
        }
      }
      if (first) {
        nt[a] = lb;
        first = false;
      } else {
        nt[a].min = std::min(nt[a].min, lb.min);
        nt[a].max = std::max(nt[a].max, lb.max);
      }
    }
  }
  return nt[g.start_id()];
}

std::vector<SupportEntry> EnumerateSupport(const Grammar& g,
                                           std::size_t max_strings) {
  RequireAcyclic(g, "exact support enumeration");
  using Support = std::map<std::vector<int>, double>;
  std::vector<int> order;
  TopologicalOrder(g, &order);

  // Only nonterminals reachable from the start symbol are expanded.
  std::vector<bool> reachable(g.num_nonterminals(), false);
  std::vector<int> stack = {g.start_id()};
  reachable[g.start_id()] = true;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    for (int ri : g.RulesFor(a)) {
      for (SymbolCode s : g.compiled_rules()[ri].rhs) {
        if (!IsTerminalCode(s) && !reachable[s]) {
          reachable[s] = true;
          stack.push_back(s);
        }
      }
    }
  }

  auto too_large = [&](const std::string& nt) {
    return UnsupportedOperation(
        "support of " + nt + " exceeds " + std::to_string(max_strings) +
        " strings; use FiniteLanguage for exact aggregate quantities");
  };

  std::vector<Support> supports(g.num_nonterminals());
  for (int a : order) {
    if (!reachable[a]) continue;
    Support& out = supports[a];
    for (int ri : g.RulesFor(a)) {
      const CompiledRule& rule = g.compiled_rules()[ri];
      std::vector<std::pair<std::vector<int>, double>> partial = {{{}, rule.probability}};
      for (SymbolCode s : rule.rhs) {
        if (IsTerminalCode(s)) {
          for (auto& p : partial) p.first.push_back(TerminalIndex(s));
          continue;
        }
        const Support& child = supports[s];
        if (partial.size() * child.size() > max_strings) {
          throw too_large(g.nonterminals()[a]);
        }
        std::vector<std::pair<std::vector<int>, double>> next;
        next.reserve(partial.size() * child.size());
        for (const auto& p : partial) {
          for (const auto& [seq, prob] : child) {
            std::vector<int> joined = p.first;
            joined.insert(joined.end(), seq.begin(), seq.end());
            next.emplace_back(std::move(joined), p.second * prob);
          }
        }
        partial = std::move(next);
      }
      for (auto& [seq, prob] : partial) out[std::move(seq)] += prob;
      if (out.size() > max_strings) throw too_large(g.nonterminals()[a]);
    }
  }

  std::vector<std::pair<std::vector<int>, double>> flat(
      supports[g.start_id()].begin(), supports[g.start_id()].end());
  std::stable_sort(flat.begin(), flat.end(), [](const auto& x, const auto& y) {
    if (x.first.size() != y.first.size()) return x.first.size() < y.first.size();
    return x.first < y.first;
  });
  std::vector<SupportEntry> result;
  result.reserve(flat.size());
  for (auto& [seq, prob] : flat) {
    result.push_back({g.Decode(seq), prob});
  }
  return result;
}

}  // namespace langprof
