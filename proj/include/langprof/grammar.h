#ifndef LANGPROF_GRAMMAR_H_
#define LANGPROF_GRAMMAR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace langprof {

using TokenSeq = std::vector<std::string>;

struct Rule {
  std::string lhs;
  std::vector<std::string> rhs;
  double probability = 1.0;

  bool operator==(const Rule&) const = default;
};

// Integer symbol code used by the algorithms: nonterminal ids are >= 0,
// terminal index t is encoded as -(t + 1).
using SymbolCode = int;

inline bool IsTerminalCode(SymbolCode s) { return s < 0; }
inline int TerminalIndex(SymbolCode s) { return -s - 1; }
inline SymbolCode TerminalCode(int index) { return -(index + 1); }

struct CompiledRule {
  int lhs;
  std::vector<SymbolCode> rhs;
  double probability;
  double logprob;
};

// A validated probabilistic context-free grammar (N, T, R, S, P).
//
// A symbol is a nonterminal iff it is the left-hand side of some rule; every
// other right-hand-side symbol is a terminal. Rules are epsilon-free.
// Duplicate rules are kept as distinct rules. Immutable after construction.
class Grammar {
 public:
  // Validates and builds. If `alphabet` is non-empty it fixes the terminal
  // order and must contain every terminal used by the rules. If `start` is
  // empty the first rule's LHS is the start symbol. Per-LHS probability sums
  // within 1e-3 of 1 are renormalized (with a warning); larger deviations are
  // rejected. Throws ValidationError.
  static Grammar FromRules(std::vector<Rule> rules, std::string start = "",
                           std::vector<std::string> alphabet = {},
                           std::string metadata = "");

  const std::vector<std::string>& nonterminals() const { return nonterminals_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::string& start() const { return nonterminals_[start_id_]; }
  const std::string& metadata() const { return metadata_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool IsNonterminal(std::string_view symbol) const;
  std::optional<int> NonterminalId(std::string_view symbol) const;
  std::optional<int> TerminalId(std::string_view token) const;

  int start_id() const { return start_id_; }
  int num_nonterminals() const { return static_cast<int>(nonterminals_.size()); }
  int num_terminals() const { return static_cast<int>(alphabet_.size()); }
  const std::vector<CompiledRule>& compiled_rules() const { return compiled_; }
  // Indices into compiled_rules() of the rules for nonterminal `id`.
  const std::vector<int>& RulesFor(int nonterminal_id) const {
    return rules_by_lhs_[nonterminal_id];
  }

  // Maps tokens to terminal indices; nullopt if any token is unknown.
  std::optional<std::vector<int>> Encode(std::span<const std::string> tokens) const;
  TokenSeq Decode(std::span<const int> terminal_indices) const;

  Grammar WithMetadata(std::string metadata) const;
  // Copy with `warnings` appended, for grammars rebuilt from another.
  Grammar WithWarnings(const std::vector<std::string>& warnings) const;

  bool operator==(const Grammar& other) const;

 private:
  Grammar() = default;

  std::vector<std::string> nonterminals_;
  std::vector<std::string> alphabet_;
  std::vector<Rule> rules_;
  int start_id_ = 0;
  std::string metadata_;
  std::vector<std::string> warnings_;

  std::unordered_map<std::string, int> nonterminal_ids_;
  std::unordered_map<std::string, int> terminal_ids_;
  std::vector<CompiledRule> compiled_;
  std::vector<std::vector<int>> rules_by_lhs_;
};

// Parses the line-oriented grammar format:
//
//   # comment
//   %start S            (optional; default is the first rule's LHS)
//   %name  my-grammar   (optional; stored as metadata)
//   %alphabet 1 2 3     (optional; fixes terminal order)
//   S -> A B [0.5]
//
// Throws ParseError (with line number) or ValidationError.
Grammar ParseGrammar(std::string_view text);

// Re-parsable text form. Probabilities are printed with round-trip precision.
std::string GrammarToText(const Grammar& g);

// True iff some nonterminal can derive a sentential form containing itself.
bool IsRecursive(const Grammar& g);

struct LengthBounds {
  std::size_t min = 0;
  std::size_t max = 0;
  bool operator==(const LengthBounds&) const = default;
};

// Exact min/max terminal-string lengths. Throws UnsupportedOperation for
// recursive grammars.
LengthBounds ComputeLengthBounds(const Grammar& g);

struct SupportEntry {
  TokenSeq tokens;
  double probability = 0.0;
};

// Every derivable string with its total probability (summed over
// derivations), sorted by length, then lexicographically by alphabet index.
// Throws UnsupportedOperation for recursive grammars, or when the support
// exceeds `max_strings` (use FiniteLanguage for aggregate quantities of
// larger languages).
std::vector<SupportEntry> EnumerateSupport(const Grammar& g,
                                           std::size_t max_strings = 1 << 20);

}  // namespace langprof

#endif  // LANGPROF_GRAMMAR_H_
