#include "langprof/perturbation.h"

#include <unordered_map>

#include "json.hpp"
#include "langprof/errors.h"

namespace langprof {
namespace {

std::string Join(const std::vector<std::string>& symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += ' ';
    out += symbols[i];
  }
  return out;
}

}  // namespace

Grammar Perturb(const Grammar& g, const std::vector<Perturbation>& chain,
                int level) {
  if (level < 0 || level > static_cast<int>(chain.size())) {
    throw ValidationError("perturbation level " + std::to_string(level) +
                          " outside [0, " + std::to_string(chain.size()) + "]");
  }
  if (level == 0) return g;
  std::vector<Rule> rules = g.rules();
  for (int l = 0; l < level; ++l) {
    const Perturbation& p = chain[l];
    bool applied = false;
    for (Rule& r : rules) {
      if (r.lhs == p.target_lhs && r.rhs == p.original_rhs) {
        r.rhs = p.replacement_rhs;
        applied = true;
        break;
      }
    }
    if (!applied) {
      throw ValidationError("perturbation l=" + std::to_string(l + 1) +
                            ": no rule " + p.target_lhs + " -> " +
                            Join(p.original_rhs) +
                            " (it may have been rewritten by an earlier step)");
    }
  }
  std::string name = g.metadata().empty() ? "G" : g.metadata();
  return Grammar::FromRules(std::move(rules), g.start(), g.alphabet(),
                            name + "^(" + std::to_string(level) + ")");
}

std::vector<Perturbation> DefaultPerturbationChain(
    const std::vector<std::string>& alphabet) {
  if (alphabet.size() != 9) {
    throw ValidationError("default perturbation chain needs a 9-token alphabet");
  }
  auto map = [&](std::initializer_list<int> digits) {
    std::vector<std::string> out;
    for (int d : digits) out.push_back(alphabet[d - 1]);
    return out;
  };
  return {
      {"A10", map({1, 2, 3}), map({1, 3, 2}), 1},
      {"A11", map({6, 5}), map({5, 6}), 2},
      {"A12", map({9, 8, 7}), map({8, 7, 9}), 3},
      {"A10", map({1, 3, 2}), map({3, 1}), 4},
      {"A12", map({8, 7, 9}), map({8, 7}), 5},
  };
}

std::vector<Perturbation> LoadPerturbationChain(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("perturbation chain: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("perturbation chain must be a JSON list");
  std::vector<Perturbation> chain;
  int index = 1;
  for (const auto& entry : doc) {
    try {
      Perturbation p;
      p.target_lhs = entry.at("lhs").get<std::string>();
      p.original_rhs = entry.at("original").get<std::vector<std::string>>();
      p.replacement_rhs = entry.at("replacement").get<std::vector<std::string>>();
      p.index = index++;
      if (p.original_rhs.empty() || p.replacement_rhs.empty()) {
        throw ValidationError("perturbation " + std::to_string(p.index) +
                              " has an empty right-hand side");
      }
      chain.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("perturbation " + std::to_string(index) + ": " + e.what());
    }
  }
  return chain;
}

std::string PerturbationChainToJson(const std::vector<Perturbation>& chain) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const Perturbation& p : chain) {
    doc.push_back({{"lhs", p.target_lhs},
                   {"original", p.original_rhs},
                   {"replacement", p.replacement_rhs}});
  }
  return doc.dump(2);
}

}  // namespace langprof
