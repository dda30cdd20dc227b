#include "langprof/harness/config.h"

#include <algorithm>
#include <set>

#include "langprof/builtin.h"
#include "langprof/errors.h"
#include "langprof/harness/dataset_io.h"

namespace langprof {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
T Get(const json& j, const char* key, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: '" + where + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  std::vector<int> epochs(50);
  for (int i = 0; i < 50; ++i) epochs[i] = i + 1;
  m["FT"] = std::move(epochs);
  m["ICL"] = {1, 2, 4, 8, 16};
}

const std::vector<int>& ExperimentConfig::MValues(const std::string& mode) const {
  auto it = m.find(mode);
  if (it == m.end()) throw ValidationError("config: no m values for mode " + mode);
  return it->second;
}

std::size_t ExperimentConfig::PoolSize() const {
  if (pool_size) return pool_size;
  std::size_t max_train = 0;
  for (std::size_t n : n_train) max_train = std::max(max_train, n);
  return std::max<std::size_t>(8 * (max_train + n_test), 10000);
}

ExperimentConfig ConfigFromJson(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  static const std::set<std::string> kKeys = {
      "language",          "grammar_path",     "alphabet",          "n_train",
      "n_test",            "replicates",       "modes",             "m",
      "edit_distances",    "random_negatives", "n_negatives",       "separator",
      "seed",              "pool_size",        "attempt_cap",       "test_perturbations",
      "perturbation_chain", "icl_train_losses", "icl_limit_epsilon", "scorer"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw ValidationError("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  auto resolve = [&](std::string p) {
    if (p.empty() || base.empty()) return p;
    std::filesystem::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
  };
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "language") c.language = Get<std::string>(v, k, "");
    else if (key == "grammar_path") c.grammar_path = resolve(Get<std::string>(v, k, ""));
    else if (key == "alphabet") c.alphabet = Get<std::vector<std::string>>(v, k, "");
    else if (key == "n_train") c.n_train = Get<std::vector<std::size_t>>(v, k, "");
    else if (key == "n_test") c.n_test = Get<std::size_t>(v, k, "");
    else if (key == "replicates") c.replicates = Get<int>(v, k, "");
    else if (key == "modes") c.modes = Get<std::vector<std::string>>(v, k, "");
    else if (key == "m") {
      if (!v.is_object()) throw ValidationError("config: 'm' must map modes to lists");
      for (const auto& [mode, values] : v.items()) {
        if (mode != "FT" && mode != "ICL") {
          throw ValidationError("config: 'm' has unknown mode '" + mode + "'");
        }
        c.m[mode] = Get<std::vector<int>>(values, mode.c_str(), "m.");
      }
    } else if (key == "edit_distances") c.edit_distances = Get<std::vector<int>>(v, k, "");
    else if (key == "random_negatives") c.random_negatives = Get<bool>(v, k, "");
    else if (key == "n_negatives") c.n_negatives = Get<std::size_t>(v, k, "");
    else if (key == "separator") c.separator = Get<std::string>(v, k, "");
    else if (key == "seed") c.seed = Get<std::uint64_t>(v, k, "");
    else if (key == "pool_size") c.pool_size = Get<std::size_t>(v, k, "");
    else if (key == "attempt_cap") c.attempt_cap = Get<std::size_t>(v, k, "");
    else if (key == "test_perturbations") c.test_perturbations = Get<std::vector<int>>(v, k, "");
    else if (key == "perturbation_chain") c.perturbation_chain = resolve(Get<std::string>(v, k, ""));
    else if (key == "icl_train_losses") c.icl_train_losses = Get<bool>(v, k, "");
    else if (key == "icl_limit_epsilon") c.icl_limit_epsilon = Get<double>(v, k, "");
    else if (key == "scorer") {
      if (!v.is_object()) throw ValidationError("config: 'scorer' must be an object");
      for (const auto& [sk, sv] : v.items()) {
        const char* s = sk.c_str();
        if (sk == "kind") c.scorer.kind = Get<std::string>(sv, s, "scorer.");
        else if (sk == "order") c.scorer.order = Get<int>(sv, s, "scorer.");
        else if (sk == "smoothing") c.scorer.smoothing = Get<double>(sv, s, "scorer.");
        else if (sk == "include_end") c.scorer.include_end = Get<bool>(sv, s, "scorer.");
        else if (sk == "seed") c.scorer.seed = Get<std::uint64_t>(sv, s, "scorer.");
        else throw ValidationError("config: unknown key 'scorer." + sk + "'");
      }
    }
  }
  ValidateConfig(c);
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, path.parent_path());
}

ordered_json ConfigToJson(const ExperimentConfig& c) {
  ordered_json j;
  j["language"] = c.language;
  j["grammar_path"] = c.grammar_path;
  j["alphabet"] = c.alphabet;
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["replicates"] = c.replicates;
  j["modes"] = c.modes;
  ordered_json m;
  for (const auto& [mode, values] : c.m) m[mode] = values;
  j["m"] = m;
  j["edit_distances"] = c.edit_distances;
  j["random_negatives"] = c.random_negatives;
  j["n_negatives"] = c.n_negatives;
  j["separator"] = c.separator;
  j["seed"] = c.seed;
  j["pool_size"] = c.pool_size;
  j["attempt_cap"] = c.attempt_cap;
  j["test_perturbations"] = c.test_perturbations;
  j["perturbation_chain"] = c.perturbation_chain;
  j["icl_train_losses"] = c.icl_train_losses;
  j["icl_limit_epsilon"] = c.icl_limit_epsilon;
  ordered_json s;
  s["kind"] = c.scorer.kind;
  s["order"] = c.scorer.order;
  s["smoothing"] = c.scorer.smoothing;
  s["include_end"] = c.scorer.include_end;
  s["seed"] = c.scorer.seed;
  j["scorer"] = s;
  return j;
}

void ValidateConfig(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ValidationError("config: " + msg); };
  if (c.language.empty()) fail("language must be nonempty");
  if (c.n_train.empty()) fail("n_train grid is empty");
  for (std::size_t n : c.n_train) {
    if (n < 1) fail("n_train values must be at least 1");
  }
  if (c.n_test < 1) fail("n_test must be at least 1");
  if (c.replicates < 1) fail("replicates must be at least 1");
  if (c.modes.empty()) fail("modes is empty");
  std::set<std::string> seen_modes;
  for (const std::string& mode : c.modes) {
    if (mode != "FT" && mode != "ICL") fail("unknown mode '" + mode + "'");
    if (!seen_modes.insert(mode).second) fail("mode '" + mode + "' listed twice");
    auto it = c.m.find(mode);
    if (it == c.m.end() || it->second.empty()) fail("m grid for " + mode + " is empty");
    std::set<int> seen;
    for (int v : it->second) {
      if (v < 1) fail("m values must be at least 1");
      if (!seen.insert(v).second) fail("m value " + std::to_string(v) + " repeated");
    }
  }
  for (int k : c.edit_distances) {
    if (k < 1) fail("edit distances must be at least 1");
  }
  if (c.edit_distances.empty() && !c.random_negatives) fail("no negative buckets configured");
  if (c.separator.empty() || c.separator.find_first_of(" \t\r\n") != std::string::npos) {
    fail("separator must be a single whitespace-free token");
  }
  if (c.attempt_cap < 1) fail("attempt_cap must be at least 1");
  for (int l : c.test_perturbations) {
    if (l < 1) fail("test_perturbations levels must be at least 1");
  }
  if (!(c.icl_limit_epsilon >= 0.0)) fail("icl_limit_epsilon must be non-negative");
  static const std::set<std::string> kKinds = {"oracle", "ngram", "random", "external"};
  if (!kKinds.count(c.scorer.kind)) fail("unknown scorer kind '" + c.scorer.kind + "'");
  if (c.scorer.order < 1) fail("scorer.order must be at least 1");
  if (!(c.scorer.smoothing > 0.0)) fail("scorer.smoothing must be positive");
}

Grammar ResolveGrammar(const ExperimentConfig& c) {
  if (!c.grammar_path.empty()) {
    Grammar g = ParseGrammar(ReadFile(c.grammar_path));
    if (!c.alphabet.empty()) {
      if (c.alphabet.size() != g.alphabet().size()) {
        throw ValidationError("config: alphabet has " + std::to_string(c.alphabet.size()) +
                              " tokens, grammar has " + std::to_string(g.alphabet().size()));
      }
      g = SubstituteAlphabet(g, g.alphabet(), c.alphabet);
    }
    return g.WithMetadata(c.language);
  }
  std::optional<LanguageId> id = ParseLanguageId(c.language);
  if (!id) {
    throw ValidationError("config: '" + c.language +
                          "' is not a builtin language; set grammar_path");
  }
  return Builtin(*id, c.alphabet);
}

std::vector<Perturbation> ResolvePerturbationChain(const ExperimentConfig& c, const Grammar& g) {
  if (!c.perturbation_chain.empty()) return LoadPerturbationChain(ReadFile(c.perturbation_chain));
  if (g.alphabet().size() != 9) {
    throw ValidationError("config: the default perturbation chain needs a 9-token alphabet");
  }
  return DefaultPerturbationChain(g.alphabet());
}

std::string PerturbedLanguageName(const std::string& language, int level) {
  return language + "^(" + std::to_string(level) + ")";
}

}  // namespace langprof
