#ifndef LANGPROF_HARNESS_CONFIG_H_
#define LANGPROF_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "langprof/grammar.h"
#include "langprof/perturbation.h"

namespace langprof {

struct ScorerConfig {
  std::string kind = "oracle";  // oracle | ngram | random | external
  int order = 3;
  double smoothing = 0.1;
  bool include_end = false;
  std::uint64_t seed = 0;
};

// Experiment description, read from a JSON object. Every key is optional:
//
//   language            builtin id "L1".."L6", or a label when grammar_path is set
//   grammar_path        grammar file; relative paths resolve against the config file
//   alphabet            9 substitution tokens (required for L3/L6)
//   n_train             grid, default [1, 2, 4, ..., 1024]
//   n_test              default 1024
//   replicates          default 3
//   modes               subset of ["FT", "ICL"], default ["FT"]
//   m                   {"FT": [...], "ICL": [...]}, defaults 1..50 and [1, 2, 4, 8, 16]
//   edit_distances      default [1, 2, 4, 8]
//   random_negatives    default true
//   n_negatives         per bucket, default n_test
//   separator           default ";"
//   seed                default 0
//   pool_size           0 = max(8 * (max n_train + n_test), 10000)
//   attempt_cap         default 1000
//   test_perturbations  levels l of extra test languages G^(l), default []
//   perturbation_chain  path to a chain file, default built-in chain
//   icl_train_losses    score the training strings in ICL, default true
//   icl_limit_epsilon   default 0.05
//   scorer              {"kind", "order", "smoothing", "include_end", "seed"}
//
// Unknown keys are rejected.
struct ExperimentConfig {
  std::string language = "L1";
  std::string grammar_path;
  std::vector<std::string> alphabet;
  std::vector<std::size_t> n_train = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::size_t n_test = 1024;
  int replicates = 3;
  std::vector<std::string> modes = {"FT"};
  std::map<std::string, std::vector<int>> m;
  std::vector<int> edit_distances = {1, 2, 4, 8};
  bool random_negatives = true;
  std::size_t n_negatives = 0;  // 0 = n_test
  std::string separator = ";";
  std::uint64_t seed = 0;
  std::size_t pool_size = 0;
  std::size_t attempt_cap = 1000;
  std::vector<int> test_perturbations;
  std::string perturbation_chain;
  bool icl_train_losses = true;
  double icl_limit_epsilon = 0.05;
  ScorerConfig scorer;

  ExperimentConfig();

  const std::vector<int>& MValues(const std::string& mode) const;
  std::size_t NegativesPerBucket() const { return n_negatives ? n_negatives : n_test; }
  std::size_t PoolSize() const;
};

// Throws ValidationError with the offending key.
ExperimentConfig ConfigFromJson(const nlohmann::json& j, const std::filesystem::path& base = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& c);

// Grid/value checks that need no grammar.
void ValidateConfig(const ExperimentConfig& c);

// The language under study. Built-in ids use their printed grammars; a
// grammar_path is parsed (and its alphabet substituted when given).
Grammar ResolveGrammar(const ExperimentConfig& c);

// The perturbation chain over the grammar's alphabet.
std::vector<Perturbation> ResolvePerturbationChain(const ExperimentConfig& c, const Grammar& g);

// "L1^(2)" for level 2 of L1.
std::string PerturbedLanguageName(const std::string& language, int level);

}  // namespace langprof

#endif  // LANGPROF_HARNESS_CONFIG_H_
