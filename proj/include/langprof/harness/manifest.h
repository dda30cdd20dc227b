#ifndef LANGPROF_HARNESS_MANIFEST_H_
#define LANGPROF_HARNESS_MANIFEST_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "langprof/evaluation/loss_record.h"
#include "langprof/grammar.h"

namespace langprof {

struct ManifestString {
  std::string id;
  TokenSeq tokens;           // held in the data file, not in the manifest JSON
  double logprob = 0.0;      // positives: sampled derivation log-probability
  std::string seed_path;     // positives
  std::string source_id;     // edit negatives
  std::vector<std::string> edits;  // edit negatives, in application order
};

// One data file and the bucket its strings are scored under.
struct ManifestSet {
  std::string bucket;         // "train", "test", "edit<k>", "random"
  std::string test_language;
  std::string kind;           // "positive", "edit", "random"
  int edit_distance = 0;      // edit kind
  bool is_positive = true;
  bool scored = true;         // whether loss records are expected for it
  std::string file;           // relative to the run directory
  std::string sha256;
  std::vector<ManifestString> strings;
};

struct ManifestGrammar {
  std::string language;
  std::string file;
  std::string sha256;
};

// Everything an external scorer needs for one (language, mode, n_train,
// replicate) run, plus the exact loss records it must return.
struct DatasetManifest {
  nlohmann::ordered_json config;
  std::string language;
  std::string mode;
  std::size_t n_train = 0;
  int replicate = 0;
  std::vector<int> m_values;
  std::string separator;
  std::vector<ManifestGrammar> grammars;
  std::vector<ManifestSet> sets;
  // ICL only: token count of the prompt prefix (training block repeated m
  // times with separators) for each m.
  std::map<int, std::size_t> prefix_token_counts;

  const ManifestSet& Set(const std::string& test_language, const std::string& bucket) const;
  // Every condition records are expected under, in canonical order.
  std::vector<Condition> ExpectedConditions() const;
};

inline constexpr const char* kManifestFormat = "langprof-manifest/1";
inline constexpr const char* kManifestFile = "manifest.json";

nlohmann::ordered_json ManifestToJson(const DatasetManifest& m);
// Strings are read back without tokens; see LoadManifest.
DatasetManifest ManifestFromJson(const nlohmann::json& j);

// Parses the manifest in `run_dir`, verifies every referenced file against
// its checksum (ValidationError on mismatch or missing file) and fills in
// the tokens from the data files.
DatasetManifest LoadManifest(const std::filesystem::path& run_dir);

}  // namespace langprof

#endif  // LANGPROF_HARNESS_MANIFEST_H_
