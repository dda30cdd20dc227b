#ifndef LANGPROF_HARNESS_EXPERIMENT_H_
#define LANGPROF_HARNESS_EXPERIMENT_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "langprof/evaluation/loss_record.h"
#include "langprof/evaluation/scorers.h"
#include "langprof/harness/config.h"
#include "langprof/harness/manifest.h"
#include "langprof/harness/report.h"

namespace langprof {

struct RunEntry {
  std::string language;
  std::string mode;
  std::size_t n_train = 0;
  int replicate = 0;
  std::string dir;  // relative to the experiment root
};

struct ExperimentIndex {
  nlohmann::ordered_json config;
  std::vector<RunEntry> runs;
};

inline constexpr const char* kIndexFile = "experiment.json";
inline constexpr const char* kLossFile = "losses.jsonl";

// <language>/<mode>/n<NNNN>/r<k>
std::string RunDirectory(const std::string& language, const std::string& mode,
                         std::size_t n_train, int replicate);

// Generates pools, splits and verified negatives for every (mode, n_train,
// replicate) and writes one run directory each (manifest, grammar and data
// files) plus the experiment index. Deterministic in the config.
ExperimentIndex EmitManifests(const ExperimentConfig& config, const std::filesystem::path& root);
ExperimentIndex LoadIndex(const std::filesystem::path& root);

// The builtin scorer named by config.scorer ("external" throws).
std::unique_ptr<Scorer> MakeBuiltinScorer(const ExperimentConfig& config, const Grammar& g);

// One record per (expected condition, string), in manifest order.
std::vector<LossRecord> ScoreManifest(const DatasetManifest& manifest, const Scorer& scorer);

// Every run's records are scored and written to <run>/losses.jsonl.
void ScoreExperiment(const std::filesystem::path& root, const Scorer& scorer);

// Emit, score with the builtin scorer, write losses and reports. With an
// external scorer it stops after emission and returns an empty set.
ReportSet RunExperiment(const ExperimentConfig& config, const std::filesystem::path& root);

// Loads the index and manifests (checksums verified), re-verifies every
// string against its grammar, reads loss records (from `loss_files`, or
// each run's losses.jsonl when empty), checks schema and coverage, then
// builds and writes the same reports as RunExperiment. Throws
// CoverageError for missing, duplicate or unexpected records.
ReportSet IngestLosses(const std::filesystem::path& root,
                       const std::vector<std::filesystem::path>& loss_files = {});

// Exactly one record per expected (condition, string_id), with matching
// is_positive and token_count.
void ValidateCoverage(const std::vector<DatasetManifest>& manifests,
                      const std::vector<LossRecord>& records);

// Root report files plus a report.csv in each run directory.
void WriteExperimentReports(const ReportSet& reports, const ExperimentIndex& index,
                            const std::filesystem::path& root);

}  // namespace langprof

#endif  // LANGPROF_HARNESS_EXPERIMENT_H_
