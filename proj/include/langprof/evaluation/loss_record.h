#ifndef LANGPROF_EVALUATION_LOSS_RECORD_H_
#define LANGPROF_EVALUATION_LOSS_RECORD_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace langprof {

// Experimental condition a loss was computed under.
struct Condition {
  std::string language;       // language the scorer learned from, e.g. "L1"
  std::string test_language;  // language of the scored strings, e.g. "L1^(2)"
  std::string mode;           // "FT" or "ICL"
  std::size_t n_train = 0;
  int m = 1;                  // FT epochs or ICL block repetitions
  int replicate = 0;
  std::string bucket;         // "test", "train", "edit<k>" or "random"

  auto operator<=>(const Condition&) const = default;
};

// The condition with the bucket cleared: all buckets scored under the same
// model state share it.
Condition WithoutBucket(Condition c);

nlohmann::ordered_json ConditionToJson(const Condition& c);
Condition ConditionFromJson(const nlohmann::json& j);
std::string ConditionLabel(const Condition& c);

struct LossRecord {
  std::string string_id;
  Condition condition;
  double total_neglogprob = 0.0;  // may be +infinity
  std::size_t token_count = 0;
  std::optional<std::vector<double>> per_token;
  bool is_positive = false;
};

// +infinity is written as the string "Infinity" (JSON has no literal for it).
nlohmann::ordered_json LossRecordToJson(const LossRecord& r);
std::string LossRecordToJsonLine(const LossRecord& r);

// Checks field names, types and the record invariants. Throws SchemaError
// naming `where` (for example "losses.jsonl line 7").
LossRecord LossRecordFromJson(const nlohmann::json& j, std::string_view where);

// Tolerance for sum(per_token) against total_neglogprob.
inline constexpr double kPerTokenSumTolerance = 1e-6;

void WriteLossRecords(const std::filesystem::path& path, std::span<const LossRecord> records);
std::string LossRecordsToJsonl(std::span<const LossRecord> records);
// Blank lines are skipped; malformed lines throw SchemaError with the line
// number.
std::vector<LossRecord> ParseLossRecords(std::string_view jsonl, std::string_view source);
std::vector<LossRecord> ReadLossRecords(const std::filesystem::path& path);

}  // namespace langprof

#endif  // LANGPROF_EVALUATION_LOSS_RECORD_H_
