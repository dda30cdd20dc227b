#include "langprof/evaluation/loss_record.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "langprof/errors.h"

namespace langprof {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json NumberOrInfinity(double x) {
  if (std::isinf(x) && x > 0) return "Infinity";
  return x;
}

double ReadLoss(const json& j, std::string_view field, std::string_view where) {
  if (j.is_string() && j.get<std::string>() == "Infinity") return INFINITY;
  if (!j.is_number()) {
    throw SchemaError(std::string(where) + ": " + std::string(field) +
                      " must be a number or \"Infinity\"");
  }
  double x = j.get<double>();
  if (std::isnan(x) || x < 0.0) {
    throw SchemaError(std::string(where) + ": " + std::string(field) +
                      " must be non-negative");
  }
  return x;
}

const json& Require(const json& j, const char* field, std::string_view where) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw SchemaError(std::string(where) + ": missing field '" + field + "'");
  }
  return *it;
}

}  // namespace

Condition WithoutBucket(Condition c) {
  c.bucket.clear();
  return c;
}

ordered_json ConditionToJson(const Condition& c) {
  ordered_json j;
  j["language"] = c.language;
  j["test_language"] = c.test_language;
  j["mode"] = c.mode;
  j["n_train"] = c.n_train;
  j["m"] = c.m;
  j["replicate"] = c.replicate;
  j["bucket"] = c.bucket;
  return j;
}

Condition ConditionFromJson(const json& j) {
  if (!j.is_object()) throw SchemaError("condition must be an object");
  static const std::set<std::string> kFields = {"language", "test_language", "mode",
                                                "n_train", "m", "replicate", "bucket"};
  for (const auto& [key, _] : j.items()) {
    if (!kFields.count(key)) throw SchemaError("condition: unknown field '" + key + "'");
  }
  Condition c;
  try {
    c.language = j.at("language").get<std::string>();
    c.test_language = j.value("test_language", c.language);
    c.mode = j.at("mode").get<std::string>();
    c.n_train = j.at("n_train").get<std::size_t>();
    c.m = j.at("m").get<int>();
    c.replicate = j.at("replicate").get<int>();
    c.bucket = j.at("bucket").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("condition: ") + e.what());
  }
  if (c.mode != "FT" && c.mode != "ICL") {
    throw SchemaError("condition: mode must be FT or ICL, got '" + c.mode + "'");
  }
  return c;
}

std::string ConditionLabel(const Condition& c) {
  std::ostringstream out;
  out << c.language;
  if (c.test_language != c.language) out << "->" << c.test_language;
  out << "/" << c.mode << "/n" << c.n_train << "/m" << c.m << "/r" << c.replicate;
  if (!c.bucket.empty()) out << "/" << c.bucket;
  return out.str();
}

ordered_json LossRecordToJson(const LossRecord& r) {
  ordered_json j;
  j["string_id"] = r.string_id;
  j["condition"] = ConditionToJson(r.condition);
  j["total_neglogprob"] = NumberOrInfinity(r.total_neglogprob);
  j["token_count"] = r.token_count;
  if (r.per_token) {
    ordered_json arr = ordered_json::array();
    for (double x : *r.per_token) arr.push_back(NumberOrInfinity(x));
    j["per_token"] = std::move(arr);
  } else {
    j["per_token"] = nullptr;
  }
  j["is_positive"] = r.is_positive;
  return j;
}

std::string LossRecordToJsonLine(const LossRecord& r) { return LossRecordToJson(r).dump(); }

LossRecord LossRecordFromJson(const json& j, std::string_view where) {
  if (!j.is_object()) throw SchemaError(std::string(where) + ": record must be an object");
  static const std::set<std::string> kFields = {"string_id",   "condition",
                                                "total_neglogprob", "token_count",
                                                "per_token",   "is_positive"};
  for (const auto& [key, _] : j.items()) {
    if (!kFields.count(key)) {
      throw SchemaError(std::string(where) + ": unknown field '" + key + "'");
    }
  }
  LossRecord r;
  const json& id = Require(j, "string_id", where);
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw SchemaError(std::string(where) + ": string_id must be a nonempty string");
  }
  r.string_id = id.get<std::string>();
  try {
    r.condition = ConditionFromJson(Require(j, "condition", where));
  } catch (const SchemaError& e) {
    throw SchemaError(std::string(where) + ": " + e.what());
  }
  r.total_neglogprob = ReadLoss(Require(j, "total_neglogprob", where), "total_neglogprob", where);
  const json& count = Require(j, "token_count", where);
  if (!count.is_number_integer() || count.get<long long>() < 1) {
    throw SchemaError(std::string(where) + ": token_count must be an integer >= 1");
  }
  r.token_count = count.get<std::size_t>();
  auto pt = j.find("per_token");
  if (pt != j.end() && !pt->is_null()) {
    if (!pt->is_array()) throw SchemaError(std::string(where) + ": per_token must be an array");
    std::vector<double> values;
    double sum = 0.0;
    for (const json& x : *pt) {
      values.push_back(ReadLoss(x, "per_token entry", where));
      sum += values.back();
    }
    if (values.size() != r.token_count) {
      throw SchemaError(std::string(where) + ": per_token has " +
                        std::to_string(values.size()) + " entries, token_count is " +
                        std::to_string(r.token_count));
    }
    const bool both_inf = std::isinf(sum) && std::isinf(r.total_neglogprob);
    if (!both_inf && !(std::abs(sum - r.total_neglogprob) <= kPerTokenSumTolerance)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << where << ": per_token sums to " << sum << " but total_neglogprob is "
          << r.total_neglogprob;
      throw SchemaError(msg.str());
    }
    r.per_token = std::move(values);
  }
  const json& pos = Require(j, "is_positive", where);
  if (!pos.is_boolean()) throw SchemaError(std::string(where) + ": is_positive must be boolean");
  r.is_positive = pos.get<bool>();
  return r;
}

std::string LossRecordsToJsonl(std::span<const LossRecord> records) {
  std::string out;
  for (const LossRecord& r : records) {
    out += LossRecordToJsonLine(r);
    out += '\n';
  }
  return out;
}

void WriteLossRecords(const std::filesystem::path& path, std::span<const LossRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << LossRecordsToJsonl(records);
}

std::vector<LossRecord> ParseLossRecords(std::string_view jsonl, std::string_view source) {
  std::vector<LossRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == jsonl.size()) break;
      continue;
    }
    const std::string where = std::string(source) + " line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where + ": invalid JSON: " + e.what());
    }
    records.push_back(LossRecordFromJson(j, where));
    if (end == jsonl.size()) break;
  }
  return records;
}

std::vector<LossRecord> ReadLossRecords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseLossRecords(buf.str(), path.filename().string());
}

}  // namespace langprof
