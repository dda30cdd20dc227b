#include "langprof/harness/manifest.h"

#include "langprof/errors.h"
#include "langprof/harness/dataset_io.h"

namespace langprof {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

}  // namespace

const ManifestSet& DatasetManifest::Set(const std::string& test_language,
                                        const std::string& bucket) const {
  for (const ManifestSet& s : sets) {
    if (s.test_language == test_language && s.bucket == bucket) return s;
  }
  throw ValidationError("manifest has no set " + test_language + "/" + bucket);
}

std::vector<Condition> DatasetManifest::ExpectedConditions() const {
  std::vector<Condition> out;
  for (int m : m_values) {
    for (const ManifestSet& s : sets) {
      if (!s.scored) continue;
      out.push_back({language, s.test_language, mode, n_train, m, replicate, s.bucket});
    }
  }
  return out;
}

ordered_json ManifestToJson(const DatasetManifest& m) {
  ordered_json j;
  j["format"] = kManifestFormat;
  j["language"] = m.language;
  j["mode"] = m.mode;
  j["n_train"] = m.n_train;
  j["replicate"] = m.replicate;
  j["m_values"] = m.m_values;
  j["separator"] = m.separator;
  ordered_json prompt;
  prompt["layout"] = "training block repeated m times, separator after every string, "
                     "then the target string; loss over the target only";
  ordered_json counts = ordered_json::object();
  for (const auto& [rep, n] : m.prefix_token_counts) counts[std::to_string(rep)] = n;
  prompt["prefix_token_counts"] = counts;
  j["prompt"] = prompt;
  ordered_json grammars = ordered_json::array();
  for (const ManifestGrammar& g : m.grammars) {
    grammars.push_back({{"language", g.language}, {"file", g.file}, {"sha256", g.sha256}});
  }
  j["grammars"] = grammars;
  ordered_json sets = ordered_json::array();
  for (const ManifestSet& s : m.sets) {
    ordered_json js;
    js["bucket"] = s.bucket;
    js["test_language"] = s.test_language;
    js["kind"] = s.kind;
    if (s.kind == "edit") js["edit_distance"] = s.edit_distance;
    js["is_positive"] = s.is_positive;
    js["scored"] = s.scored;
    js["file"] = s.file;
    js["sha256"] = s.sha256;
    js["count"] = s.strings.size();
    ordered_json strings = ordered_json::array();
    for (const ManifestString& str : s.strings) {
      ordered_json e;
      e["id"] = str.id;
      if (s.kind == "positive") {
        e["logprob"] = str.logprob;
        e["seed_path"] = str.seed_path;
      } else if (s.kind == "edit") {
        e["source_id"] = str.source_id;
        e["edits"] = str.edits;
      }
      strings.push_back(std::move(e));
    }
    js["strings"] = std::move(strings);
    sets.push_back(std::move(js));
  }
  j["sets"] = std::move(sets);
  j["config"] = m.config;
  return j;
}

DatasetManifest ManifestFromJson(const json& j) {
  DatasetManifest m;
  try {
    if (j.at("format").get<std::string>() != kManifestFormat) {
      throw ValidationError("manifest: unsupported format '" +
                            j.at("format").get<std::string>() + "'");
    }
    m.language = j.at("language").get<std::string>();
    m.mode = j.at("mode").get<std::string>();
    m.n_train = j.at("n_train").get<std::size_t>();
    m.replicate = j.at("replicate").get<int>();
    m.m_values = j.at("m_values").get<std::vector<int>>();
    m.separator = j.at("separator").get<std::string>();
    for (const auto& [rep, n] : j.at("prompt").at("prefix_token_counts").items()) {
      m.prefix_token_counts[std::stoi(rep)] = n.get<std::size_t>();
    }
    for (const json& g : j.at("grammars")) {
      m.grammars.push_back({g.at("language").get<std::string>(), g.at("file").get<std::string>(),
                            g.at("sha256").get<std::string>()});
    }
    for (const json& js : j.at("sets")) {
      ManifestSet s;
      s.bucket = js.at("bucket").get<std::string>();
      s.test_language = js.at("test_language").get<std::string>();
      s.kind = js.at("kind").get<std::string>();
      s.edit_distance = js.value("edit_distance", 0);
      s.is_positive = js.at("is_positive").get<bool>();
      s.scored = js.at("scored").get<bool>();
      s.file = js.at("file").get<std::string>();
      s.sha256 = js.at("sha256").get<std::string>();
      for (const json& e : js.at("strings")) {
        ManifestString str;
        str.id = e.at("id").get<std::string>();
        str.logprob = e.value("logprob", 0.0);
        str.seed_path = e.value("seed_path", "");
        str.source_id = e.value("source_id", "");
        str.edits = e.value("edits", std::vector<std::string>{});
        s.strings.push_back(std::move(str));
      }
      if (js.at("count").get<std::size_t>() != s.strings.size()) {
        throw ValidationError("manifest: set " + s.bucket + " count does not match its strings");
      }
      m.sets.push_back(std::move(s));
    }
    m.config = j.at("config");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

DatasetManifest LoadManifest(const std::filesystem::path& run_dir) {
  const std::filesystem::path path = run_dir / kManifestFile;
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  DatasetManifest m = ManifestFromJson(j);
  auto verify = [&](const std::string& file, const std::string& sha) {
    const std::filesystem::path p = run_dir / file;
    if (!std::filesystem::exists(p)) throw ValidationError("missing file " + p.string());
    std::string contents = ReadFile(p);
    if (Sha256Hex(contents) != sha) {
      throw ValidationError("checksum mismatch for " + p.string());
    }
    return contents;
  };
  for (const ManifestGrammar& g : m.grammars) verify(g.file, g.sha256);
  for (ManifestSet& s : m.sets) {
    std::vector<TokenSeq> rows = DatasetFromText(verify(s.file, s.sha256));
    if (rows.size() != s.strings.size()) {
      throw ValidationError(s.file + " has " + std::to_string(rows.size()) +
                            " lines, manifest lists " + std::to_string(s.strings.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].empty()) throw ValidationError(s.file + ": empty line " + std::to_string(i + 1));
      s.strings[i].tokens = std::move(rows[i]);
    }
  }
  return m;
}

}  // namespace langprof
