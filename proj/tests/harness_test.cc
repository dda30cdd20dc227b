#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "json.hpp"
#include "langprof/builtin.h"
#include "langprof/errors.h"
#include "langprof/harness/config.h"
#include "langprof/harness/dataset_io.h"
#include "langprof/harness/experiment.h"
#include "langprof/harness/manifest.h"
#include "langprof/harness/prompt.h"
#include "langprof/harness/report.h"
#include "langprof/recognizer.h"

namespace langprof {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("langprof_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig SmallConfig(const std::string& scorer) {
  ExperimentConfig c = ConfigFromJson(json::parse(R"({
    "n_train": [4, 16], "n_test": 64, "replicates": 2, "modes": ["FT", "ICL"],
    "m": {"FT": [1, 3], "ICL": [1, 2]}, "edit_distances": [1, 2],
    "test_perturbations": [1]
  })"));
  c.scorer.kind = scorer;
  return c;
}

std::map<std::string, std::string> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = ReadFile(e.path());
  }
  return out;
}

TEST(PromptTest, Examples) {
  std::vector<TokenSeq> one = {{"1", "2"}};
  TokenSeq test = {"3", "4"};
  IclPrompt p = BuildIclPrompt(one, 1, ";", test);
  EXPECT_EQ(FormatTokens(p.tokens), "1 2 ; 3 4");
  EXPECT_EQ(p.target_begin, 3u);
  EXPECT_EQ(p.target_end, 5u);

  std::vector<TokenSeq> two = {{"1", "2"}, {"3", "4"}};
  TokenSeq t2 = {"5", "6"};
  p = BuildIclPrompt(two, 2, ";", t2);
  EXPECT_EQ(FormatTokens(p.tokens), "1 2 ; 3 4 ; 1 2 ; 3 4 ; 5 6");
  EXPECT_EQ(p.target_begin, 12u);
  EXPECT_THROW(BuildIclPrompt(two, 0, ";", t2), ValidationError);
}

TEST(PromptTest, L1PromptLengthWithinBounds) {
  ExperimentConfig small = SmallConfig("oracle");
  fs::path root = TempDir("prompt_len");
  small.n_train = {32};
  small.modes = {"ICL"};
  small.test_perturbations = {};
  EmitManifests(small, root);
  DatasetManifest m = LoadManifest(root / RunDirectory("L1", "ICL", 32, 0));
  std::vector<TokenSeq> train;
  for (const ManifestString& s : m.Set("L1", "train").strings) train.push_back(s.tokens);
  TokenSeq prefix = BuildIclPrefix(train, 1, ";");
  EXPECT_GE(prefix.size(), 32u * 30 + 32);
  EXPECT_LE(prefix.size(), 32u * 72 + 32);
  EXPECT_EQ(m.prefix_token_counts.at(1), prefix.size());
}

TEST(DatasetIoTest, RoundTripAndValidation) {
  std::vector<TokenSeq> rows = {{"1", "2"}, {"a"}};
  EXPECT_EQ(DatasetToText(rows), "1 2\na\n");
  EXPECT_EQ(DatasetFromText("1 2\na\n"), rows);
  std::vector<std::string> bad = {"a b"};
  EXPECT_THROW(FormatTokens(bad), ValidationError);
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(DatasetIoTest, FormatNumberRoundTrips) {
  for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, 23 * std::log(2.0), 1e-300}) {
    EXPECT_EQ(std::stod(FormatNumber(x)), x);
  }
  EXPECT_EQ(FormatNumber(std::numeric_limits<double>::infinity()), "Infinity");
}

TEST(ConfigTest, DefaultsAndRejections) {
  ExperimentConfig c = ConfigFromJson(json::object());
  EXPECT_EQ(c.n_train.size(), 11u);
  EXPECT_EQ(c.n_train.back(), 1024u);
  EXPECT_EQ(c.n_test, 1024u);
  EXPECT_EQ(c.replicates, 3);
  EXPECT_EQ(c.MValues("FT").size(), 50u);
  EXPECT_EQ(c.MValues("ICL"), (std::vector<int>{1, 2, 4, 8, 16}));
  EXPECT_EQ(c.edit_distances, (std::vector<int>{1, 2, 4, 8}));
  EXPECT_EQ(c.PoolSize(), 8u * 2048);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"bogus": 1})")), ValidationError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"n_train": []})")), ValidationError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"modes": ["XX"]})")), ValidationError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"n_test": "x"})")), ValidationError);
  ExperimentConfig sep;
  sep.separator = "3";
  EXPECT_THROW(EmitManifests(sep, TempDir("sep")), ValidationError);
}

TEST(ConfigTest, JsonRoundTrip) {
  ExperimentConfig c = SmallConfig("ngram");
  EXPECT_EQ(ConfigToJson(ConfigFromJson(ConfigToJson(c))), ConfigToJson(c));
}

TEST(ExperimentTest, OracleReportsArePerfect) {
  fs::path root = TempDir("oracle");
  ReportSet r = RunExperiment(SmallConfig("oracle"), root);
  ASSERT_FALSE(r.reports.empty());
  for (const EvalReport& e : r.reports) {
    if (e.condition.test_language == "L1") {
      EXPECT_EQ(e.auc, 1.0) << ConditionLabel(e.condition);
    }
  }
  EXPECT_TRUE(fs::exists(root / "reports.csv"));
  EXPECT_TRUE(fs::exists(root / "summary.csv"));
  EXPECT_TRUE(fs::exists(root / RunDirectory("L1", "ICL", 16, 1) / "report.csv"));
}

TEST(ExperimentTest, EmittedSetsHonorTheirContracts) {
  fs::path root = TempDir("contracts");
  ExperimentConfig c = SmallConfig("oracle");
  ExperimentIndex index = EmitManifests(c, root);
  EXPECT_EQ(index.runs.size(), 2u * 2 * 2);
  Recognizer l1(Builtin(LanguageId::kL1));
  for (const RunEntry& run : index.runs) {
    DatasetManifest m = LoadManifest(root / run.dir);
    std::set<TokenSeq> train;
    for (const ManifestString& s : m.Set("L1", "train").strings) train.insert(s.tokens);
    EXPECT_EQ(train.size() <= run.n_train, true);
    for (const ManifestString& s : m.Set("L1", "test").strings) {
      EXPECT_EQ(train.count(s.tokens), 0u);
    }
    for (const ManifestSet& set : m.sets) {
      if (set.test_language != "L1") continue;
      for (const ManifestString& s : set.strings) EXPECT_EQ(l1.Accepts(s.tokens), set.is_positive);
    }
    EXPECT_EQ(m.Set("L1", "train").scored, run.mode == "ICL");
  }
}

TEST(ExperimentTest, EmissionIsDeterministic) {
  fs::path a = TempDir("det_a"), b = TempDir("det_b");
  RunExperiment(SmallConfig("ngram"), a);
  RunExperiment(SmallConfig("ngram"), b);
  EXPECT_EQ(ReadTree(a), ReadTree(b));
}

TEST(ExperimentTest, IngestReproducesRunExperiment) {
  fs::path run = TempDir("rt_run"), ext = TempDir("rt_ext");
  RunExperiment(SmallConfig("ngram"), run);
  ExperimentConfig external = SmallConfig("ngram");
  external.scorer.kind = "external";
  EXPECT_TRUE(RunExperiment(external, ext).reports.empty());
  // External scoring: copy the builtin losses into the emitted tree.
  ExperimentIndex index = LoadIndex(ext);
  for (const RunEntry& r : index.runs) {
    fs::copy_file(run / r.dir / kLossFile, ext / r.dir / kLossFile);
  }
  IngestLosses(ext);
  for (const char* f : {"reports.json", "reports.csv", "summary.csv", "correlations.csv",
                        "icl_limit.csv"}) {
    EXPECT_EQ(ReadFile(run / f), ReadFile(ext / f)) << f;
  }
}

class IngestErrorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = TempDir("ingest_err");
    ExperimentConfig c = SmallConfig("oracle");
    c.modes = {"FT"};
    c.n_train = {4};
    c.replicates = 1;
    c.test_perturbations = {};
    RunExperiment(c, root_);
    run_ = root_ / RunDirectory("L1", "FT", 4, 0);
    lines_ = Lines(ReadFile(run_ / kLossFile));
  }

  static std::vector<std::string> Lines(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      out.push_back(text.substr(start, end - start));
      start = end + 1;
    }
    return out;
  }

  void WriteLines(const std::vector<std::string>& lines) {
    std::string text;
    for (const std::string& l : lines) text += l + "\n";
    WriteFile(run_ / kLossFile, text);
  }

  fs::path root_, run_;
  std::vector<std::string> lines_;
};

TEST_F(IngestErrorTest, MissingIdIsNamed) {
  std::string id = json::parse(lines_[5])["string_id"];
  lines_.erase(lines_.begin() + 5);
  WriteLines(lines_);
  try {
    IngestLosses(root_);
    FAIL() << "expected CoverageError";
  } catch (const CoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("'" + id + "'"), std::string::npos) << e.what();
  }
}

TEST_F(IngestErrorTest, DuplicateIsRejected) {
  lines_.push_back(lines_[0]);
  WriteLines(lines_);
  EXPECT_THROW(IngestLosses(root_), CoverageError);
}

TEST_F(IngestErrorTest, PerTokenSumMismatchNamesLine) {
  json j = json::parse(lines_[2]);
  j["total_neglogprob"] = 10.0;
  j["per_token"] = std::vector<double>(j["token_count"].get<std::size_t>(), 1.0);
  lines_[2] = j.dump();
  WriteLines(lines_);
  try {
    IngestLosses(root_);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST_F(IngestErrorTest, ChecksumMismatchIsRejected) {
  std::string text = ReadFile(run_ / "neg_edit1.txt");
  text[0] = text[0] == '1' ? '2' : '1';
  WriteFile(run_ / "neg_edit1.txt", text);
  EXPECT_THROW(IngestLosses(root_), ValidationError);
}

TEST_F(IngestErrorTest, StaleNegativeIsDetectedEvenWithMatchingChecksum) {
  // Replace a negative with an in-language string and update the checksum.
  std::string test = ReadFile(run_ / "test.txt");
  std::string neg = ReadFile(run_ / "neg_edit1.txt");
  std::string first_test = test.substr(0, test.find('\n') + 1);
  neg = first_test + neg.substr(neg.find('\n') + 1);
  WriteFile(run_ / "neg_edit1.txt", neg);
  json m = json::parse(ReadFile(run_ / kManifestFile));
  for (json& set : m["sets"]) {
    if (set["file"] == "neg_edit1.txt") set["sha256"] = Sha256Hex(neg);
  }
  WriteFile(run_ / kManifestFile, m.dump(2) + "\n");
  try {
    IngestLosses(root_);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("stale"), std::string::npos) << e.what();
  }
}

TEST(ReportTest, CsvShape) {
  LossRecord p, n;
  p.condition = {"L1", "L1", "FT", 4, 1, 0, "test"};
  p.string_id = "s0";
  p.total_neglogprob = 2.0;
  p.token_count = 2;
  p.is_positive = true;
  n = p;
  n.condition.bucket = "edit1";
  n.string_id = "e1_0";
  n.total_neglogprob = 4.0;
  n.is_positive = false;
  ReportSet r = BuildReports({p, n});
  ASSERT_EQ(r.reports.size(), 1u);
  std::string csv = ReportsToCsv(r.reports);
  EXPECT_EQ(csv,
            "language,test_language,mode,n_train,replicate,m,bucket,auc,mean_pos_loss,"
            "mean_neg_loss,n_pos,n_neg,m_star,is_optimal,category\n"
            "L1,L1,FT,4,0,1,edit1,1,1,2,1,1,1,true,Good\n");
}

TEST(ReportTest, ModeColumnSeparatesFtAndIcl) {
  std::vector<LossRecord> recs;
  for (const char* mode : {"FT", "ICL"}) {
    for (int i = 0; i < 2; ++i) {
      LossRecord r;
      r.condition = {"L1", "L1", mode, 4, 1, 0, i ? "edit1" : "test"};
      r.string_id = i ? "e" : "s";
      r.total_neglogprob = 1.0 + i;
      r.token_count = 1;
      r.is_positive = i == 0;
      recs.push_back(r);
    }
  }
  ReportSet r = BuildReports(recs);
  ASSERT_EQ(r.reports.size(), 2u);
  EXPECT_EQ(r.reports[0].condition.mode, "FT");
  EXPECT_EQ(r.reports[1].condition.mode, "ICL");
}

}  // namespace
}  // namespace langprof
