#include "langprof/harness/experiment.h"

#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "langprof/errors.h"
#include "langprof/evaluation/ngram.h"
#include "langprof/harness/dataset_io.h"
#include "langprof/harness/prompt.h"
#include "langprof/negatives.h"
#include "langprof/perturbation.h"
#include "langprof/recognizer.h"
#include "langprof/sampler.h"

namespace langprof {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kIndexFormat = "langprof-experiment/1";

// Re-throws sub-module errors with the condition they happened under,
// keeping the error type (and so the CLI exit code).
template <typename F>
auto Labeled(const std::string& label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const AttemptCapExceeded& e) {
    throw AttemptCapExceeded(label + ": " + e.what(), e.attempts(), e.accepted());
  } catch (const ShortfallError& e) {
    throw ShortfallError(label + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(label + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(label + ": " + e.what());
  } catch (const UnsupportedOperation& e) {
    throw UnsupportedOperation(label + ": " + e.what());
  } catch (const DepthExceededError& e) {
    throw DepthExceededError(label + ": " + e.what());
  }
}

struct TestLanguage {
  std::string name;    // "L1" or "L1^(2)"
  std::string suffix;  // "" or "_p2", used in file names
  Grammar grammar;
  std::string grammar_text;
  std::unique_ptr<Recognizer> recognizer;
  std::vector<StringSample> pool;
  LengthHistogram lengths;
};

struct NegativeBucket {
  std::string bucket;
  int k = 0;  // 0 for random
  std::vector<NegativeSample> samples;
};

struct ReplicateData {
  std::map<std::size_t, std::vector<StringSample>> train;  // by n_train
  std::vector<std::vector<StringSample>> test;              // by test language
  std::vector<std::vector<NegativeBucket>> negatives;       // by test language
};

ManifestSet PositiveSet(const std::string& bucket, const std::string& language,
                        const std::string& file, const std::vector<StringSample>& samples,
                        bool scored) {
  ManifestSet set;
  set.bucket = bucket;
  set.test_language = language;
  set.kind = "positive";
  set.is_positive = true;
  set.scored = scored;
  set.file = file;
  for (const StringSample& s : samples) {
    ManifestString str;
    str.id = s.id;
    str.tokens = s.tokens;
    str.logprob = s.logprob;
    str.seed_path = s.seed_path;
    set.strings.push_back(std::move(str));
  }
  return set;
}

ManifestSet NegativeSet(const NegativeBucket& b, const std::string& language,
                        const std::string& file) {
  ManifestSet set;
  set.bucket = b.bucket;
  set.test_language = language;
  set.kind = b.k > 0 ? "edit" : "random";
  set.edit_distance = b.k;
  set.is_positive = false;
  set.scored = true;
  set.file = file;
  for (const NegativeSample& n : b.samples) {
    ManifestString str;
    str.id = n.id;
    str.tokens = n.tokens;
    str.source_id = n.source_id;
    for (EditKind e : n.edits) str.edits.push_back(ToString(e));
    set.strings.push_back(std::move(str));
  }
  return set;
}

ordered_json IndexToJson(const ExperimentIndex& index) {
  ordered_json j;
  j["format"] = kIndexFormat;
  ordered_json runs = ordered_json::array();
  for (const RunEntry& r : index.runs) {
    runs.push_back({{"language", r.language},
                    {"mode", r.mode},
                    {"n_train", r.n_train},
                    {"replicate", r.replicate},
                    {"dir", r.dir}});
  }
  j["runs"] = std::move(runs);
  j["config"] = index.config;
  return j;
}

}  // namespace

std::string RunDirectory(const std::string& language, const std::string& mode,
                         std::size_t n_train, int replicate) {
  char n[32];
  std::snprintf(n, sizeof(n), "n%04zu", n_train);
  return language + "/" + mode + "/" + n + "/r" + std::to_string(replicate);
}

ExperimentIndex EmitManifests(const ExperimentConfig& config, const fs::path& root) {
  ValidateConfig(config);
  Grammar g = Labeled("language " + config.language, [&] { return ResolveGrammar(config); });
  for (const std::string& t : g.alphabet()) {
    if (t == config.separator) {
      throw ValidationError("config: separator '" + t + "' is a grammar token");
    }
  }

  std::vector<TestLanguage> langs;
  auto add_language = [&](std::string name, std::string suffix, Grammar lg) {
    TestLanguage tl{std::move(name), std::move(suffix), std::move(lg), "", nullptr, {}, {}};
    tl.grammar_text = GrammarToText(tl.grammar);
    tl.recognizer = std::make_unique<Recognizer>(tl.grammar);
    langs.push_back(std::move(tl));
  };
  add_language(config.language, "", g);
  if (!config.test_perturbations.empty()) {
    std::vector<Perturbation> chain = ResolvePerturbationChain(config, g);
    for (int level : config.test_perturbations) {
      add_language(PerturbedLanguageName(config.language, level), "_p" + std::to_string(level),
                   Perturb(g, chain, level));
    }
  }

  const std::size_t pool_size = config.PoolSize();
  for (std::size_t li = 0; li < langs.size(); ++li) {
    TestLanguage& tl = langs[li];
    const std::string prefix = li == 0 ? "s" : "p" + tl.suffix.substr(2) + "_s";
    tl.pool = Labeled("pool " + tl.name, [&] {
      return SampleDataset(tl.grammar, pool_size, Rng(config.seed).Fork("pool").Fork(tl.name),
                           prefix);
    });
    tl.lengths = LengthHistogram::FromSamples(tl.pool);
  }

  std::vector<ReplicateData> reps(config.replicates);
  for (int r = 0; r < config.replicates; ++r) {
    ReplicateData& rd = reps[r];
    for (std::size_t n : config.n_train) {
      const std::string label = config.language + "/n" + std::to_string(n) + "/r" + std::to_string(r);
      Split split = Labeled(label, [&] {
        return StratifiedSplit(langs[0].pool, {n, config.n_test, config.seed, r});
      });
      rd.train[n] = std::move(split.train);
      if (rd.test.empty()) rd.test.push_back(std::move(split.test));
    }
    for (std::size_t li = 1; li < langs.size(); ++li) {
      const std::string label = langs[li].name + "/r" + std::to_string(r);
      rd.test.push_back(Labeled(label, [&] {
        return StratifiedSplit(langs[li].pool, {1, config.n_test, config.seed, r}).test;
      }));
    }
    rd.negatives.resize(langs.size());
    NegativeOptions opts;
    opts.attempt_cap = config.attempt_cap;
    for (std::size_t li = 0; li < langs.size(); ++li) {
      const TestLanguage& tl = langs[li];
      Rng base = Rng(config.seed).Fork("negatives").Fork(tl.name).Fork(static_cast<std::uint64_t>(r));
      for (int k : config.edit_distances) {
        const std::string bucket = "edit" + std::to_string(k);
        NegativeBucket nb{bucket, k, {}};
        nb.samples = Labeled(tl.name + "/r" + std::to_string(r) + "/" + bucket, [&] {
          return GenerateEditNegatives(*tl.recognizer, rd.test[li], k,
                                       config.NegativesPerBucket(), base.Fork(bucket), opts);
        });
        rd.negatives[li].push_back(std::move(nb));
      }
      if (config.random_negatives) {
        NegativeBucket nb{"random", 0, {}};
        nb.samples = Labeled(tl.name + "/r" + std::to_string(r) + "/random", [&] {
          return GenerateRandomNegatives(*tl.recognizer, tl.lengths, config.NegativesPerBucket(),
                                         base.Fork("random"), opts);
        });
        rd.negatives[li].push_back(std::move(nb));
      }
    }
  }

  ExperimentIndex index;
  index.config = ConfigToJson(config);
  for (const std::string& mode : config.modes) {
    for (std::size_t n : config.n_train) {
      for (int r = 0; r < config.replicates; ++r) {
        const ReplicateData& rd = reps[r];
        RunEntry entry{config.language, mode, n, r, RunDirectory(config.language, mode, n, r)};
        const fs::path dir = root / entry.dir;

        DatasetManifest m;
        m.config = index.config;
        m.language = config.language;
        m.mode = mode;
        m.n_train = n;
        m.replicate = r;
        m.m_values = config.MValues(mode);
        m.separator = config.separator;
        const std::vector<StringSample>& train = rd.train.at(n);
        m.sets.push_back(PositiveSet("train", config.language, "train.txt", train,
                                     mode == "ICL" && config.icl_train_losses));
        for (std::size_t li = 0; li < langs.size(); ++li) {
          const TestLanguage& tl = langs[li];
          const std::string gfile = "grammar" + tl.suffix + ".txt";
          WriteFile(dir / gfile, tl.grammar_text);
          m.grammars.push_back({tl.name, gfile, Sha256Hex(tl.grammar_text)});
          m.sets.push_back(PositiveSet("test", tl.name, "test" + tl.suffix + ".txt", rd.test[li], true));
          for (const NegativeBucket& nb : rd.negatives[li]) {
            const std::string tag = tl.suffix.empty() ? "" : tl.suffix.substr(1) + "_";
            m.sets.push_back(NegativeSet(nb, tl.name, "neg_" + tag + nb.bucket + ".txt"));
          }
        }
        for (ManifestSet& set : m.sets) {
          std::vector<TokenSeq> rows;
          for (const ManifestString& s : set.strings) rows.push_back(s.tokens);
          const std::string text = DatasetToText(rows);
          WriteFile(dir / set.file, text);
          set.sha256 = Sha256Hex(text);
        }
        if (mode == "ICL") {
          std::size_t block = 0;
          for (const StringSample& s : train) block += s.tokens.size() + 1;
          for (int mv : m.m_values) m.prefix_token_counts[mv] = block * static_cast<std::size_t>(mv);
        }
        WriteFile(dir / kManifestFile, ManifestToJson(m).dump(2) + "\n");
        index.runs.push_back(std::move(entry));
      }
    }
  }
  WriteFile(root / kIndexFile, IndexToJson(index).dump(2) + "\n");
  return index;
}

ExperimentIndex LoadIndex(const fs::path& root) {
  json j;
  try {
    j = json::parse(ReadFile(root / kIndexFile));
  } catch (const json::parse_error& e) {
    throw ValidationError((root / kIndexFile).string() + ": " + e.what());
  }
  ExperimentIndex index;
  try {
    if (j.at("format").get<std::string>() != kIndexFormat) {
      throw ValidationError("experiment index: unsupported format");
    }
    for (const json& r : j.at("runs")) {
      index.runs.push_back({r.at("language").get<std::string>(), r.at("mode").get<std::string>(),
                            r.at("n_train").get<std::size_t>(), r.at("replicate").get<int>(),
                            r.at("dir").get<std::string>()});
    }
    index.config = j.at("config");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("experiment index: ") + e.what());
  }
  return index;
}

std::unique_ptr<Scorer> MakeBuiltinScorer(const ExperimentConfig& config, const Grammar& g) {
  const ScorerConfig& s = config.scorer;
  if (s.kind == "oracle") return std::make_unique<OracleScorer>(g);
  if (s.kind == "random") return std::make_unique<RandomScorer>(s.seed);
  if (s.kind == "ngram") {
    return std::make_unique<NgramScorer>(g.alphabet(), config.separator,
                                         NgramOptions{s.order, s.smoothing, s.include_end});
  }
  throw ValidationError("scorer '" + s.kind + "' is not builtin");
}

std::vector<LossRecord> ScoreManifest(const DatasetManifest& manifest, const Scorer& scorer) {
  const ManifestSet& train_set = manifest.Set(manifest.language, "train");
  std::vector<TokenSeq> train;
  for (const ManifestString& s : train_set.strings) train.push_back(s.tokens);

  std::vector<LossRecord> records;
  for (int m : manifest.m_values) {
    ScoringContext ctx;
    ctx.mode = manifest.mode;
    ctx.train = train;
    ctx.m = m;
    TokenSeq prefix;
    if (manifest.mode == "ICL") {
      prefix = BuildIclPrefix(train, m, manifest.separator);
      ctx.prompt_prefix = prefix;
    }
    std::unique_ptr<StringScorer> state = scorer.Prepare(ctx);
    for (const ManifestSet& set : manifest.sets) {
      if (!set.scored) continue;
      const Condition cond{manifest.language, set.test_language, manifest.mode,
                           manifest.n_train,  m,                  manifest.replicate,
                           set.bucket};
      for (const ManifestString& s : set.strings) {
        ScoreResult res = state->Score(s.id, s.tokens);
        LossRecord rec;
        rec.string_id = s.id;
        rec.condition = cond;
        rec.total_neglogprob = res.total_neglogprob;
        rec.token_count = s.tokens.size();
        rec.per_token = std::move(res.per_token);
        rec.is_positive = set.is_positive;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

void ScoreExperiment(const fs::path& root, const Scorer& scorer) {
  ExperimentIndex index = LoadIndex(root);
  for (const RunEntry& run : index.runs) {
    DatasetManifest m = Labeled(run.dir, [&] { return LoadManifest(root / run.dir); });
    WriteLossRecords(root / run.dir / kLossFile, ScoreManifest(m, scorer));
  }
}

ReportSet RunExperiment(const ExperimentConfig& config, const fs::path& root) {
  ExperimentIndex index = EmitManifests(config, root);
  if (config.scorer.kind == "external") return {};
  std::unique_ptr<Scorer> scorer = MakeBuiltinScorer(config, ResolveGrammar(config));
  std::vector<LossRecord> all;
  for (const RunEntry& run : index.runs) {
    DatasetManifest m = Labeled(run.dir, [&] { return LoadManifest(root / run.dir); });
    std::vector<LossRecord> records = ScoreManifest(m, *scorer);
    WriteLossRecords(root / run.dir / kLossFile, records);
    all.insert(all.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
  }
  ReportOptions opts;
  opts.icl_limit_epsilon = config.icl_limit_epsilon;
  ReportSet reports = BuildReports(std::move(all), opts);
  WriteExperimentReports(reports, index, root);
  return reports;
}

void ValidateCoverage(const std::vector<DatasetManifest>& manifests,
                      const std::vector<LossRecord>& records) {
  struct Expected {
    bool is_positive;
    std::size_t token_count;
    bool seen = false;
  };
  std::map<std::pair<Condition, std::string>, Expected> expected;
  std::vector<std::pair<Condition, std::string>> order;
  for (const DatasetManifest& m : manifests) {
    for (const Condition& c : m.ExpectedConditions()) {
      const ManifestSet& set = m.Set(c.test_language, c.bucket);
      for (const ManifestString& s : set.strings) {
        auto key = std::make_pair(c, s.id);
        if (!expected.emplace(key, Expected{set.is_positive, s.tokens.size()}).second) {
          throw ValidationError("manifest lists '" + s.id + "' twice under " + ConditionLabel(c));
        }
        order.push_back(std::move(key));
      }
    }
  }
  for (const LossRecord& r : records) {
    auto it = expected.find({r.condition, r.string_id});
    if (it == expected.end()) {
      throw CoverageError("unexpected record for '" + r.string_id + "' under " +
                          ConditionLabel(r.condition));
    }
    if (it->second.seen) {
      throw CoverageError("duplicate record for '" + r.string_id + "' under " +
                          ConditionLabel(r.condition));
    }
    it->second.seen = true;
    if (r.is_positive != it->second.is_positive) {
      throw SchemaError("record '" + r.string_id + "' under " + ConditionLabel(r.condition) +
                        ": is_positive disagrees with the manifest");
    }
    if (r.token_count != it->second.token_count) {
      throw SchemaError("record '" + r.string_id + "' under " + ConditionLabel(r.condition) +
                        ": token_count " + std::to_string(r.token_count) + ", string has " +
                        std::to_string(it->second.token_count) + " tokens");
    }
  }
  std::size_t missing = 0;
  const std::pair<Condition, std::string>* first = nullptr;
  for (const auto& key : order) {
    if (expected.at(key).seen) continue;
    if (!first) first = &key;
    ++missing;
  }
  if (first) {
    throw CoverageError("missing record for '" + first->second + "' under " +
                        ConditionLabel(first->first) + " (" + std::to_string(missing) +
                        " missing in total)");
  }
}

ReportSet IngestLosses(const fs::path& root, const std::vector<fs::path>& loss_files) {
  ExperimentIndex index = LoadIndex(root);
  std::vector<DatasetManifest> manifests;
  // Each distinct (grammar, data file) pair is re-verified once.
  std::map<std::string, std::unique_ptr<Recognizer>> recognizers;
  std::set<std::pair<std::string, std::string>> verified;
  for (const RunEntry& run : index.runs) {
    DatasetManifest m = Labeled(run.dir, [&] { return LoadManifest(root / run.dir); });
    std::map<std::string, const ManifestGrammar*> grammar_of;
    for (const ManifestGrammar& g : m.grammars) grammar_of[g.language] = &g;
    for (const ManifestSet& set : m.sets) {
      auto git = grammar_of.find(set.test_language);
      if (git == grammar_of.end()) {
        throw ValidationError(run.dir + ": no grammar for " + set.test_language);
      }
      const ManifestGrammar& mg = *git->second;
      if (!verified.insert({mg.sha256, set.sha256}).second) continue;
      auto& rec = recognizers[mg.sha256];
      if (!rec) {
        rec = std::make_unique<Recognizer>(ParseGrammar(ReadFile(root / run.dir / mg.file)));
      }
      for (const ManifestString& s : set.strings) {
        if (rec->Accepts(s.tokens) != set.is_positive) {
          throw ValidationError(run.dir + "/" + set.file + ": string '" + s.id + "' is " +
                                (set.is_positive ? "not in " : "in ") + set.test_language +
                                "; the file is stale or corrupted");
        }
      }
    }
    manifests.push_back(std::move(m));
  }

  std::vector<LossRecord> records;
  auto append = [&](const fs::path& p) {
    if (!fs::exists(p)) throw CoverageError("no loss records at " + p.string());
    std::vector<LossRecord> part = ReadLossRecords(p);
    records.insert(records.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
  };
  if (loss_files.empty()) {
    for (const RunEntry& run : index.runs) append(root / run.dir / kLossFile);
  } else {
    for (const fs::path& p : loss_files) append(p);
  }
  ValidateCoverage(manifests, records);

  ReportOptions opts;
  opts.icl_limit_epsilon = index.config.value("icl_limit_epsilon", 0.05);
  ReportSet reports = BuildReports(std::move(records), opts);
  WriteExperimentReports(reports, index, root);
  return reports;
}

void WriteExperimentReports(const ReportSet& reports, const ExperimentIndex& index,
                            const fs::path& root) {
  WriteReportFiles(reports, root);
  for (const RunEntry& run : index.runs) {
    std::vector<EvalReport> rows;
    for (const EvalReport& r : reports.reports) {
      const Condition& c = r.condition;
      if (c.language == run.language && c.mode == run.mode && c.n_train == run.n_train &&
          c.replicate == run.replicate) {
        rows.push_back(r);
      }
    }
    WriteFile(root / run.dir / "report.csv", ReportsToCsv(rows));
  }
}

}  // namespace langprof
