// Command-line front end: dataset generation, splits, negatives, prompts,
// scoring, external-scorer exchange and reports.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "langprof/errors.h"
#include "langprof/evaluation/distance.h"
#include "langprof/evaluation/loss_record.h"
#include "langprof/evaluation/ngram.h"
#include "langprof/evaluation/scorers.h"
#include "langprof/harness/config.h"
#include "langprof/harness/dataset_io.h"
#include "langprof/harness/experiment.h"
#include "langprof/harness/prompt.h"
#include "langprof/harness/report.h"
#include "langprof/negatives.h"
#include "langprof/perturbation.h"
#include "langprof/recognizer.h"
#include "langprof/sampler.h"

namespace {

namespace fs = std::filesystem;
using namespace langprof;

constexpr int kExitValidation = 2;
constexpr int kExitCoverage = 3;

// --language / --grammar / --alphabet, resolved like a config.
struct GrammarSource {
  std::string language = "L1";
  std::string grammar_path;
  std::vector<std::string> alphabet;

  void Register(CLI::App* app, const std::string& prefix = "") {
    app->add_option("--" + prefix + "language", language, "builtin L1..L6, or a label for --" +
                                                              prefix + "grammar");
    app->add_option("--" + prefix + "grammar", grammar_path, "grammar file");
    app->add_option("--" + prefix + "alphabet", alphabet, "substitution tokens")->delimiter(',');
  }

  Grammar Resolve() const {
    ExperimentConfig c;
    c.language = language;
    c.grammar_path = grammar_path;
    c.alphabet = alphabet;
    return ResolveGrammar(c);
  }
};

void Emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    WriteFile(out, text);
  }
}

std::vector<StringSample> AsSamples(const std::vector<TokenSeq>& rows, const std::string& prefix) {
  std::vector<StringSample> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back({prefix + std::to_string(i), rows[i], 0.0, ""});
  }
  return out;
}

std::string SamplesToText(const std::vector<StringSample>& s) {
  std::vector<TokenSeq> rows;
  for (const StringSample& x : s) rows.push_back(x.tokens);
  return DatasetToText(rows);
}

void Report(const ReportSet& r, std::ostream& os) {
  os << SummaryToCsv(r.summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formal-language profiling of string scorers"};
  app.require_subcommand(1);

  // gen
  GrammarSource gen_src;
  std::size_t gen_count = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "sample strings from a grammar");
  gen_src.Register(gen);
  gen->add_option("--count", gen_count, "number of strings");
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--out", gen_out, "dataset file (default stdout)");

  // split
  GrammarSource split_src;
  SplitSpec split_spec;
  std::size_t split_pool = 0;
  std::string split_dir = ".";
  CLI::App* split = app.add_subcommand("split", "sample a pool and split it into train/test");
  split_src.Register(split);
  split->add_option("--n-train", split_spec.n_train);
  split->add_option("--n-test", split_spec.n_test);
  split->add_option("--seed", split_spec.seed);
  split->add_option("--replicate", split_spec.replicate);
  split->add_option("--pool-size", split_pool, "default max(8 * (n_train + n_test), 10000)");
  split->add_option("-o,--out-dir", split_dir, "writes train.txt and test.txt");

  // negatives
  GrammarSource neg_src;
  std::string neg_kind = "edit";
  int neg_k = 1;
  std::string neg_positives;
  std::size_t neg_count = 0;
  std::uint64_t neg_seed = 0;
  NegativeOptions neg_opts;
  std::string neg_out;
  CLI::App* neg = app.add_subcommand("negatives", "generate verified out-of-language strings");
  neg_src.Register(neg);
  neg->add_option("--kind", neg_kind, "edit | random")->check(CLI::IsMember({"edit", "random"}));
  neg->add_option("-k,--edit-distance", neg_k);
  neg->add_option("--positives", neg_positives, "dataset file of in-language strings")
      ->required();
  neg->add_option("--count", neg_count, "default: number of positives");
  neg->add_option("--seed", neg_seed);
  neg->add_option("--attempt-cap", neg_opts.attempt_cap);
  neg->add_flag("--strict", neg_opts.strict, "require distance k from the whole language");
  neg->add_option("-o,--out", neg_out);

  // prompt
  std::string prompt_train;
  int prompt_m = 1;
  std::string prompt_sep = ";";
  std::string prompt_test;
  CLI::App* prompt = app.add_subcommand("prompt", "build an in-context prompt");
  prompt->add_option("--train", prompt_train, "dataset file")->required();
  prompt->add_option("-m,--repetitions", prompt_m);
  prompt->add_option("--separator", prompt_sep);
  prompt->add_option("--test", prompt_test, "target string, space separated")->required();

  // score
  GrammarSource score_src;
  ScorerConfig score_cfg;
  std::string score_in, score_train, score_root, score_out, score_sep = ";", score_mode = "FT";
  int score_m = 1;
  CLI::App* score = app.add_subcommand(
      "score", "score a dataset file, or every run of an emitted experiment (--root)");
  score_src.Register(score);
  score->add_option("--scorer", score_cfg.kind)->check(CLI::IsMember({"oracle", "ngram", "random"}));
  score->add_option("--order", score_cfg.order);
  score->add_option("--smoothing", score_cfg.smoothing);
  score->add_flag("--include-end", score_cfg.include_end);
  score->add_option("--scorer-seed", score_cfg.seed);
  score->add_option("--in", score_in, "dataset file to score");
  score->add_option("--train", score_train, "training dataset for ngram / ICL");
  score->add_option("--mode", score_mode)->check(CLI::IsMember({"FT", "ICL"}));
  score->add_option("-m", score_m);
  score->add_option("--separator", score_sep);
  score->add_option("--root", score_root, "experiment root written by emit");
  score->add_option("-o,--out", score_out);

  // emit
  std::string emit_config, emit_root;
  CLI::App* emit = app.add_subcommand("emit", "write datasets and manifests for a config");
  emit->add_option("-c,--config", emit_config)->required();
  emit->add_option("-o,--out", emit_root, "experiment root")->required();

  // ingest
  std::string ingest_root;
  std::vector<std::string> ingest_losses;
  CLI::App* ingest = app.add_subcommand("ingest", "validate external loss records and report");
  ingest->add_option("--root", ingest_root)->required();
  ingest->add_option("--losses", ingest_losses, "JSONL files (default <run>/losses.jsonl)");

  // eval
  std::string eval_config, eval_root;
  CLI::App* eval = app.add_subcommand("eval", "emit, score with the builtin scorer and report");
  eval->add_option("-c,--config", eval_config)->required();
  eval->add_option("-o,--out", eval_root, "experiment root")->required();

  // distance
  GrammarSource dist_a, dist_b;
  std::vector<int> dist_levels;
  CLI::App* distance = app.add_subcommand("distance", "exact L2 distance between languages");
  dist_a.Register(distance);
  dist_b.Register(distance, "b-");
  distance->add_option("--levels", dist_levels,
                       "instead of --b-*: distance to each perturbation level")->delimiter(',');

  // report
  std::vector<std::string> report_in;
  std::string report_dir = ".";
  double report_eps = 0.05;
  bool report_total = false;
  CLI::App* report = app.add_subcommand("report", "report tables from loss record files");
  report->add_option("--losses", report_in)->required();
  report->add_option("-o,--out-dir", report_dir);
  report->add_option("--epsilon", report_eps, "ICL limit convergence threshold");
  report->add_flag("--total", report_total, "rank by total instead of per-token loss");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*gen) {
      Grammar g = gen_src.Resolve();
      Emit(gen_out, SamplesToText(SampleDataset(g, gen_count, Rng(gen_seed))));
    } else if (*split) {
      Grammar g = split_src.Resolve();
      std::size_t pool_size =
          split_pool ? split_pool : DefaultPoolSize(split_spec.n_train, split_spec.n_test);
      auto pool = SampleDataset(g, pool_size, Rng(split_spec.seed).Fork("pool").Fork(split_src.language));
      Split s = StratifiedSplit(pool, split_spec);
      WriteFile(fs::path(split_dir) / "train.txt", SamplesToText(s.train));
      WriteFile(fs::path(split_dir) / "test.txt", SamplesToText(s.test));
    } else if (*neg) {
      Recognizer rec(neg_src.Resolve());
      std::vector<TokenSeq> rows = ReadDataset(neg_positives);
      std::vector<StringSample> pos = AsSamples(rows, "s");
      std::size_t count = neg_count ? neg_count : pos.size();
      GenerationStats stats;
      std::vector<NegativeSample> out =
          neg_kind == "edit"
              ? GenerateEditNegatives(rec, pos, neg_k, count, Rng(neg_seed), neg_opts, &stats)
              : GenerateRandomNegatives(rec, LengthHistogram::FromSequences(rows), count,
                                        Rng(neg_seed), neg_opts, &stats);
      std::vector<TokenSeq> tokens;
      for (const NegativeSample& n : out) tokens.push_back(n.tokens);
      Emit(neg_out, DatasetToText(tokens));
      std::cerr << "acceptance rate " << stats.acceptance_rate() << " (" << stats.accepted << "/"
                << stats.attempts << ")\n";
    } else if (*prompt) {
      std::vector<TokenSeq> train = ReadDataset(prompt_train);
      TokenSeq test = ParseTokens(prompt_test);
      IclPrompt p = BuildIclPrompt(train, prompt_m, prompt_sep, test);
      std::cout << FormatTokens(p.tokens) << "\n"
                << "target " << p.target_begin << " " << p.target_end << "\n";
    } else if (*score) {
      ExperimentConfig c;
      c.language = score_src.language;
      c.grammar_path = score_src.grammar_path;
      c.alphabet = score_src.alphabet;
      c.separator = score_sep;
      c.scorer = score_cfg;
      if (!score_root.empty()) {
        ExperimentIndex index = LoadIndex(score_root);
        ExperimentConfig run_cfg = ConfigFromJson(index.config);
        if (score->count("--scorer") == 0) score_cfg = run_cfg.scorer;
        run_cfg.scorer = score_cfg;
        std::unique_ptr<Scorer> scorer = MakeBuiltinScorer(run_cfg, ResolveGrammar(run_cfg));
        ScoreExperiment(score_root, *scorer);
      } else {
        if (score_in.empty()) throw ValidationError("score: --in or --root is required");
        Grammar g = ResolveGrammar(c);
        std::unique_ptr<Scorer> scorer = MakeBuiltinScorer(c, g);
        std::vector<TokenSeq> train;
        if (!score_train.empty()) train = ReadDataset(score_train);
        ScoringContext ctx;
        ctx.mode = score_mode;
        ctx.train = train;
        ctx.m = score_m;
        TokenSeq prefix;
        if (score_mode == "ICL") {
          prefix = BuildIclPrefix(train, score_m, score_sep);
          ctx.prompt_prefix = prefix;
        }
        std::unique_ptr<StringScorer> state = scorer->Prepare(ctx);
        std::vector<TokenSeq> rows = ReadDataset(score_in);
        std::string text = "index,token_count,total_neglogprob,per_token_loss\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const std::string id = "s" + std::to_string(i);
          ScoreResult r = state->Score(id, rows[i]);
          text += std::to_string(i) + "," + std::to_string(rows[i].size()) + "," +
                  FormatNumber(r.total_neglogprob) + "," +
                  FormatNumber(r.total_neglogprob / static_cast<double>(rows[i].size())) + "\n";
        }
        Emit(score_out, text);
      }
    } else if (*emit) {
      ExperimentIndex index = EmitManifests(LoadConfig(emit_config), emit_root);
      std::cerr << "emitted " << index.runs.size() << " runs under " << emit_root << "\n";
    } else if (*ingest) {
      std::vector<fs::path> files(ingest_losses.begin(), ingest_losses.end());
      Report(IngestLosses(ingest_root, files), std::cout);
    } else if (*eval) {
      ExperimentConfig c = LoadConfig(eval_config);
      ReportSet r = RunExperiment(c, eval_root);
      if (c.scorer.kind == "external") {
        std::cerr << "external scorer: manifests written under " << eval_root << "\n";
      } else {
        Report(r, std::cout);
      }
    } else if (*distance) {
      Grammar a = dist_a.Resolve();
      if (!dist_levels.empty()) {
        ExperimentConfig c;
        c.language = dist_a.language;
        std::vector<Perturbation> chain = ResolvePerturbationChain(c, a);
        for (int level : dist_levels) {
          std::cout << level << "," << FormatNumber(LanguageDistanceL2(a, Perturb(a, chain, level)))
                    << "\n";
        }
      } else {
        std::cout << FormatNumber(LanguageDistanceL2(a, dist_b.Resolve())) << "\n";
      }
    } else if (*report) {
      std::vector<LossRecord> records;
      for (const std::string& f : report_in) {
        std::vector<LossRecord> part = ReadLossRecords(f);
        records.insert(records.end(), part.begin(), part.end());
      }
      ReportOptions opts;
      opts.score_mode = report_total ? ScoreMode::kTotal : ScoreMode::kPerToken;
      opts.icl_limit_epsilon = report_eps;
      ReportSet r = BuildReports(std::move(records), opts);
      WriteReportFiles(r, report_dir);
      Report(r, std::cout);
    }
  } catch (const CoverageError& e) {
    std::cerr << "coverage error: " << e.what() << "\n";
    return kExitCoverage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
