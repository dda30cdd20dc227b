#ifndef LANGPROF_HARNESS_REPORT_H_
#define LANGPROF_HARNESS_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "langprof/evaluation/loss_record.h"
#include "langprof/evaluation/metrics.h"

namespace langprof {

// Discriminative and generative results for one negative bucket under one
// model state: positives are the "test" bucket of the same condition.
struct EvalReport {
  Condition condition;  // bucket = the negative bucket
  double auc = 0.0;
  double mean_pos_loss = 0.0;  // per-token, +inf if any positive is off-language
  double mean_neg_loss = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  int m_star = 0;  // optimal m for this (..., replicate, bucket) across the m grid
  bool is_optimal = false;
  std::string category;
};

// Replicate aggregate at each replicate's m*.
struct SummaryRow {
  Condition condition;  // m and replicate unused
  std::size_t replicates = 0;
  double mean_auc = 0.0;
  double min_auc = 0.0;
  double max_auc = 0.0;
  std::vector<int> m_star;  // per replicate
  std::string category;
};

// FT vs ICL generative losses on identical test strings, each mode at its
// m* for the reference bucket.
struct CorrelationRow {
  Condition condition;  // mode, m unused
  std::string reference_bucket;
  int m_ft = 0;
  int m_icl = 0;
  std::size_t n = 0;
  std::optional<double> pearson;
  std::string note;
};

// ICL train vs test loss as training examples are added.
struct IclLimitRow {
  Condition condition;  // n_train and bucket unused
  IclLimitReport report;
};

struct ReportOptions {
  ScoreMode score_mode = ScoreMode::kPerToken;
  double icl_limit_epsilon = 0.05;
};

struct ReportSet {
  std::vector<EvalReport> reports;
  std::vector<SummaryRow> summary;
  std::vector<CorrelationRow> correlations;
  std::vector<IclLimitRow> icl_limit;
};

// Depends only on the multiset of records (they are sorted first). Throws
// ValidationError when a condition with negatives lacks positives.
ReportSet BuildReports(std::vector<LossRecord> records, const ReportOptions& options = {});

std::string ReportsToJson(const ReportSet& r);
std::string ReportsToCsv(const std::vector<EvalReport>& rows);
std::string SummaryToCsv(const std::vector<SummaryRow>& rows);
std::string CorrelationsToCsv(const std::vector<CorrelationRow>& rows);
std::string IclLimitToCsv(const std::vector<IclLimitRow>& rows);

// reports.json, reports.csv, summary.csv, correlations.csv, icl_limit.csv.
void WriteReportFiles(const ReportSet& r, const std::filesystem::path& dir);

}  // namespace langprof

#endif  // LANGPROF_HARNESS_REPORT_H_
