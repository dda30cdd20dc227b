#ifndef LANGPROF_EVALUATION_METRICS_H_
#define LANGPROF_EVALUATION_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "langprof/evaluation/loss_record.h"

namespace langprof {

// Classifier input derived from one record.
enum class ScoreMode {
  kPerToken,  // total_neglogprob / token_count (default)
  kTotal,     // total_neglogprob
};

double RecordScore(const LossRecord& r, ScoreMode mode = ScoreMode::kPerToken);

// Unweighted mean over strings of total / token_count. Infinite losses throw
// ValidationError unless `exclude_infinite`, in which case they are dropped
// and counted in `*excluded`. Throws on empty input (or nothing left).
double GenerativeLoss(std::span<const LossRecord> records, bool exclude_infinite = false,
                      std::size_t* excluded = nullptr);

// Mann-Whitney AUC: P(neg > pos) + P(neg == pos) / 2, computed exactly from
// ranks. +infinity ranks above every finite score. NaN is rejected.
double AucFromScores(std::span<const double> pos, std::span<const double> neg);
double DiscriminativeAuc(std::span<const LossRecord> pos, std::span<const LossRecord> neg,
                         ScoreMode mode = ScoreMode::kPerToken);

// Throws ValidationError for length mismatch, fewer than 2 points,
// non-finite values or zero variance.
double Pearson(std::span<const double> a, std::span<const double> b);
// Pairs records by string_id (ids must match exactly as sets).
double PearsonById(std::span<const LossRecord> a, std::span<const LossRecord> b,
                   ScoreMode mode = ScoreMode::kPerToken);

enum class IclCategory { kGood, kModerate, kPoor };
// Good >= 0.75 > Moderate >= 0.6 > Poor.
IclCategory CategorizeIcl(double auc);
std::string ToString(IclCategory c);

// Index of the maximal AUC; ties go to the smallest m. Throws on empty or
// mismatched input.
std::size_t SelectOptimal(std::span<const int> m, std::span<const double> auc);

struct IclLimitPoint {
  long long x = 0;  // grid value: number of examples or repetitions
  double train_loss = 0.0;
  double test_loss = 0.0;
  double gap = 0.0;  // test - train
  bool converged = false;
  bool anomaly = false;  // gap < 0: train loss is not a lower bound here
};

struct IclLimitReport {
  std::vector<IclLimitPoint> points;
  std::optional<long long> converged_at;  // first x with gap <= epsilon
  bool has_anomaly = false;
};

// Grids are (x, mean loss) pairs and must list the same x values in the
// same order; throws ValidationError otherwise.
IclLimitReport IclLimitAnalysis(std::span<const std::pair<long long, double>> train,
                                std::span<const std::pair<long long, double>> test,
                                double epsilon);

}  // namespace langprof

#endif  // LANGPROF_EVALUATION_METRICS_H_
