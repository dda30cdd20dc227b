#include "langprof/evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "langprof/errors.h"

namespace langprof {

double RecordScore(const LossRecord& r, ScoreMode mode) {
  if (mode == ScoreMode::kTotal) return r.total_neglogprob;
  return r.total_neglogprob / static_cast<double>(r.token_count);
}

double GenerativeLoss(std::span<const LossRecord> records, bool exclude_infinite,
                      std::size_t* excluded) {
  if (records.empty()) throw ValidationError("generative loss of an empty record set");
  double sum = 0.0;
  std::size_t used = 0, dropped = 0;
  for (const LossRecord& r : records) {
    double per_token = RecordScore(r, ScoreMode::kPerToken);
    if (!std::isfinite(per_token)) {
      if (!exclude_infinite) {
        throw ValidationError("generative loss: record '" + r.string_id +
                              "' has an infinite loss");
      }
      ++dropped;
      continue;
    }
    sum += per_token;
    ++used;
  }
  if (excluded) *excluded = dropped;
  if (used == 0) throw ValidationError("generative loss: every record is infinite");
  return sum / static_cast<double>(used);
}

double AucFromScores(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw ValidationError("AUC needs both classes");
  std::vector<double> sorted(pos.begin(), pos.end());
  for (double x : sorted) {
    if (std::isnan(x)) throw ValidationError("AUC: NaN score");
  }
  std::sort(sorted.begin(), sorted.end());
  // Twice the Mann-Whitney U, kept integral.
  std::uint64_t twice_u = 0;
  for (double x : neg) {
    if (std::isnan(x)) throw ValidationError("AUC: NaN score");
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    auto hi = std::upper_bound(lo, sorted.end(), x);
    twice_u += 2 * static_cast<std::uint64_t>(lo - sorted.begin()) +
               static_cast<std::uint64_t>(hi - lo);
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

double DiscriminativeAuc(std::span<const LossRecord> pos, std::span<const LossRecord> neg,
                         ScoreMode mode) {
  std::vector<double> p, n;
  p.reserve(pos.size());
  n.reserve(neg.size());
  for (const LossRecord& r : pos) p.push_back(RecordScore(r, mode));
  for (const LossRecord& r : neg) n.push_back(RecordScore(r, mode));
  return AucFromScores(p, n);
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("Pearson: length mismatch");
  if (a.size() < 2) throw ValidationError("Pearson: need at least 2 points");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw ValidationError("Pearson: non-finite value");
    }
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw ValidationError("Pearson: zero variance, correlation undefined");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double PearsonById(std::span<const LossRecord> a, std::span<const LossRecord> b,
                   ScoreMode mode) {
  std::map<std::string, double> by_id;
  for (const LossRecord& r : a) {
    if (!by_id.emplace(r.string_id, RecordScore(r, mode)).second) {
      throw ValidationError("Pearson: duplicate id '" + r.string_id + "'");
    }
  }
  if (b.size() != by_id.size()) throw ValidationError("Pearson: id sets differ in size");
  std::vector<double> xa, xb;
  for (const LossRecord& r : b) {
    auto it = by_id.find(r.string_id);
    if (it == by_id.end()) throw ValidationError("Pearson: id '" + r.string_id + "' unmatched");
    xa.push_back(it->second);
    xb.push_back(RecordScore(r, mode));
  }
  return Pearson(xa, xb);
}

IclCategory CategorizeIcl(double auc) {
  if (!(auc >= 0.0 && auc <= 1.0)) throw ValidationError("AUC outside [0, 1]");
  if (auc >= 0.75) return IclCategory::kGood;
  if (auc >= 0.6) return IclCategory::kModerate;
  return IclCategory::kPoor;
}

std::string ToString(IclCategory c) {
  switch (c) {
    case IclCategory::kGood:
      return "Good";
    case IclCategory::kModerate:
      return "Moderate";
    case IclCategory::kPoor:
      return "Poor";
  }
  return "Poor";
}

std::size_t SelectOptimal(std::span<const int> m, std::span<const double> auc) {
  if (m.empty() || m.size() != auc.size()) {
    throw ValidationError("select_optimal: need matching nonempty m and AUC lists");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (auc[i] > auc[best] || (auc[i] == auc[best] && m[i] < m[best])) best = i;
  }
  return best;
}

IclLimitReport IclLimitAnalysis(std::span<const std::pair<long long, double>> train,
                                std::span<const std::pair<long long, double>> test,
                                double epsilon) {
  if (train.size() != test.size()) throw ValidationError("ICL limit: grids differ in length");
  IclLimitReport report;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].first != test[i].first) {
      throw ValidationError("ICL limit: grids misaligned at position " + std::to_string(i));
    }
    IclLimitPoint p;
    p.x = train[i].first;
    p.train_loss = train[i].second;
    p.test_loss = test[i].second;
    p.gap = p.test_loss - p.train_loss;
    p.converged = p.gap <= epsilon;
    p.anomaly = p.gap < 0.0;
    if (p.converged && !report.converged_at) report.converged_at = p.x;
    report.has_anomaly = report.has_anomaly || p.anomaly;
    report.points.push_back(p);
  }
  return report;
}

}  // namespace langprof
