#include "langprof/harness/report.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "langprof/errors.h"
#include "langprof/harness/dataset_io.h"

namespace langprof {
namespace {

using nlohmann::ordered_json;

bool IsPositiveBucket(const std::string& b) { return b == "test" || b == "train"; }

double MeanScore(const std::vector<LossRecord>& records, ScoreMode mode) {
  double sum = 0.0;
  for (const LossRecord& r : records) sum += RecordScore(r, mode);
  return sum / static_cast<double>(records.size());
}

ordered_json Num(double x) {
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  return x;
}

std::string JoinInts(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(v[i]);
  }
  return out;
}

// Fields are plain identifiers or numbers, except language names such as
// "L1^(2)", which need no quoting either; guard anyway.
std::string Csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Condition Key(Condition c, bool keep_m, bool keep_replicate, bool keep_bucket) {
  if (!keep_m) c.m = 0;
  if (!keep_replicate) c.replicate = 0;
  if (!keep_bucket) c.bucket.clear();
  return c;
}

}  // namespace

ReportSet BuildReports(std::vector<LossRecord> records, const ReportOptions& options) {
  std::sort(records.begin(), records.end(), [](const LossRecord& a, const LossRecord& b) {
    return std::tie(a.condition, a.string_id) < std::tie(b.condition, b.string_id);
  });
  // state (condition without bucket) -> bucket -> records
  std::map<Condition, std::map<std::string, std::vector<LossRecord>>> states;
  for (LossRecord& r : records) {
    Condition state = WithoutBucket(r.condition);
    states[state][r.condition.bucket].push_back(std::move(r));
  }

  ReportSet out;
  for (const auto& [state, buckets] : states) {
    for (const auto& [bucket, recs] : buckets) {
      const bool any_pos = std::any_of(recs.begin(), recs.end(),
                                       [](const LossRecord& r) { return r.is_positive; });
      const bool all_pos = std::all_of(recs.begin(), recs.end(),
                                       [](const LossRecord& r) { return r.is_positive; });
      if (IsPositiveBucket(bucket) ? !all_pos : any_pos) {
        throw ValidationError(ConditionLabel(recs.front().condition) +
                              ": is_positive disagrees with the bucket");
      }
    }
    auto test = buckets.find("test");
    for (const auto& [bucket, neg] : buckets) {
      if (IsPositiveBucket(bucket)) continue;
      if (test == buckets.end()) {
        throw ValidationError(ConditionLabel(neg.front().condition) +
                              ": negatives without a test bucket");
      }
      const std::vector<LossRecord>& pos = test->second;
      EvalReport rep;
      rep.condition = neg.front().condition;
      rep.auc = DiscriminativeAuc(pos, neg, options.score_mode);
      rep.mean_pos_loss = MeanScore(pos, ScoreMode::kPerToken);
      rep.mean_neg_loss = MeanScore(neg, ScoreMode::kPerToken);
      rep.n_pos = pos.size();
      rep.n_neg = neg.size();
      rep.category = ToString(CategorizeIcl(rep.auc));
      out.reports.push_back(std::move(rep));
    }
  }

  // m* per (..., replicate, bucket) across the m grid.
  std::map<Condition, std::vector<std::size_t>> by_sweep;
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    by_sweep[Key(out.reports[i].condition, false, true, true)].push_back(i);
  }
  std::map<Condition, std::vector<std::size_t>> optimal_by_group;
  for (const auto& [key, idx] : by_sweep) {
    std::vector<int> ms;
    std::vector<double> aucs;
    for (std::size_t i : idx) {
      ms.push_back(out.reports[i].condition.m);
      aucs.push_back(out.reports[i].auc);
    }
    const std::size_t best = idx[SelectOptimal(ms, aucs)];
    for (std::size_t i : idx) out.reports[i].m_star = out.reports[best].condition.m;
    out.reports[best].is_optimal = true;
    optimal_by_group[Key(key, false, false, true)].push_back(best);
  }

  for (const auto& [key, idx] : optimal_by_group) {
    SummaryRow row;
    row.condition = key;
    row.replicates = idx.size();
    row.min_auc = 1.0;
    row.max_auc = 0.0;
    double sum = 0.0;
    for (std::size_t i : idx) {
      const EvalReport& r = out.reports[i];
      sum += r.auc;
      row.min_auc = std::min(row.min_auc, r.auc);
      row.max_auc = std::max(row.max_auc, r.auc);
      row.m_star.push_back(r.condition.m);
    }
    row.mean_auc = sum / static_cast<double>(idx.size());
    row.category = ToString(CategorizeIcl(row.mean_auc));
    out.summary.push_back(std::move(row));
  }

  // FT vs ICL on the same test strings.
  std::map<Condition, std::map<std::string, std::map<std::string, int>>> m_star;
  for (const EvalReport& r : out.reports) {
    if (!r.is_optimal) continue;
    Condition key = r.condition;
    key.mode.clear();
    key.m = 0;
    key.bucket.clear();
    m_star[key][r.condition.mode][r.condition.bucket] = r.condition.m;
  }
  for (const auto& [key, modes] : m_star) {
    auto ft = modes.find("FT");
    auto icl = modes.find("ICL");
    if (ft == modes.end() || icl == modes.end()) continue;
    std::string ref;
    if (ft->second.count("edit1") && icl->second.count("edit1")) {
      ref = "edit1";
    } else {
      for (const auto& [bucket, _] : ft->second) {
        if (icl->second.count(bucket)) {
          ref = bucket;
          break;
        }
      }
    }
    if (ref.empty()) continue;
    CorrelationRow row;
    row.condition = key;
    row.reference_bucket = ref;
    row.m_ft = ft->second.at(ref);
    row.m_icl = icl->second.at(ref);
    Condition a = key, b = key;
    a.mode = "FT";
    a.m = row.m_ft;
    b.mode = "ICL";
    b.m = row.m_icl;
    const auto& test_a = states.at(a).at("test");
    const auto& test_b = states.at(b).at("test");
    row.n = test_a.size();
    try {
      row.pearson = PearsonById(test_a, test_b, ScoreMode::kPerToken);
    } catch (const ValidationError& e) {
      row.note = e.what();
    }
    out.correlations.push_back(std::move(row));
  }

  // ICL limit: grid over n_train at fixed (m, replicate).
  std::map<Condition, std::vector<std::pair<Condition, const std::map<std::string, std::vector<LossRecord>>*>>>
      limit_groups;
  for (const auto& [state, buckets] : states) {
    if (state.mode != "ICL" || !buckets.count("train") || !buckets.count("test")) continue;
    Condition key = state;
    key.n_train = 0;
    limit_groups[key].emplace_back(state, &buckets);
  }
  for (const auto& [key, entries] : limit_groups) {
    std::vector<std::pair<long long, double>> train, test;
    bool finite = true;
    for (const auto& [state, buckets] : entries) {
      try {
        train.emplace_back(static_cast<long long>(state.n_train),
                           GenerativeLoss(buckets->at("train")));
        test.emplace_back(static_cast<long long>(state.n_train),
                          GenerativeLoss(buckets->at("test")));
      } catch (const ValidationError&) {
        finite = false;
        break;
      }
    }
    if (!finite) continue;
    out.icl_limit.push_back({key, IclLimitAnalysis(train, test, options.icl_limit_epsilon)});
  }
  return out;
}

std::string ReportsToJson(const ReportSet& r) {
  ordered_json j;
  ordered_json reports = ordered_json::array();
  for (const EvalReport& e : r.reports) {
    ordered_json row;
    row["condition"] = ConditionToJson(e.condition);
    row["auc"] = e.auc;
    row["mean_pos_loss"] = Num(e.mean_pos_loss);
    row["mean_neg_loss"] = Num(e.mean_neg_loss);
    row["n_pos"] = e.n_pos;
    row["n_neg"] = e.n_neg;
    row["m_star"] = e.m_star;
    row["is_optimal"] = e.is_optimal;
    row["category"] = e.category;
    reports.push_back(std::move(row));
  }
  j["reports"] = std::move(reports);
  ordered_json summary = ordered_json::array();
  for (const SummaryRow& s : r.summary) {
    ordered_json row;
    row["language"] = s.condition.language;
    row["test_language"] = s.condition.test_language;
    row["mode"] = s.condition.mode;
    row["n_train"] = s.condition.n_train;
    row["bucket"] = s.condition.bucket;
    row["replicates"] = s.replicates;
    row["mean_auc"] = s.mean_auc;
    row["min_auc"] = s.min_auc;
    row["max_auc"] = s.max_auc;
    row["m_star"] = s.m_star;
    row["category"] = s.category;
    summary.push_back(std::move(row));
  }
  j["summary"] = std::move(summary);
  ordered_json corr = ordered_json::array();
  for (const CorrelationRow& c : r.correlations) {
    ordered_json row;
    row["language"] = c.condition.language;
    row["test_language"] = c.condition.test_language;
    row["n_train"] = c.condition.n_train;
    row["replicate"] = c.condition.replicate;
    row["reference_bucket"] = c.reference_bucket;
    row["m_ft"] = c.m_ft;
    row["m_icl"] = c.m_icl;
    row["n"] = c.n;
    row["pearson"] = c.pearson ? ordered_json(*c.pearson) : ordered_json(nullptr);
    row["note"] = c.note;
    corr.push_back(std::move(row));
  }
  j["correlations"] = std::move(corr);
  ordered_json limit = ordered_json::array();
  for (const IclLimitRow& l : r.icl_limit) {
    ordered_json row;
    row["language"] = l.condition.language;
    row["test_language"] = l.condition.test_language;
    row["m"] = l.condition.m;
    row["replicate"] = l.condition.replicate;
    ordered_json points = ordered_json::array();
    for (const IclLimitPoint& p : l.report.points) {
      points.push_back({{"n_train", p.x},
                        {"train_loss", p.train_loss},
                        {"test_loss", p.test_loss},
                        {"gap", p.gap},
                        {"converged", p.converged},
                        {"anomaly", p.anomaly}});
    }
    row["points"] = std::move(points);
    row["converged_at"] =
        l.report.converged_at ? ordered_json(*l.report.converged_at) : ordered_json(nullptr);
    row["has_anomaly"] = l.report.has_anomaly;
    limit.push_back(std::move(row));
  }
  j["icl_limit"] = std::move(limit);
  return j.dump(2) + "\n";
}

std::string ReportsToCsv(const std::vector<EvalReport>& rows) {
  std::ostringstream out;
  out << "language,test_language,mode,n_train,replicate,m,bucket,auc,mean_pos_loss,"
         "mean_neg_loss,n_pos,n_neg,m_star,is_optimal,category\n";
  for (const EvalReport& r : rows) {
    const Condition& c = r.condition;
    out << Csv(c.language) << ',' << Csv(c.test_language) << ',' << c.mode << ',' << c.n_train
        << ',' << c.replicate << ',' << c.m << ',' << c.bucket << ',' << FormatNumber(r.auc)
        << ',' << FormatNumber(r.mean_pos_loss) << ',' << FormatNumber(r.mean_neg_loss) << ','
        << r.n_pos << ',' << r.n_neg << ',' << r.m_star << ',' << (r.is_optimal ? "true" : "false") << ','
        << r.category << '\n';
  }
  return out.str();
}

std::string SummaryToCsv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "language,test_language,mode,n_train,bucket,replicates,mean_auc,min_auc,max_auc,"
         "m_star,category\n";
  for (const SummaryRow& s : rows) {
    const Condition& c = s.condition;
    out << Csv(c.language) << ',' << Csv(c.test_language) << ',' << c.mode << ',' << c.n_train
        << ',' << c.bucket << ',' << s.replicates << ',' << FormatNumber(s.mean_auc) << ','
        << FormatNumber(s.min_auc) << ',' << FormatNumber(s.max_auc) << ','
        << JoinInts(s.m_star) << ',' << s.category << '\n';
  }
  return out.str();
}

std::string CorrelationsToCsv(const std::vector<CorrelationRow>& rows) {
  std::ostringstream out;
  out << "language,test_language,n_train,replicate,reference_bucket,m_ft,m_icl,n,pearson\n";
  for (const CorrelationRow& r : rows) {
    const Condition& c = r.condition;
    out << Csv(c.language) << ',' << Csv(c.test_language) << ',' << c.n_train << ','
        << c.replicate << ',' << r.reference_bucket << ',' << r.m_ft << ',' << r.m_icl << ','
        << r.n << ',' << (r.pearson ? FormatNumber(*r.pearson) : "") << '\n';
  }
  return out.str();
}

std::string IclLimitToCsv(const std::vector<IclLimitRow>& rows) {
  std::ostringstream out;
  out << "language,test_language,m,replicate,n_train,train_loss,test_loss,gap,converged,"
         "anomaly\n";
  for (const IclLimitRow& l : rows) {
    const Condition& c = l.condition;
    for (const IclLimitPoint& p : l.report.points) {
      out << Csv(c.language) << ',' << Csv(c.test_language) << ',' << c.m << ','
          << c.replicate << ',' << p.x << ',' << FormatNumber(p.train_loss) << ','
          << FormatNumber(p.test_loss) << ',' << FormatNumber(p.gap) << ','
          << (p.converged ? 1 : 0) << ',' << (p.anomaly ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

void WriteReportFiles(const ReportSet& r, const std::filesystem::path& dir) {
  WriteFile(dir / "reports.json", ReportsToJson(r));
  WriteFile(dir / "reports.csv", ReportsToCsv(r.reports));
  WriteFile(dir / "summary.csv", SummaryToCsv(r.summary));
  WriteFile(dir / "correlations.csv", CorrelationsToCsv(r.correlations));
  WriteFile(dir / "icl_limit.csv", IclLimitToCsv(r.icl_limit));
}

}  // namespace langprof
