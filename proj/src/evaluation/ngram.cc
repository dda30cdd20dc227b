#include "langprof/evaluation/ngram.h"

#include <cmath>
#include <cstring>

#include "langprof/errors.h"

namespace langprof {
namespace {

constexpr int kBeginId = 0;
constexpr int kEndId = 1;
constexpr int kUnknownId = -1;

}  // namespace

NgramModel::NgramModel(const std::vector<std::string>& vocabulary, NgramOptions options)
    : options_(options) {
  if (options_.order < 1) throw ValidationError("n-gram order must be at least 1");
  if (!(options_.smoothing > 0.0)) throw ValidationError("n-gram smoothing must be positive");
  ids_[std::string(kBegin)] = kBeginId;
  ids_[std::string(kEnd)] = kEndId;
  int next = 2;
  for (const std::string& t : vocabulary) {
    if (!ids_.emplace(t, next).second) {
      throw ValidationError("n-gram vocabulary token '" + t + "' is duplicated or reserved");
    }
    ++next;
  }
  vocab_size_ = vocabulary.size() + 1;  // plus the end marker
}

int NgramModel::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnknownId : it->second;
}

std::string NgramModel::Key(std::span<const int> context) const {
  std::string key(context.size() * sizeof(int), '\0');
  if (key.empty()) return key;
  std::memcpy(key.data(), context.data(), key.size());
  return key;
}

void NgramModel::Observe(std::span<const int> ids, double weight) {
  const std::size_t h = static_cast<std::size_t>(options_.order - 1);
  for (std::size_t i = h; i < ids.size(); ++i) {
    ContextCounts& c = counts_[Key(ids.subspan(i - h, h))];
    c.total += weight;
    c.next[ids[i]] += weight;
  }
}

void NgramModel::AddString(std::span<const std::string> tokens, double weight) {
  std::vector<int> ids(options_.order - 1, kBeginId);
  for (const std::string& t : tokens) ids.push_back(Id(t));
  ids.push_back(kEndId);
  Observe(ids, weight);
}

void NgramModel::AddStream(std::span<const std::string> tokens, double weight) {
  std::vector<int> ids(options_.order - 1, kBeginId);
  for (const std::string& t : tokens) ids.push_back(Id(t));
  Observe(ids, weight);
}

double NgramModel::Prob(std::span<const int> context, int token) const {
  const double k = options_.smoothing;
  const double v = static_cast<double>(vocab_size_);
  auto it = counts_.find(Key(context));
  if (it == counts_.end()) return 1.0 / v;
  auto jt = it->second.next.find(token);
  const double c = jt == it->second.next.end() ? 0.0 : jt->second;
  return (c + k) / (it->second.total + k * v);
}

double NgramModel::Probability(std::span<const std::string> context,
                               std::string_view token) const {
  const std::size_t h = static_cast<std::size_t>(options_.order - 1);
  std::vector<int> ids(h, kBeginId);
  for (const std::string& t : context) ids.push_back(Id(t));
  std::span<const int> all(ids);
  return Prob(all.subspan(all.size() - h, h), Id(token));
}

std::vector<double> NgramModel::ScoreIds(std::vector<int> context,
                                         std::span<const std::string> target) const {
  const std::size_t h = static_cast<std::size_t>(options_.order - 1);
  std::vector<double> out;
  out.reserve(target.size());
  auto step = [&](int id) {
    std::span<const int> all(context);
    double p = Prob(all.subspan(all.size() - h, h), id);
    context.push_back(id);
    return -std::log(p);
  };
  for (const std::string& t : target) out.push_back(step(Id(t)));
  if (options_.include_end && !out.empty()) out.back() += step(kEndId);
  return out;
}

std::vector<double> NgramModel::ScoreString(std::span<const std::string> target) const {
  return ScoreIds(std::vector<int>(options_.order - 1, kBeginId), target);
}

std::vector<double> NgramModel::ScoreContinuation(std::span<const std::string> history,
                                                  std::span<const std::string> target) const {
  const std::size_t h = static_cast<std::size_t>(options_.order - 1);
  std::vector<int> context(h, kBeginId);
  const std::size_t from = history.size() > h ? history.size() - h : 0;
  for (std::size_t i = from; i < history.size(); ++i) context.push_back(Id(history[i]));
  return ScoreIds(std::move(context), target);
}

namespace {

ScoreResult FromPerToken(std::vector<double> per_token) {
  ScoreResult r;
  for (double x : per_token) r.total_neglogprob += x;
  r.per_token = std::move(per_token);
  return r;
}

class FineTunedNgram : public StringScorer {
 public:
  explicit FineTunedNgram(NgramModel model) : model_(std::move(model)) {}
  ScoreResult Score(std::string_view, std::span<const std::string> target) const override {
    return FromPerToken(model_.ScoreString(target));
  }

 private:
  NgramModel model_;
};

class InContextNgram : public StringScorer {
 public:
  InContextNgram(NgramModel model, std::vector<std::string> history)
      : model_(std::move(model)), history_(std::move(history)) {}
  ScoreResult Score(std::string_view, std::span<const std::string> target) const override {
    return FromPerToken(model_.ScoreContinuation(history_, target));
  }

 private:
  NgramModel model_;
  std::vector<std::string> history_;  // prompt tail, order-1 tokens
};

}  // namespace

NgramScorer::NgramScorer(std::vector<std::string> alphabet, std::string separator,
                         NgramOptions options)
    : alphabet_(std::move(alphabet)), separator_(std::move(separator)), options_(options) {
  NgramModel probe(alphabet_, options_);  // validates options and alphabet
}

ScorerDescriptor NgramScorer::descriptor() const {
  ScorerDescriptor d;
  d.name = std::to_string(options_.order) + "-gram";
  d.kind = "ngram";
  d.vocabulary_info =
      "grammar alphabet plus end marker; ICL adds the separator '" + separator_ + "'";
  d.config["order"] = options_.order;
  d.config["smoothing"] = options_.smoothing;
  d.config["include_end"] = options_.include_end;
  return d;
}

std::unique_ptr<StringScorer> NgramScorer::Prepare(const ScoringContext& context) const {
  if (context.mode == "FT") {
    if (context.train.empty()) throw ValidationError("n-gram: empty training corpus");
    NgramModel model(alphabet_, options_);
    for (const TokenSeq& s : context.train) model.AddString(s, static_cast<double>(context.m));
    return std::make_unique<FineTunedNgram>(std::move(model));
  }
  if (context.mode == "ICL") {
    if (context.prompt_prefix.empty()) throw ValidationError("n-gram: empty prompt");
    std::vector<std::string> vocab = alphabet_;
    vocab.push_back(separator_);
    NgramModel model(vocab, options_);
    model.AddStream(context.prompt_prefix);
    const std::size_t h = static_cast<std::size_t>(options_.order - 1);
    const auto& p = context.prompt_prefix;
    std::vector<std::string> tail(p.end() - static_cast<std::ptrdiff_t>(std::min(h, p.size())),
                                  p.end());
    return std::make_unique<InContextNgram>(std::move(model), std::move(tail));
  }
  throw ValidationError("n-gram: unknown mode '" + context.mode + "'");
}

}  // namespace langprof
