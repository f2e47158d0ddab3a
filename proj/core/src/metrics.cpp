#include "dnnd/metrics.hpp"

#include <algorithm>

#include "dnnd/error.hpp"

namespace dnnd::eval {

void ForecastPrediction::validate() const {
  if (pairs.size() != scores.size()) {
    throw InvalidStateError("prediction pairs and scores differ in length");
  }
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[i - 1]) {
      throw InvalidStateError("prediction scores must be non-increasing");
    }
  }
  std::set<Pair> seen(pairs.begin(), pairs.end());
  if (seen.size() != pairs.size()) {
    throw InvalidStateError("prediction pairs must be distinct");
  }
}

ForecastPrediction ForecastPrediction::truncated(std::size_t n) const {
  ForecastPrediction out = *this;
  if (out.pairs.size() > n) {
    out.pairs.resize(n);
    out.scores.resize(n);
  }
  return out;
}

std::set<Pair> distinct_pairs(const std::vector<Edge>& test) {
  std::set<Pair> out;
  for (const Edge& e : test) out.emplace(e.sender, e.recipient);
  return out;
}

namespace {

std::size_t hits_in_top(const ForecastPrediction& pred,
                        const std::set<Pair>& truth, std::size_t k) {
  std::size_t n = std::min(k, pred.pairs.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += truth.count(pred.pairs[i]);
  return hits;
}

}  // namespace

double hits_at_k(const ForecastPrediction& pred, const std::vector<Edge>& test,
                 std::size_t k) {
  if (k == 0) throw ConfigError("k must be >= 1");
  return static_cast<double>(hits_in_top(pred, distinct_pairs(test), k)) /
         static_cast<double>(k);
}

double ap_at_k(const std::vector<ForecastPrediction>& per_sample,
               const std::vector<Edge>& test, std::size_t k) {
  if (k == 0) throw ConfigError("k must be >= 1");
  if (per_sample.empty()) throw ConfigError("AP@k needs at least one sample");
  const auto truth = distinct_pairs(test);
  if (truth.empty()) throw InputError("AP@k is undefined for an empty test set");
  double sum = 0.0;
  for (const auto& pred : per_sample) {
    sum += static_cast<double>(hits_in_top(pred, truth, k)) /
           static_cast<double>(truth.size());
  }
  return sum / static_cast<double>(per_sample.size());
}

double f1_score(const ForecastPrediction& pred, const std::vector<Edge>& test) {
  const auto truth = distinct_pairs(test);
  if (truth.empty()) throw InputError("F1 is undefined for an empty test set");
  if (pred.pairs.empty()) return 0.0;
  const std::size_t tp = hits_in_top(pred, truth, pred.pairs.size());
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / pred.pairs.size();
  const double recall = static_cast<double>(tp) / truth.size();
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace dnnd::eval
