#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "dnnd/types.hpp"

namespace dnnd::eval {

using Pair = std::pair<VertexId, VertexId>;

/// Ranked, distinct (sender, recipient) pairs with non-increasing scores.
struct ForecastPrediction {
  std::vector<Pair> pairs;
  std::vector<double> scores;
  /// Number of test edges the forecast was made for.
  std::size_t n_test = 0;

  /// Checks the ordering and distinctness invariants.
  void validate() const;
  /// Keeps the first `n` pairs.
  ForecastPrediction truncated(std::size_t n) const;
};

std::set<Pair> distinct_pairs(const std::vector<Edge>& test);

/// |top-k ∩ distinct test pairs| / k.
double hits_at_k(const ForecastPrediction& pred, const std::vector<Edge>& test,
                 std::size_t k);

/// Mean over samples of |top-k ∩ distinct test pairs| / |distinct test pairs|.
double ap_at_k(const std::vector<ForecastPrediction>& per_sample,
               const std::vector<Edge>& test, std::size_t k);

/// Harmonic mean of precision (over all predicted pairs) and recall (over
/// distinct test pairs); 0 when nothing is correct.
double f1_score(const ForecastPrediction& pred, const std::vector<Edge>& test);

}  // namespace dnnd::eval
