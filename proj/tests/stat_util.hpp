#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>

namespace testutil {

/// Upper-tail p-value of Pearson's statistic for observed counts against
/// expected probabilities. Cells with expectation below `min_expected` are
/// pooled into one.
template <class Key>
double chi_square_pvalue(const std::map<Key, double>& probs,
                         const std::map<Key, long>& counts, long n,
                         double min_expected = 5.0) {
  double stat = 0.0;
  int cells = 0;
  double pooled_e = 0.0;
  long pooled_o = 0;
  for (const auto& [k, p] : probs) {
    auto it = counts.find(k);
    long o = it == counts.end() ? 0 : it->second;
    double e = p * n;
    if (e < min_expected) {
      pooled_e += e;
      pooled_o += o;
      continue;
    }
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  // observations outside the support of `probs`
  long seen = 0;
  for (const auto& [k, o] : counts) {
    if (!probs.count(k)) pooled_o += o;
    seen += o;
  }
  if (pooled_e > 0.0) {
    stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
    ++cells;
  } else if (pooled_o > 0) {
    return 0.0;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

template <class Key>
double total_variation(const std::map<Key, double>& p,
                       const std::map<Key, double>& q) {
  double tv = 0.0;
  for (const auto& [k, x] : p) {
    auto it = q.find(k);
    tv += std::abs(x - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, x] : q) {
    if (!p.count(k)) tv += std::abs(x);
  }
  return 0.5 * tv;
}

}  // namespace testutil
