#include "dnnd/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnnd/error.hpp"

namespace dnnd {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_gamma_pdf(double x, const GammaPrior& p) {
  if (!(x > 0.0)) return kNegInf;
  return p.shape * std::log(p.rate) - std::lgamma(p.shape) +
         (p.shape - 1.0) * std::log(x) - p.rate * x;
}

double log_beta_pdf(double x, const BetaPrior& p) {
  if (x < 0.0 || x > 1.0) return kNegInf;
  double lb = std::lgamma(p.a) + std::lgamma(p.b) - std::lgamma(p.a + p.b);
  double out = -lb;
  if (p.a != 1.0) out += (p.a - 1.0) * std::log(x);
  if (p.b != 1.0) out += (p.b - 1.0) * std::log1p(-x);
  return out;
}

double log_dirichlet_pdf(std::span<const double> x,
                         std::span<const double> params) {
  if (x.size() != params.size()) {
    throw InvalidStateError("dirichlet density: size mismatch");
  }
  double total = 0.0;
  double out = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(params[k] > 0.0)) return kNegInf;
    total += params[k];
    out += (params[k] - 1.0) * std::log(x[k]) - std::lgamma(params[k]);
  }
  return out + std::lgamma(total);
}

double log_sum_exp(std::span<const double> values) {
  double mx = kNegInf;
  for (double v : values) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : values) s += std::exp(v - mx);
  return mx + std::log(s);
}

void normalize_log_weights(std::vector<double>& values) {
  double lse = log_sum_exp(values);
  for (double& v : values) v = std::exp(v - lse);
}

std::vector<double> sample_dirichlet(std::span<const double> params, Rng& rng) {
  std::vector<double> lg(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    lg[k] = rng.log_gamma(params[k]);
  }
  double lse = log_sum_exp(lg);
  constexpr double tiny = std::numeric_limits<double>::min();
  for (double& v : lg) v = std::max(std::exp(v - lse), tiny);
  return lg;
}

}  // namespace dnnd
