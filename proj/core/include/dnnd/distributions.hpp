#pragma once

#include <span>
#include <vector>

#include "dnnd/rng.hpp"

namespace dnnd {

/// Gamma prior in (shape, rate) form.
struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
  friend bool operator==(const GammaPrior&, const GammaPrior&) = default;
};

struct BetaPrior {
  double a = 1.0;
  double b = 1.0;
  friend bool operator==(const BetaPrior&, const BetaPrior&) = default;
};

double log_gamma_pdf(double x, const GammaPrior& p);
double log_beta_pdf(double x, const BetaPrior& p);

/// log Dirichlet(x | params); x and params have equal length.
double log_dirichlet_pdf(std::span<const double> x,
                         std::span<const double> params);

double log_sum_exp(std::span<const double> values);

/// Normalizes log-weights in place into probabilities (max-subtraction).
void normalize_log_weights(std::vector<double>& values);

/// Dirichlet draw; entries are clamped to the smallest positive normal
/// double so their logs stay finite.
std::vector<double> sample_dirichlet(std::span<const double> params, Rng& rng);

}  // namespace dnnd
