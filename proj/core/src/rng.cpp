#include "dnnd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dnnd/error.hpp"

namespace dnnd {

double Rng::log_gamma(double shape) {
  if (shape >= 1.0) return std::log(gamma(shape));
  // G(a) = G(a + 1) * U^(1/a)
  double u = uniform();
  while (u == 0.0) u = uniform();
  return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidStateError("categorical draw over non-positive total weight");
  }
  double u = uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    if (u < weights[k]) return k;
    u -= weights[k];
  }
  return last_positive;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) mx = std::max(mx, lw);
  if (!std::isfinite(mx)) {
    throw InvalidStateError("categorical draw with no finite log-weight");
  }
  std::vector<double> w(log_weights.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(log_weights[k] - mx);
  }
  return categorical(w);
}

std::string Rng::state_token() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore(const std::string& token) {
  std::istringstream is(token);
  std::mt19937_64 engine;
  is >> engine;
  if (is.fail()) throw CheckpointError("malformed RNG state token");
  engine_ = engine;
}

}  // namespace dnnd
