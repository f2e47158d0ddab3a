#include "dnnd/py_urn.hpp"

#include <cmath>

#include "dnnd/error.hpp"

namespace dnnd {

PyUrn::PyUrn(double gamma, double sigma) : gamma_(gamma), sigma_(sigma) {
  if (!(gamma > 0.0) || !(sigma >= 0.0 && sigma < 1.0)) {
    throw ConfigError("urn needs gamma > 0 and 0 <= sigma < 1");
  }
}

double PyUrn::prob_existing(VertexId v) const {
  return (eta_[v] - sigma_) / (gamma_ + static_cast<double>(tables_.size()));
}

double PyUrn::prob_new() const {
  return (gamma_ + static_cast<double>(eta_.size()) * sigma_) /
         (gamma_ + static_cast<double>(tables_.size()));
}

void PyUrn::add_table(VertexId v) {
  if (v == eta_.size()) {
    eta_.push_back(0);
  } else if (v > eta_.size()) {
    throw InvalidStateError("urn vertex ids must be dense");
  }
  ++eta_[v];
  tables_.push_back(v);
}

VertexId PyUrn::draw(Rng& rng) {
  VertexId v = static_cast<VertexId>(eta_.size());
  if (!tables_.empty() && !rng.bernoulli(prob_new())) {
    // a uniform table picks v with probability eta_v / T; thinning by
    // (eta_v - sigma) / eta_v leaves weights eta_v - sigma
    for (;;) {
      VertexId u = tables_[rng.index(tables_.size())];
      if (sigma_ == 0.0 || rng.uniform() * eta_[u] < eta_[u] - sigma_) {
        v = u;
        break;
      }
    }
  }
  add_table(v);
  return v;
}

double py_expected_distinct(double gamma, double sigma, std::size_t k) {
  const double kk = static_cast<double>(k);
  if (sigma == 0.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += gamma / (gamma + i);
    return s;
  }
  double lr = std::lgamma(gamma + kk + sigma) + std::lgamma(gamma + 1.0) -
              std::lgamma(gamma + kk) - std::lgamma(gamma + sigma);
  return std::exp(lr) / sigma - gamma / sigma;
}

double py_log_eppf(std::span<const std::uint32_t> eta, double gamma,
                   double sigma) {
  std::size_t nv = 0;
  std::size_t nt = 0;
  double out = 0.0;
  for (std::uint32_t c : eta) {
    if (c == 0) continue;
    ++nv;
    nt += c;
    out += std::lgamma(c - sigma) - std::lgamma(1.0 - sigma);
  }
  if (nt == 0) return 0.0;
  for (std::size_t l = 1; l < nv; ++l) out += std::log(gamma + l * sigma);
  out -= std::lgamma(gamma + static_cast<double>(nt)) - std::lgamma(gamma + 1.0);
  return out;
}

}  // namespace dnnd
