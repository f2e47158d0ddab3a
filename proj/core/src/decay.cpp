#include "dnnd/decay.hpp"

#include <cmath>
#include <string>

#include "dnnd/error.hpp"

namespace dnnd {

double DecayFn::operator()(double d) const {
  if (std::isinf(d)) return 0.0;
  switch (kind) {
    case DecayKind::Window:
      return d < lambda ? 1.0 : 0.0;
    case DecayKind::Exponential:
      if (d >= support()) return 0.0;
      return std::exp(-d / lambda);
    case DecayKind::Logistic: {
      if (d >= support()) return 0.0;
      double x = lambda - d;
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      double e = std::exp(x);
      return e / (1.0 + e);
    }
    case DecayKind::Constant:
      return 1.0;
  }
  return 0.0;
}

double DecayFn::support() const {
  switch (kind) {
    case DecayKind::Window:
      return lambda;
    case DecayKind::Exponential:
      // exp(-746) rounds to zero
      return 746.0 * lambda;
    case DecayKind::Logistic:
      return lambda + 746.0;
    case DecayKind::Constant:
      return kInfinity;
  }
  return kInfinity;
}

std::string to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::Window:
      return "window";
    case DecayKind::Exponential:
      return "exp";
    case DecayKind::Logistic:
      return "logistic";
    case DecayKind::Constant:
      return "constant";
  }
  return "unknown";
}

DecayKind parse_decay_kind(std::string_view name) {
  if (name == "window") return DecayKind::Window;
  if (name == "exp" || name == "exponential") return DecayKind::Exponential;
  if (name == "logistic") return DecayKind::Logistic;
  if (name == "constant") return DecayKind::Constant;
  throw ConfigError("unknown decay kind '" + std::string(name) + "'");
}

}  // namespace dnnd
