#pragma once

#include <string>
#include <string_view>

#include "dnnd/types.hpp"

namespace dnnd {

enum class DecayKind { Window, Exponential, Logistic, Constant };

/// Temporal decay f(d): non-negative, non-increasing in the elapsed time d.
///
///   Window       1[d < lambda]
///   Exponential  exp(-d / lambda)
///   Logistic     exp(lambda - d) / (1 + exp(lambda - d))
///   Constant     1 for every finite d
///
/// All kinds evaluate to 0 at d = infinity.
struct DecayFn {
  DecayKind kind = DecayKind::Exponential;
  double lambda = 1.0;

  double operator()(double d) const;

  /// Smallest distance beyond which f is exactly zero in double precision.
  /// Infinite for Constant.
  double support() const;

  bool has_finite_support() const { return kind != DecayKind::Constant; }

  /// True when the scale parameter changes f (everything but Constant).
  bool uses_lambda() const { return kind != DecayKind::Constant; }

  static DecayFn window(double lambda) { return {DecayKind::Window, lambda}; }
  static DecayFn exponential(double lambda) {
    return {DecayKind::Exponential, lambda};
  }
  static DecayFn logistic(double lambda) {
    return {DecayKind::Logistic, lambda};
  }
  static DecayFn constant() { return {DecayKind::Constant, 1.0}; }

  friend bool operator==(const DecayFn&, const DecayFn&) = default;
};

/// Evaluates f at d. Same as f(d); kept as a free function for call sites
/// that read better that way.
inline double decay_eval(const DecayFn& f, double d) { return f(d); }

std::string to_string(DecayKind kind);

/// Accepts "window", "exp"/"exponential", "logistic", "constant".
DecayKind parse_decay_kind(std::string_view name);

}  // namespace dnnd
