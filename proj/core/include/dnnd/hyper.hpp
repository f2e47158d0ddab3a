#pragma once

#include <array>
#include <string>
#include <string_view>

#include "dnnd/decay.hpp"
#include "dnnd/distributions.hpp"

namespace dnnd {

/// Model hyperparameters: cluster concentration alpha, table concentration
/// tau, base-measure concentration gamma, Pitman-Yor discount sigma, and
/// the cluster-level (decay1) and vertex-level (decay2) decay functions.
struct HyperParams {
  double alpha = 1.0;
  double tau = 1.0;
  double gamma = 1.0;
  double sigma = 0.0;
  DecayFn decay1 = DecayFn::exponential(1.0);
  DecayFn decay2 = DecayFn::exponential(1.0);

  /// Throws ConfigError unless alpha, tau, gamma > 0, 0 <= sigma < 1 and
  /// both decay scales are positive.
  void validate() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

enum class Hyper { Alpha, Tau, Gamma, Sigma, Lambda1, Lambda2 };

inline constexpr std::array<Hyper, 6> kAllHypers = {
    Hyper::Alpha, Hyper::Tau,     Hyper::Gamma,
    Hyper::Sigma, Hyper::Lambda1, Hyper::Lambda2};

std::string to_string(Hyper h);
Hyper parse_hyper(std::string_view name);

double get(const HyperParams& hp, Hyper which);
void set(HyperParams& hp, Hyper which, double value);

/// Priors for the Metropolis-Hastings hyperparameter moves. Defaults follow
/// the experimental settings: Gamma(5,1) on alpha and gamma, Gamma(1,1) on
/// tau, Beta(1,1) on sigma and Gamma(50,1) on both decay scales.
struct PriorSpec {
  GammaPrior alpha{5.0, 1.0};
  GammaPrior gamma{5.0, 1.0};
  GammaPrior tau{1.0, 1.0};
  BetaPrior sigma{1.0, 1.0};
  GammaPrior lambda{50.0, 1.0};
  /// Fixed random-walk step for every move; 0 selects the adaptive default
  /// of 0.1 x current value.
  double proposal_step = 0.0;

  void validate() const;

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

/// log prior density of `value` for hyperparameter `which`.
double log_prior(const PriorSpec& priors, Hyper which, double value);

}  // namespace dnnd
