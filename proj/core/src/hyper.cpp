#include "dnnd/hyper.hpp"

#include <string>

#include "dnnd/error.hpp"

namespace dnnd {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) {
    throw ConfigError(std::string(name) + " must be positive, got " +
                      std::to_string(v));
  }
}

}  // namespace

void HyperParams::validate() const {
  require_positive(alpha, "alpha");
  require_positive(tau, "tau");
  require_positive(gamma, "gamma");
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw ConfigError("sigma must lie in [0, 1), got " + std::to_string(sigma));
  }
  require_positive(decay1.lambda, "lambda1");
  require_positive(decay2.lambda, "lambda2");
}

void PriorSpec::validate() const {
  require_positive(alpha.shape, "alpha prior shape");
  require_positive(alpha.rate, "alpha prior rate");
  require_positive(gamma.shape, "gamma prior shape");
  require_positive(gamma.rate, "gamma prior rate");
  require_positive(tau.shape, "tau prior shape");
  require_positive(tau.rate, "tau prior rate");
  require_positive(sigma.a, "sigma prior a");
  require_positive(sigma.b, "sigma prior b");
  require_positive(lambda.shape, "lambda prior shape");
  require_positive(lambda.rate, "lambda prior rate");
  if (proposal_step < 0.0) throw ConfigError("proposal step must be >= 0");
}

std::string to_string(Hyper h) {
  switch (h) {
    case Hyper::Alpha:
      return "alpha";
    case Hyper::Tau:
      return "tau";
    case Hyper::Gamma:
      return "gamma";
    case Hyper::Sigma:
      return "sigma";
    case Hyper::Lambda1:
      return "lambda1";
    case Hyper::Lambda2:
      return "lambda2";
  }
  return "unknown";
}

Hyper parse_hyper(std::string_view name) {
  for (Hyper h : kAllHypers) {
    if (to_string(h) == name) return h;
  }
  throw ConfigError("unknown hyperparameter '" + std::string(name) + "'");
}

double get(const HyperParams& hp, Hyper which) {
  switch (which) {
    case Hyper::Alpha:
      return hp.alpha;
    case Hyper::Tau:
      return hp.tau;
    case Hyper::Gamma:
      return hp.gamma;
    case Hyper::Sigma:
      return hp.sigma;
    case Hyper::Lambda1:
      return hp.decay1.lambda;
    case Hyper::Lambda2:
      return hp.decay2.lambda;
  }
  return 0.0;
}

void set(HyperParams& hp, Hyper which, double value) {
  switch (which) {
    case Hyper::Alpha:
      hp.alpha = value;
      break;
    case Hyper::Tau:
      hp.tau = value;
      break;
    case Hyper::Gamma:
      hp.gamma = value;
      break;
    case Hyper::Sigma:
      hp.sigma = value;
      break;
    case Hyper::Lambda1:
      hp.decay1.lambda = value;
      break;
    case Hyper::Lambda2:
      hp.decay2.lambda = value;
      break;
  }
}

double log_prior(const PriorSpec& priors, Hyper which, double value) {
  switch (which) {
    case Hyper::Alpha:
      return log_gamma_pdf(value, priors.alpha);
    case Hyper::Tau:
      return log_gamma_pdf(value, priors.tau);
    case Hyper::Gamma:
      return log_gamma_pdf(value, priors.gamma);
    case Hyper::Sigma:
      if (value >= 1.0) return -kInfinity;
      return log_beta_pdf(value, priors.sigma);
    case Hyper::Lambda1:
    case Hyper::Lambda2:
      return log_gamma_pdf(value, priors.lambda);
  }
  return -kInfinity;
}

}  // namespace dnnd
