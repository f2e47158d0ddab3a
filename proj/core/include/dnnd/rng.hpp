#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace dnnd {

/// Seeded random stream. Every draw constructs its distribution object
/// locally, so the full stream position is captured by the engine state
/// and `state_token()` round-trips exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on [0, n).
  std::uint64_t index(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(engine_);
  }

  double normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
  }

  double gamma(double shape) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(engine_);
  }

  /// log of a Gamma(shape, 1) draw, accurate for very small shapes.
  double log_gamma(double shape);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn proportionally to non-negative `weights`.
  std::size_t categorical(std::span<const double> weights);

  /// Index drawn proportionally to exp(log_weights).
  std::size_t categorical_log(std::span<const double> log_weights);

  /// Independent child stream derived from this one.
  Rng split() { return Rng(engine_()); }

  std::string state_token() const;
  void restore(const std::string& token);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dnnd
