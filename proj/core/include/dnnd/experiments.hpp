#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dnnd/hyper.hpp"
#include "dnnd/types.hpp"

namespace dnnd::study {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of y on x. Needs at least 3 points.
SlopeFit ols_fit(std::span<const double> x, std::span<const double> y);

/// Edge counts spaced geometrically (`per_decade` per factor of ten) from
/// `first` up to and including `last`.
std::vector<std::size_t> geometric_checkpoints(std::size_t first,
                                               std::size_t last,
                                               int per_decade = 4);

/// Number of distinct vertices among the first E edges, for each E.
std::vector<std::size_t> vertices_seen(const std::vector<Edge>& edges,
                                       std::span<const std::size_t> prefix);

struct SparsityConfig {
  std::vector<double> sigmas{0.0, 0.3, 0.6, 0.8};
  std::size_t edges = 100000;
  std::size_t seeds = 5;
  std::uint64_t seed = 0;
  /// Settings other than sigma.
  HyperParams base{1.0, 0.2, 1.0, 0.0, DecayFn::window(10.0),
                   DecayFn::window(10.0)};
  /// Smallest edge count used in the fit.
  std::size_t fit_from = 10;
  int per_decade = 4;
};

struct SlopeReport {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  /// (log V, log E) at each checkpoint.
  std::vector<std::pair<double, double>> points;
  SlopeFit fit;
  std::size_t final_vertices = 0;
};

/// Simulates DNND graphs on a unit-spaced schedule and fits the slope of
/// log E against log V, once per (sigma, seed). A run whose vertex count
/// never changes over the fitted range gets an infinite slope.
std::vector<SlopeReport> sparsity_study(const SparsityConfig& cfg);

/// In-degree plus out-degree of every vertex.
std::vector<std::size_t> total_degrees(const std::vector<Edge>& edges);

struct DegreeBin {
  std::size_t lo = 0;  // inclusive
  std::size_t hi = 0;  // exclusive
  std::size_t count = 0;
  /// count / (bin width * number of vertices)
  double density = 0.0;
};

/// Vertices binned by total degree into [2^k, 2^(k+1)).
std::vector<DegreeBin> log_binned_degrees(const std::vector<Edge>& edges);

}  // namespace dnnd::study
