#pragma once

#include <cstdint>
#include <vector>

#include "dnnd/inference.hpp"
#include "dnnd/metrics.hpp"
#include "dnnd/types.hpp"

namespace dnnd::eval {

struct LtrConfig {
  std::size_t particles = 100;
  std::uint64_t seed = 0;
  /// Redraw every particle's latent path over earlier test edges before
  /// scoring each edge, instead of extending one path per particle.
  bool redraw_prefix = false;

  void validate() const;
};

struct LtrResult {
  /// Per test edge: log of the particle-averaged predictive, averaged over
  /// posterior samples.
  std::vector<double> edge_log;
  /// Sum of edge_log.
  double total = 0.0;
  /// Total for each posterior sample.
  std::vector<double> sample_total;
};

/// Left-to-right estimate of log P(test | training latents). Training
/// latents are frozen per posterior sample; each particle carries the
/// cluster of every earlier test edge and table counts of unseen vertices.
/// Test vertex ids at or above a sample's h.size() are unseen in training.
LtrResult left_to_right_loglik(const std::vector<Edge>& train,
                               const std::vector<infer::PosteriorSample>& samples,
                               const std::vector<Edge>& test,
                               const LtrConfig& cfg);

/// Same estimator for one posterior sample with an explicit stream.
std::vector<double> left_to_right_sample(const std::vector<Edge>& train,
                                         const infer::PosteriorSample& sample,
                                         const std::vector<Edge>& test,
                                         std::size_t particles,
                                         bool redraw_prefix, Rng& rng);

/// Predictive distribution of the next edge at time t over pairs of
/// training vertices, with all mass involving an unseen vertex lumped into
/// `novel`.
struct EdgePredictive {
  std::size_t num_vertices = 0;
  /// Row-major num_vertices x num_vertices.
  std::vector<double> prob;
  double novel = 0.0;

  double at(VertexId u, VertexId v) const {
    return prob[static_cast<std::size_t>(u) * num_vertices + v];
  }
  double total() const;
};

EdgePredictive edge_predictive(const std::vector<Edge>& train,
                               const infer::PosteriorSample& sample, double t);

/// Top `limit` pairs of a predictive matrix; ties broken by (sender,
/// recipient) ascending.
ForecastPrediction rank_pairs(const EdgePredictive& pred, std::size_t limit,
                              std::size_t n_test);

struct Forecast {
  /// Ranked by the sample-averaged predictive.
  ForecastPrediction averaged;
  std::vector<ForecastPrediction> per_sample;
};

/// Scores every pair at the time of the first test edge using up to
/// `max_samples` posterior samples (the most recent ones).
Forecast forecast(const std::vector<Edge>& train,
                  const std::vector<infer::PosteriorSample>& samples,
                  const std::vector<Edge>& test, std::size_t limit,
                  std::size_t max_samples = 10);

}  // namespace dnnd::eval
