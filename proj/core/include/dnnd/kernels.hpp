#pragma once

#include <deque>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dnnd/decay.hpp"
#include "dnnd/hyper.hpp"
#include "dnnd/types.hpp"

namespace dnnd {

/// Unnormalized weights for the cluster of edge i given earlier labels.
struct ClusterWeights {
  /// (cluster label, summed decay weight), ascending by label; clusters
  /// whose weight is zero are omitted.
  std::vector<std::pair<EdgeIndex, double>> existing;
  /// Weight of opening a new cluster (alpha).
  double fresh = 0.0;

  double total() const;
  double weight_of(EdgeIndex label) const;
};

ClusterWeights cluster_prior_weights(EdgeIndex i, const std::vector<Edge>& edges,
                                     std::span<const EdgeIndex> z,
                                     const HyperParams& hp);

/// Unnormalized predictive weights of the endpoint in `role` for edge i
/// inside cluster k.
struct VertexWeights {
  std::vector<double> per_vertex;
  /// Weight of a vertex not yet seen (tau * h_plus).
  double fresh = 0.0;

  double total() const;
};

VertexWeights vertex_predictive_weights(EdgeIndex i, Role role, EdgeIndex k,
                                        const std::vector<Edge>& edges,
                                        std::span<const EdgeIndex> z,
                                        const HyperParams& hp,
                                        std::span<const double> h,
                                        double h_plus);

/// Running sums of f(t - t_j) over added points, in total and per vertex.
/// Query and insertion times must be non-decreasing.
class DecayAccumulator {
 public:
  explicit DecayAccumulator(const DecayFn& f) : f_(f) {}

  void add(VertexId v, double t);
  double total(double t);
  double of(VertexId v, double t);
  void clear();

 private:
  struct Mass {
    double value = 0.0;
    double time = 0.0;
  };

  void expire(double t);
  double decayed(const Mass& m, double t) const;

  DecayFn f_;
  std::deque<std::pair<double, VertexId>> live_;
  std::unordered_map<VertexId, Mass> mass_;
  Mass total_;
};

/// log of one endpoint's predictive probability within a cluster:
/// log(tau*h_v + same) - log(tau + all).
double endpoint_log_term(double tau, double h_v, double same, double all);

/// Sequential log-likelihood of a cluster's edges (sender and recipient
/// urns separate) under base weights h. `members` must be ascending.
double cluster_loglik(std::span<const EdgeIndex> members,
                      const std::vector<Edge>& edges, const HyperParams& hp,
                      std::span<const double> h);

/// Sum over edges of log p(c_i): f1(d_{i,c_i}) or alpha, normalized by
/// alpha plus the summed decay weight of all earlier edges.
double log_follow_prior(const std::vector<Edge>& edges,
                        std::span<const EdgeIndex> follow, const DecayFn& f1,
                        double alpha);

}  // namespace dnnd
