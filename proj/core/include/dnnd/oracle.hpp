#pragma once

#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "dnnd/hyper.hpp"
#include "dnnd/model_state.hpp"
#include "dnnd/types.hpp"

namespace dnnd::oracle {

/// Complete latent assignment for an n-edge sequence. Table vertices are
/// listed in opening order (edge order, sender before recipient) and form a
/// restricted growth string: each label is at most one more than the
/// largest label before it.
struct LatentConfig {
  std::vector<EdgeIndex> follow;
  std::vector<EdgeIndex> sender_link;
  std::vector<EdgeIndex> recipient_link;
  std::vector<VertexId> table_vertex;

  /// Edges implied by the latents at the given times.
  std::vector<Edge> edges(std::span<const double> times) const;

  /// Model state carrying these links, exact eta and uniform h.
  ModelState to_state(std::span<const double> times) const;

  friend bool operator==(const LatentConfig&, const LatentConfig&) = default;
  friend auto operator<=>(const LatentConfig&, const LatentConfig&) = default;
};

inline constexpr std::size_t kMaxEnumerationEdges = 5;
inline constexpr std::size_t kMaxPosteriorEdges = 4;

/// Visits every latent configuration on n edges using at most
/// `vertex_budget` distinct vertices. Throws ConfigError for n > 5.
void for_each_latent(std::size_t n, std::size_t vertex_budget,
                     const std::function<void(const LatentConfig&)>& visit);

std::vector<LatentConfig> enumerate_latents(std::size_t n,
                                            std::size_t vertex_budget);

/// Exact log joint of latents and edges with h integrated out;
/// -infinity when the latents do not produce `edges`.
double exact_joint(const LatentConfig& config, const std::vector<Edge>& edges,
                   const HyperParams& hp);

/// Posterior over latents given edges (n <= 4), with probabilities.
std::vector<std::pair<LatentConfig, double>> exact_posterior(
    const std::vector<Edge>& edges, const HyperParams& hp);

/// Marginal of the follow links under exact_posterior.
std::map<std::vector<EdgeIndex>, double> exact_follow_posterior(
    const std::vector<Edge>& edges, const HyperParams& hp);

/// Endpoint pairs of an edge sequence with vertices relabelled in order
/// of first appearance (sender before recipient).
using Pattern = std::vector<std::pair<VertexId, VertexId>>;

Pattern canonical_pattern(const std::vector<Edge>& edges);

/// Probability of each vertex pattern on the given schedule, restricted
/// to patterns with at most `vertex_budget` vertices.
std::map<Pattern, double> dnnd_pattern_probs(
    std::span<const double> times, const HyperParams& hp,
    std::size_t vertex_budget);

/// Same for the single-urn ddCRP multigraph, by enumerating all endpoint
/// link sequences.
std::map<Pattern, double> plain_pattern_probs(std::span<const double> times,
                                              const DecayFn& f, double tau);

/// Direct O(m^2) sequential cluster log-likelihood.
double naive_cluster_loglik(std::span<const EdgeIndex> members,
                            const std::vector<Edge>& edges,
                            const HyperParams& hp, std::span<const double> h);

/// Conditional of c_i given everything else, with the edge likelihood
/// recomputed from scratch for every candidate j: (j, probability).
std::vector<std::pair<EdgeIndex, double>> naive_follow_conditional(
    EdgeIndex i, const std::vector<Edge>& edges, const ModelState& state,
    const HyperParams& hp);

/// Predictive distribution of the `role` endpoint of edge i in cluster k
/// given h, by summing over all table links of the cluster's earlier
/// edges. Returns per-vertex probabilities plus the unseen-vertex mass.
std::pair<std::vector<double>, double> vertex_predictive(
    EdgeIndex i, Role role, EdgeIndex k, const std::vector<Edge>& edges,
    std::span<const EdgeIndex> z, const HyperParams& hp,
    std::span<const double> h, double h_plus);

/// Exact log P(test | training latents, h) by summing over every follow
/// link and table link of the test edges. Test vertex ids at or above
/// state.h.size() are unseen in training.
double exact_heldout_logprob(const std::vector<Edge>& train,
                             const ModelState& state, const HyperParams& hp,
                             const std::vector<Edge>& test);

}  // namespace dnnd::oracle
