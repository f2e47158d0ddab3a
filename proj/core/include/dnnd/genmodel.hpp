#pragma once

#include <cstdint>
#include <vector>

#include "dnnd/hyper.hpp"
#include "dnnd/model_state.hpp"
#include "dnnd/rng.hpp"
#include "dnnd/types.hpp"

namespace dnnd::gen {

/// n arrival times start, start + spacing, ...
std::vector<double> unit_schedule(std::size_t n, double spacing = 1.0,
                                  double start = 0.0);

/// Output of the DNND forward sampler: the edges together with every
/// latent choice made while producing them.
struct GenTrace {
  std::vector<Edge> edges;
  std::vector<EdgeIndex> follow;
  std::vector<EdgeIndex> cluster;
  std::vector<EdgeIndex> sender_link;
  std::vector<EdgeIndex> recipient_link;
  /// Vertex of each opened table, in opening order (sender before
  /// recipient within an edge).
  std::vector<VertexId> table_vertex;
  std::vector<std::uint32_t> eta;

  std::size_t num_vertices() const { return eta.size(); }

  /// Model state with these latents and h drawn from its conditional
  /// Dirichlet(eta - sigma, gamma + V*sigma).
  ModelState to_state(const HyperParams& hp, Rng& rng) const;
};

GenTrace simulate_dnnd(const HyperParams& hp, const std::vector<double>& times,
                       Rng& rng);

/// Draws endpoint vertices for fixed follow/table links (links must be
/// consistent: each table link stays within its cluster). Every table root
/// takes a vertex from a fresh PY(gamma, sigma) urn; other edges copy the
/// vertex of their link target.
GenTrace draw_vertices(const std::vector<double>& times,
                       std::vector<EdgeIndex> follow,
                       std::vector<EdgeIndex> sender_link,
                       std::vector<EdgeIndex> recipient_link,
                       const HyperParams& hp, Rng& rng);

/// Output of the single-urn ddCRP multigraph sampler. Endpoint slot 2i is
/// the sender of edge i and 2i+1 its recipient; `endpoint_link[p]` is the
/// earlier slot p copied its vertex from, or p for a fresh vertex.
struct PlainTrace {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> endpoint_link;
  std::size_t num_vertices = 0;
};

/// Every endpoint either copies an earlier endpoint q with weight f(d) or
/// takes a fresh vertex with weight tau; the recipient also sees its own
/// edge's sender at distance 0.
PlainTrace simulate_ddcrp_multigraph(const DecayFn& f, double tau,
                                     const std::vector<double>& times,
                                     Rng& rng);

/// max over n = 1..N of (sum_{i<n} f(t_n - t_i)) / n^a.
double assumption_bound_scan(const std::vector<Edge>& edges, const DecayFn& f,
                             double a);

/// Upper bound on sum_{i<n} f(d_{n,i}) for schedules with at most `rate`
/// arrivals in any unit-length interval; infinite for Constant decay.
double arrival_rate_bound(const DecayFn& f, double rate);

}  // namespace dnnd::gen
