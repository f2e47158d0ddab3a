#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dnnd/hyper.hpp"
#include "dnnd/rng.hpp"
#include "dnnd/types.hpp"

namespace dnnd {

/// Latent state of the sampler for one edge sequence.
///
/// Follow links c and table links g^s, g^r all point backwards in time or to
/// the edge itself. A cluster is a tree of follow links; its label is the
/// index of the root (the earliest member). A sender table is a tree of
/// sender links restricted to one vertex, and likewise for recipients; every
/// table root opens a table and contributes one to eta of its vertex.
struct ModelState {
  std::vector<EdgeIndex> follow;
  std::vector<EdgeIndex> sender_link;
  std::vector<EdgeIndex> recipient_link;
  /// Base-measure weights, one per vertex id, plus the unseen mass.
  std::vector<double> h;
  double h_plus = 1.0;
  std::vector<std::uint32_t> eta;

  std::size_t num_edges() const { return follow.size(); }

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Root of each element under a backward-pointing link vector.
std::vector<EdgeIndex> root_labels(std::span<const EdgeIndex> links);

std::size_t count_roots(std::span<const EdgeIndex> links);

/// Number of occupied sender plus recipient tables per vertex.
std::vector<std::uint32_t> table_counts(const std::vector<Edge>& edges,
                                        const ModelState& state,
                                        std::size_t num_vertices);

struct ValidateOptions {
  /// Require each table link to stay inside its edge's cluster. Off when
  /// checking a state between the follow sweep and the next table sweep.
  bool tables_within_clusters = true;
  double h_tolerance = 1e-12;
};

/// Throws InvalidStateError naming the first violated invariant.
void validate_state(const ModelState& state, const std::vector<Edge>& edges,
                    const ValidateOptions& opts = {});

enum class InitMode {
  /// Every edge follows the first edge (falls back to a self link when the
  /// first edge is outside the cluster decay's support).
  Star,
  /// Every edge opens its own cluster.
  Singleton,
  /// Each edge follows a uniformly chosen admissible earlier edge or itself.
  Random,
};

/// Builds a starting state: follows per `mode`, every edge opening its own
/// sender and recipient tables, and uniform h over vertices plus h_plus.
ModelState initial_state(const std::vector<Edge>& edges, const HyperParams& hp,
                         InitMode mode, Rng& rng);

}  // namespace dnnd
