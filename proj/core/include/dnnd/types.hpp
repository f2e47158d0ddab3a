#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace dnnd {

/// Dense vertex identifier, assigned in order of first appearance.
using VertexId = std::uint32_t;

/// Position of an edge in a time-sorted sequence.
using EdgeIndex = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A directed, timestamped interaction.
struct Edge {
  VertexId sender = 0;
  VertexId recipient = 0;
  double time = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Role { Sender, Recipient };

inline VertexId endpoint(const Edge& e, Role role) {
  return role == Role::Sender ? e.sender : e.recipient;
}

/// Number of distinct vertex ids referenced by `edges` (max id + 1).
std::size_t vertex_span(const std::vector<Edge>& edges);

/// Elapsed time from t_j to t_i; infinite when t_j lies in the future of t_i.
inline double distance(double t_i, double t_j) {
  return t_i >= t_j ? t_i - t_j : kInfinity;
}

}  // namespace dnnd
