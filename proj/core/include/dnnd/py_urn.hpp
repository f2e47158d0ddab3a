#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dnnd/rng.hpp"
#include "dnnd/types.hpp"

namespace dnnd {

/// Two-parameter (Pitman-Yor) urn over vertices. Each draw opens a table:
/// existing vertex v with weight eta_v - sigma, a fresh vertex with weight
/// gamma + V*sigma, normalized by gamma + T for T tables already open.
/// Fresh vertices receive the next unused id.
class PyUrn {
 public:
  PyUrn(double gamma, double sigma);

  VertexId draw(Rng& rng);

  /// Records a table for v; v == num_vertices() registers a new vertex.
  void add_table(VertexId v);

  double prob_existing(VertexId v) const;
  double prob_new() const;

  std::size_t num_vertices() const { return eta_.size(); }
  std::size_t num_tables() const { return tables_.size(); }
  std::uint32_t count(VertexId v) const { return eta_[v]; }
  const std::vector<std::uint32_t>& counts() const { return eta_; }

 private:
  double gamma_;
  double sigma_;
  std::vector<std::uint32_t> eta_;
  std::vector<VertexId> tables_;
};

/// Expected number of distinct values among k draws from PY(gamma, sigma).
double py_expected_distinct(double gamma, double sigma, std::size_t k);

/// Log probability of a sequence of table labels with per-vertex counts
/// `eta` under the urn (vertices with eta_v = 0 are ignored).
double py_log_eppf(std::span<const std::uint32_t> eta, double gamma,
                   double sigma);

}  // namespace dnnd
