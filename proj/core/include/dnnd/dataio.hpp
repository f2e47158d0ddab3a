#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dnnd/types.hpp"

namespace dnnd::io {

struct TemporalDataset {
  /// Time-sorted edges over dense vertex ids.
  std::vector<Edge> edges;
  /// Raw id of each dense vertex id.
  std::vector<std::int64_t> original_ids;
  /// Slot starts plus the end of the last slot; empty until sliced.
  std::vector<double> slot_boundaries;

  std::size_t vertex_count() const { return original_ids.size(); }
};

/// Reads whitespace-separated "src dst time" lines. Blank lines and lines
/// starting with '#' are skipped. Edges are stably sorted by time and
/// vertices renumbered by first appearance (sender before recipient).
TemporalDataset parse_edge_list(const std::string& path);
TemporalDataset parse_edge_list(std::istream& in, const std::string& source);

/// Writes edges with their raw ids, one per line.
void write_edge_list(const TemporalDataset& ds, std::ostream& out);

/// Builds a dataset from edges whose vertex ids are already dense.
TemporalDataset from_edges(std::vector<Edge> edges);

struct Slot {
  std::size_t index = 0;
  double start = 0.0;
  double end = 0.0;
  /// Edge range [first, last).
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first; }
};

/// Partitions the edges into half-open windows [start, start + duration)
/// beginning at the first timestamp; fills ds.slot_boundaries.
std::vector<Slot> slice_slots(TemporalDataset& ds, double slot_duration);

/// Earliest floor(fraction * n) edges train, the rest test.
std::pair<std::vector<Edge>, std::vector<Edge>> split_train_test(
    std::span<const Edge> edges, double fraction);

/// Train and test edges renumbered so training vertices are 0..V-1 in order
/// of first appearance; test-only vertices follow.
struct Reindexed {
  std::vector<Edge> train;
  std::vector<Edge> test;
  std::size_t train_vertices = 0;
  /// Incoming id of each new id.
  std::vector<VertexId> source_id;
};

Reindexed reindex(std::span<const Edge> train, std::span<const Edge> test);

}  // namespace dnnd::io
