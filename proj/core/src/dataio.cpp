#include "dnnd/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dnnd/error.hpp"

namespace dnnd::io {

namespace {

struct RawEdge {
  std::int64_t src;
  std::int64_t dst;
  double time;
};

template <class T>
bool parse_token(std::string_view tok, T& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

TemporalDataset build(std::vector<RawEdge> raw) {
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawEdge& a, const RawEdge& b) { return a.time < b.time; });
  TemporalDataset ds;
  std::unordered_map<std::int64_t, VertexId> ids;
  auto dense = [&](std::int64_t v) {
    auto [it, fresh] = ids.emplace(v, static_cast<VertexId>(ids.size()));
    if (fresh) ds.original_ids.push_back(v);
    return it->second;
  };
  ds.edges.reserve(raw.size());
  for (const RawEdge& r : raw) {
    VertexId s = dense(r.src);
    VertexId d = dense(r.dst);
    ds.edges.push_back(Edge{s, d, r.time});
  }
  return ds;
}

}  // namespace

TemporalDataset parse_edge_list(std::istream& in, const std::string& source) {
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
    if (toks.size() != 3) {
      throw InputError(where() + "expected 3 fields (src dst time), found " +
                       std::to_string(toks.size()));
    }
    RawEdge e{};
    if (!parse_token(toks[0], e.src) || !parse_token(toks[1], e.dst)) {
      throw InputError(where() + "vertex ids must be integers");
    }
    if (!parse_token(toks[2], e.time) || !std::isfinite(e.time)) {
      throw InputError(where() + "timestamp is not a finite number");
    }
    raw.push_back(e);
  }
  if (in.bad()) throw InputError(source + ": read error");
  if (raw.empty()) throw InputError(source + ": no edges found");
  return build(std::move(raw));
}

TemporalDataset parse_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list '" + path + "'");
  return parse_edge_list(in, path);
}

void write_edge_list(const TemporalDataset& ds, std::ostream& out) {
  char buf[64];
  for (const Edge& e : ds.edges) {
    auto res = std::to_chars(buf, buf + sizeof buf, e.time);
    out << ds.original_ids[e.sender] << ' ' << ds.original_ids[e.recipient] << ' '
        << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

TemporalDataset from_edges(std::vector<Edge> edges) {
  TemporalDataset ds;
  ds.edges = std::move(edges);
  const std::size_t nv = vertex_span(ds.edges);
  ds.original_ids.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) ds.original_ids[v] = static_cast<std::int64_t>(v);
  return ds;
}

std::vector<Slot> slice_slots(TemporalDataset& ds, double slot_duration) {
  if (!(slot_duration > 0.0)) throw ConfigError("slot duration must be positive");
  std::vector<Slot> slots;
  ds.slot_boundaries.clear();
  if (ds.edges.empty()) return slots;
  const double t0 = ds.edges.front().time;
  auto start_of = [&](std::size_t k) { return t0 + slot_duration * static_cast<double>(k); };
  std::size_t i = 0;
  for (std::size_t k = 0; i < ds.edges.size(); ++k) {
    Slot s;
    s.index = k;
    s.start = start_of(k);
    s.end = start_of(k + 1);
    s.first = i;
    while (i < ds.edges.size() && ds.edges[i].time < s.end) ++i;
    s.last = i;
    slots.push_back(s);
    ds.slot_boundaries.push_back(s.start);
  }
  ds.slot_boundaries.push_back(slots.back().end);
  return slots;
}

std::pair<std::vector<Edge>, std::vector<Edge>> split_train_test(
    std::span<const Edge> edges, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1]");
  }
  auto n_train = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(edges.size()) + 1e-9));
  n_train = std::min(n_train, edges.size());
  return {std::vector<Edge>(edges.begin(), edges.begin() + n_train),
          std::vector<Edge>(edges.begin() + n_train, edges.end())};
}

Reindexed reindex(std::span<const Edge> train, std::span<const Edge> test) {
  Reindexed out;
  std::unordered_map<VertexId, VertexId> ids;
  auto dense = [&](VertexId v) {
    auto [it, fresh] = ids.emplace(v, static_cast<VertexId>(ids.size()));
    if (fresh) out.source_id.push_back(v);
    return it->second;
  };
  for (const Edge& e : train) {
    VertexId s = dense(e.sender);
    VertexId r = dense(e.recipient);
    out.train.push_back(Edge{s, r, e.time});
  }
  out.train_vertices = ids.size();
  for (const Edge& e : test) {
    VertexId s = dense(e.sender);
    VertexId r = dense(e.recipient);
    out.test.push_back(Edge{s, r, e.time});
  }
  return out;
}

}  // namespace dnnd::io
