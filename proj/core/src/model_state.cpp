#include "dnnd/model_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dnnd/error.hpp"

namespace dnnd {

std::size_t vertex_span(const std::vector<Edge>& edges) {
  std::size_t span = 0;
  for (const Edge& e : edges) {
    span = std::max<std::size_t>(span, std::max(e.sender, e.recipient) + 1);
  }
  return span;
}

std::vector<EdgeIndex> root_labels(std::span<const EdgeIndex> links) {
  std::vector<EdgeIndex> out(links.size());
  for (EdgeIndex i = 0; i < links.size(); ++i) {
    out[i] = links[i] == i ? i : out[links[i]];
  }
  return out;
}

std::size_t count_roots(std::span<const EdgeIndex> links) {
  std::size_t n = 0;
  for (EdgeIndex i = 0; i < links.size(); ++i) n += links[i] == i;
  return n;
}

std::vector<std::uint32_t> table_counts(const std::vector<Edge>& edges,
                                        const ModelState& state,
                                        std::size_t num_vertices) {
  std::vector<std::uint32_t> eta(num_vertices, 0);
  for (EdgeIndex i = 0; i < edges.size(); ++i) {
    if (state.sender_link[i] == i) ++eta[edges[i].sender];
    if (state.recipient_link[i] == i) ++eta[edges[i].recipient];
  }
  return eta;
}

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw InvalidStateError("invalid model state: " + what);
}

void check_links(std::span<const EdgeIndex> links, const char* name) {
  for (EdgeIndex i = 0; i < links.size(); ++i) {
    if (links[i] > i) {
      fail(std::string(name) + "[" + std::to_string(i) + "] points forward");
    }
  }
}

}  // namespace

void validate_state(const ModelState& state, const std::vector<Edge>& edges,
                    const ValidateOptions& opts) {
  const std::size_t n = edges.size();
  if (state.follow.size() != n || state.sender_link.size() != n ||
      state.recipient_link.size() != n) {
    fail("link vectors do not match the edge count");
  }
  check_links(state.follow, "follow");
  check_links(state.sender_link, "sender_link");
  check_links(state.recipient_link, "recipient_link");

  const auto z = root_labels(state.follow);
  for (EdgeIndex i = 0; i < n; ++i) {
    EdgeIndex j = state.sender_link[i];
    if (edges[j].sender != edges[i].sender) {
      fail("sender table of edge " + std::to_string(i) + " mixes vertices");
    }
    if (opts.tables_within_clusters && z[j] != z[i]) {
      fail("sender table of edge " + std::to_string(i) + " crosses clusters");
    }
    j = state.recipient_link[i];
    if (edges[j].recipient != edges[i].recipient) {
      fail("recipient table of edge " + std::to_string(i) + " mixes vertices");
    }
    if (opts.tables_within_clusters && z[j] != z[i]) {
      fail("recipient table of edge " + std::to_string(i) +
           " crosses clusters");
    }
  }

  const std::size_t nv = vertex_span(edges);
  if (state.h.size() < nv || state.eta.size() != state.h.size()) {
    fail("h/eta sizes do not cover the vertex set");
  }
  if (table_counts(edges, state, state.eta.size()) != state.eta) {
    fail("eta does not match the occupied tables");
  }
  double sum = state.h_plus;
  if (!(state.h_plus >= 0.0)) fail("negative h_plus");
  for (double v : state.h) {
    if (!(v >= 0.0)) fail("negative entry in h");
    sum += v;
  }
  if (std::abs(sum - 1.0) > opts.h_tolerance) {
    fail("h does not sum to one (sum = " + std::to_string(sum) + ")");
  }
}

ModelState initial_state(const std::vector<Edge>& edges, const HyperParams& hp,
                         InitMode mode, Rng& rng) {
  const std::size_t n = edges.size();
  ModelState s;
  s.follow.resize(n);
  s.sender_link.resize(n);
  s.recipient_link.resize(n);
  std::iota(s.sender_link.begin(), s.sender_link.end(), EdgeIndex{0});
  std::iota(s.recipient_link.begin(), s.recipient_link.end(), EdgeIndex{0});

  for (EdgeIndex i = 0; i < n; ++i) {
    switch (mode) {
      case InitMode::Singleton:
        s.follow[i] = i;
        break;
      case InitMode::Star:
        s.follow[i] =
            hp.decay1(distance(edges[i].time, edges[0].time)) > 0.0 ? 0 : i;
        break;
      case InitMode::Random: {
        std::vector<EdgeIndex> options{i};
        for (EdgeIndex j = i; j-- > 0;) {
          double d = distance(edges[i].time, edges[j].time);
          if (d >= hp.decay1.support()) break;
          if (hp.decay1(d) > 0.0) options.push_back(j);
        }
        s.follow[i] = options[rng.index(options.size())];
        break;
      }
    }
  }

  const std::size_t nv = vertex_span(edges);
  s.h.assign(nv, 1.0 / static_cast<double>(nv + 1));
  s.h_plus = 1.0 - static_cast<double>(nv) / static_cast<double>(nv + 1);
  s.eta = table_counts(edges, s, nv);
  return s;
}

}  // namespace dnnd
