#include "dnnd/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dnnd/distributions.hpp"
#include "dnnd/error.hpp"
#include "dnnd/kernels.hpp"
#include "dnnd/py_urn.hpp"

namespace dnnd::gen {

std::vector<double> unit_schedule(std::size_t n, double spacing, double start) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = start + spacing * i;
  return t;
}

namespace {

void check_schedule(const std::vector<double>& times) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) {
      throw InputError("arrival schedule must be non-decreasing");
    }
  }
}

// Draws from {earlier candidates weighted by f(d)} U {self with weight w_self}
// where candidates are given in descending time order by `at(k)`. Returns the
// chosen candidate position, or npos for the self option.
constexpr std::size_t npos = static_cast<std::size_t>(-1);

template <class TimeAt>
std::size_t choose_link(const DecayFn& f, double t, std::size_t count,
                        TimeAt time_at, double w_self, Rng& rng) {
  if (count == 0) return npos;
  if (f.kind == DecayKind::Constant) {
    double w[2] = {static_cast<double>(count), w_self};
    if (rng.categorical(w) == 1) return npos;
    return rng.index(count);
  }
  std::vector<double> w;
  const double supp = f.support();
  for (std::size_t k = count; k-- > 0;) {
    double d = distance(t, time_at(k));
    if (d >= supp) break;
    w.push_back(f(d));
  }
  w.push_back(w_self);
  std::size_t pick = rng.categorical(w);
  if (pick + 1 == w.size()) return npos;
  return count - 1 - pick;
}

}  // namespace

ModelState GenTrace::to_state(const HyperParams& hp, Rng& rng) const {
  ModelState s;
  s.follow = follow;
  s.sender_link = sender_link;
  s.recipient_link = recipient_link;
  s.eta = eta;
  std::vector<double> params;
  params.reserve(eta.size() + 1);
  for (auto c : eta) params.push_back(c - hp.sigma);
  params.push_back(hp.gamma + hp.sigma * eta.size());
  auto draw = sample_dirichlet(params, rng);
  s.h_plus = draw.back();
  draw.pop_back();
  s.h = std::move(draw);
  return s;
}

GenTrace simulate_dnnd(const HyperParams& hp, const std::vector<double>& times,
                       Rng& rng) {
  hp.validate();
  check_schedule(times);
  const std::size_t n = times.size();
  GenTrace tr;
  tr.edges.resize(n);
  tr.follow.resize(n);
  tr.cluster.resize(n);
  tr.sender_link.resize(n);
  tr.recipient_link.resize(n);
  PyUrn urn(hp.gamma, hp.sigma);
  std::vector<std::vector<EdgeIndex>> members(n);

  for (EdgeIndex i = 0; i < n; ++i) {
    const double t = times[i];
    tr.edges[i].time = t;
    std::size_t j = choose_link(
        hp.decay1, t, i, [&](std::size_t k) { return times[k]; }, hp.alpha,
        rng);
    tr.follow[i] = j == npos ? i : static_cast<EdgeIndex>(j);
    const EdgeIndex k = j == npos ? i : tr.cluster[j];
    tr.cluster[i] = k;

    const auto& mem = members[k];
    auto time_at = [&](std::size_t p) { return times[mem[p]]; };
    std::size_t ps = choose_link(hp.decay2, t, mem.size(), time_at, hp.tau, rng);
    if (ps == npos) {
      tr.sender_link[i] = i;
      tr.edges[i].sender = urn.draw(rng);
      tr.table_vertex.push_back(tr.edges[i].sender);
    } else {
      tr.sender_link[i] = mem[ps];
      tr.edges[i].sender = tr.edges[mem[ps]].sender;
    }
    std::size_t pr = choose_link(hp.decay2, t, mem.size(), time_at, hp.tau, rng);
    if (pr == npos) {
      tr.recipient_link[i] = i;
      tr.edges[i].recipient = urn.draw(rng);
      tr.table_vertex.push_back(tr.edges[i].recipient);
    } else {
      tr.recipient_link[i] = mem[pr];
      tr.edges[i].recipient = tr.edges[mem[pr]].recipient;
    }
    members[k].push_back(i);
  }
  tr.eta = urn.counts();
  return tr;
}

GenTrace draw_vertices(const std::vector<double>& times,
                       std::vector<EdgeIndex> follow,
                       std::vector<EdgeIndex> sender_link,
                       std::vector<EdgeIndex> recipient_link,
                       const HyperParams& hp, Rng& rng) {
  const std::size_t n = times.size();
  if (follow.size() != n || sender_link.size() != n ||
      recipient_link.size() != n) {
    throw InvalidStateError("latent links do not match the schedule length");
  }
  GenTrace tr;
  tr.edges.resize(n);
  tr.cluster = root_labels(follow);
  PyUrn urn(hp.gamma, hp.sigma);
  for (EdgeIndex i = 0; i < n; ++i) {
    Edge& e = tr.edges[i];
    e.time = times[i];
    if (sender_link[i] == i) {
      e.sender = urn.draw(rng);
      tr.table_vertex.push_back(e.sender);
    } else {
      e.sender = tr.edges[sender_link[i]].sender;
    }
    if (recipient_link[i] == i) {
      e.recipient = urn.draw(rng);
      tr.table_vertex.push_back(e.recipient);
    } else {
      e.recipient = tr.edges[recipient_link[i]].recipient;
    }
  }
  tr.follow = std::move(follow);
  tr.sender_link = std::move(sender_link);
  tr.recipient_link = std::move(recipient_link);
  tr.eta = urn.counts();
  return tr;
}

PlainTrace simulate_ddcrp_multigraph(const DecayFn& f, double tau,
                                     const std::vector<double>& times,
                                     Rng& rng) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  check_schedule(times);
  const std::size_t n = times.size();
  PlainTrace tr;
  tr.edges.resize(n);
  tr.endpoint_link.resize(2 * n);
  std::vector<VertexId> vert(2 * n);
  for (std::size_t p = 0; p < 2 * n; ++p) {
    const double t = times[p / 2];
    std::size_t q = choose_link(
        f, t, p, [&](std::size_t k) { return times[k / 2]; }, tau, rng);
    if (q == npos) {
      tr.endpoint_link[p] = static_cast<std::uint32_t>(p);
      vert[p] = static_cast<VertexId>(tr.num_vertices++);
    } else {
      tr.endpoint_link[p] = static_cast<std::uint32_t>(q);
      vert[p] = vert[q];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    tr.edges[i] = Edge{vert[2 * i], vert[2 * i + 1], times[i]};
  }
  return tr;
}

double assumption_bound_scan(const std::vector<Edge>& edges, const DecayFn& f,
                             double a) {
  DecayAccumulator acc(f);
  double best = 0.0;
  for (std::size_t n = 0; n < edges.size(); ++n) {
    const double t = edges[n].time;
    if (n > 0 && t < edges[n - 1].time) {
      throw InputError("edges must be sorted by time");
    }
    best = std::max(best, acc.total(t) / std::pow(n + 1.0, a));
    acc.add(0, t);
  }
  return best;
}

double arrival_rate_bound(const DecayFn& f, double rate) {
  switch (f.kind) {
    case DecayKind::Window:
      return rate * std::ceil(f.lambda);
    case DecayKind::Exponential:
      return rate / -std::expm1(-1.0 / f.lambda);
    case DecayKind::Logistic:
      return rate * std::exp(f.lambda + 1.0) / (std::exp(1.0) - 1.0);
    case DecayKind::Constant:
      return kInfinity;
  }
  return kInfinity;
}

}  // namespace dnnd::gen
