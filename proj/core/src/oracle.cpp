#include "dnnd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "dnnd/distributions.hpp"
#include "dnnd/error.hpp"

namespace dnnd::oracle {

namespace {

constexpr double kNegInf = -kInfinity;

std::vector<double> times_of(const std::vector<Edge>& edges) {
  std::vector<double> t;
  t.reserve(edges.size());
  for (const Edge& e : edges) t.push_back(e.time);
  return t;
}

// Sequential urn probability of table labels; a label is new the first
// time it appears.
double urn_logprob(std::span<const VertexId> labels, double gamma,
                   double sigma) {
  std::unordered_map<VertexId, std::uint32_t> eta;
  double lp = 0.0;
  double tables = 0.0;
  for (VertexId v : labels) {
    auto it = eta.find(v);
    if (it == eta.end()) {
      lp += std::log((gamma + sigma * eta.size()) / (gamma + tables));
      eta.emplace(v, 1);
    } else {
      lp += std::log((it->second - sigma) / (gamma + tables));
      ++it->second;
    }
    tables += 1.0;
  }
  return lp;
}

}  // namespace

std::vector<Edge> LatentConfig::edges(std::span<const double> times) const {
  const std::size_t n = follow.size();
  std::vector<Edge> out(n);
  std::size_t next = 0;
  for (EdgeIndex i = 0; i < n; ++i) {
    out[i].time = times[i];
    out[i].sender = sender_link[i] == i ? table_vertex.at(next++)
                                        : out[sender_link[i]].sender;
    out[i].recipient = recipient_link[i] == i ? table_vertex.at(next++)
                                              : out[recipient_link[i]].recipient;
  }
  return out;
}

ModelState LatentConfig::to_state(std::span<const double> times) const {
  ModelState s;
  s.follow = follow;
  s.sender_link = sender_link;
  s.recipient_link = recipient_link;
  auto e = edges(times);
  const std::size_t nv = vertex_span(e);
  s.h.assign(nv, 1.0 / static_cast<double>(nv + 1));
  s.h_plus = 1.0 - static_cast<double>(nv) / static_cast<double>(nv + 1);
  s.eta = table_counts(e, s, nv);
  return s;
}

void for_each_latent(std::size_t n, std::size_t vertex_budget,
                     const std::function<void(const LatentConfig&)>& visit) {
  if (n > kMaxEnumerationEdges) {
    throw ConfigError("refusing to enumerate latents for " + std::to_string(n) +
                      " edges (limit " + std::to_string(kMaxEnumerationEdges) +
                      ")");
  }
  LatentConfig cfg;
  cfg.follow.resize(n);
  cfg.sender_link.resize(n);
  cfg.recipient_link.resize(n);
  std::vector<EdgeIndex> z(n);

  std::function<void(std::size_t, VertexId)> label =
      [&](std::size_t t, VertexId used) {
        if (t == cfg.table_vertex.size()) {
          visit(cfg);
          return;
        }
        VertexId top = std::min<VertexId>(used + 1,
                                          static_cast<VertexId>(vertex_budget));
        for (VertexId v = 0; v < top; ++v) {
          cfg.table_vertex[t] = v;
          label(t + 1, std::max<VertexId>(used, v + 1));
        }
      };

  std::function<void(EdgeIndex)> links = [&](EdgeIndex i) {
    if (i == n) {
      std::size_t tables = count_roots(cfg.sender_link) +
                            count_roots(cfg.recipient_link);
      cfg.table_vertex.assign(tables, 0);
      label(0, 0);
      return;
    }
    for (EdgeIndex c = 0; c <= i; ++c) {
      cfg.follow[i] = c;
      z[i] = c == i ? i : z[c];
      std::vector<EdgeIndex> options{i};
      for (EdgeIndex j = 0; j < i; ++j) {
        if (z[j] == z[i]) options.push_back(j);
      }
      for (EdgeIndex gs : options) {
        cfg.sender_link[i] = gs;
        for (EdgeIndex gr : options) {
          cfg.recipient_link[i] = gr;
          links(i + 1);
        }
      }
    }
  };
  links(0);
}

std::vector<LatentConfig> enumerate_latents(std::size_t n,
                                            std::size_t vertex_budget) {
  std::vector<LatentConfig> out;
  for_each_latent(n, vertex_budget,
                  [&](const LatentConfig& c) { out.push_back(c); });
  return out;
}

double exact_joint(const LatentConfig& config, const std::vector<Edge>& edges,
                   const HyperParams& hp) {
  const std::size_t n = edges.size();
  if (config.follow.size() != n) return kNegInf;
  const auto times = times_of(edges);
  const auto implied = config.edges(times);
  if (implied != edges) return kNegInf;

  double lp = 0.0;
  for (EdgeIndex i = 0; i < n; ++i) {
    double norm = hp.alpha;
    for (EdgeIndex j = 0; j < i; ++j) norm += hp.decay1(distance(times[i], times[j]));
    EdgeIndex c = config.follow[i];
    double w = c == i ? hp.alpha : hp.decay1(distance(times[i], times[c]));
    if (!(w > 0.0)) return kNegInf;
    lp += std::log(w / norm);
  }

  const auto z = root_labels(config.follow);
  for (EdgeIndex i = 0; i < n; ++i) {
    double norm = hp.tau;
    for (EdgeIndex j = 0; j < i; ++j) {
      if (z[j] == z[i]) norm += hp.decay2(distance(times[i], times[j]));
    }
    for (EdgeIndex g : {config.sender_link[i], config.recipient_link[i]}) {
      if (g == i) {
        lp += std::log(hp.tau / norm);
        continue;
      }
      if (z[g] != z[i]) return kNegInf;
      double w = hp.decay2(distance(times[i], times[g]));
      if (!(w > 0.0)) return kNegInf;
      lp += std::log(w / norm);
    }
  }
  return lp + urn_logprob(config.table_vertex, hp.gamma, hp.sigma);
}

std::vector<std::pair<LatentConfig, double>> exact_posterior(
    const std::vector<Edge>& edges, const HyperParams& hp) {
  const std::size_t n = edges.size();
  if (n > kMaxPosteriorEdges) {
    throw ConfigError("exact posterior limited to " +
                      std::to_string(kMaxPosteriorEdges) + " edges");
  }
  std::vector<LatentConfig> configs;
  std::vector<double> logp;
  LatentConfig cfg;
  cfg.follow.resize(n);
  cfg.sender_link.resize(n);
  cfg.recipient_link.resize(n);
  std::vector<EdgeIndex> z(n);

  std::function<void(EdgeIndex)> rec = [&](EdgeIndex i) {
    if (i == n) {
      cfg.table_vertex.clear();
      for (EdgeIndex k = 0; k < n; ++k) {
        if (cfg.sender_link[k] == k) cfg.table_vertex.push_back(edges[k].sender);
        if (cfg.recipient_link[k] == k) {
          cfg.table_vertex.push_back(edges[k].recipient);
        }
      }
      double lp = exact_joint(cfg, edges, hp);
      if (std::isfinite(lp)) {
        configs.push_back(cfg);
        logp.push_back(lp);
      }
      return;
    }
    for (EdgeIndex c = 0; c <= i; ++c) {
      cfg.follow[i] = c;
      z[i] = c == i ? i : z[c];
      std::vector<EdgeIndex> snd{i};
      std::vector<EdgeIndex> rcp{i};
      for (EdgeIndex j = 0; j < i; ++j) {
        if (z[j] != z[i]) continue;
        if (edges[j].sender == edges[i].sender) snd.push_back(j);
        if (edges[j].recipient == edges[i].recipient) rcp.push_back(j);
      }
      for (EdgeIndex gs : snd) {
        cfg.sender_link[i] = gs;
        for (EdgeIndex gr : rcp) {
          cfg.recipient_link[i] = gr;
          rec(i + 1);
        }
      }
    }
  };
  rec(0);

  normalize_log_weights(logp);
  std::vector<std::pair<LatentConfig, double>> out;
  out.reserve(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    out.emplace_back(std::move(configs[k]), logp[k]);
  }
  return out;
}

std::map<std::vector<EdgeIndex>, double> exact_follow_posterior(
    const std::vector<Edge>& edges, const HyperParams& hp) {
  std::map<std::vector<EdgeIndex>, double> out;
  for (const auto& [cfg, p] : exact_posterior(edges, hp)) out[cfg.follow] += p;
  return out;
}

Pattern canonical_pattern(const std::vector<Edge>& edges) {
  std::unordered_map<VertexId, VertexId> relabel;
  auto id = [&](VertexId v) {
    auto [it, fresh] = relabel.emplace(v, static_cast<VertexId>(relabel.size()));
    return it->second;
  };
  Pattern out;
  out.reserve(edges.size());
  for (const Edge& e : edges) {
    VertexId s = id(e.sender);
    VertexId r = id(e.recipient);
    out.emplace_back(s, r);
  }
  return out;
}

std::map<Pattern, double> dnnd_pattern_probs(std::span<const double> times,
                                             const HyperParams& hp,
                                             std::size_t vertex_budget) {
  std::map<Pattern, double> out;
  for_each_latent(times.size(), vertex_budget, [&](const LatentConfig& c) {
    auto e = c.edges(times);
    double lp = exact_joint(c, e, hp);
    if (std::isfinite(lp)) out[canonical_pattern(e)] += std::exp(lp);
  });
  return out;
}

std::map<Pattern, double> plain_pattern_probs(std::span<const double> times,
                                              const DecayFn& f, double tau) {
  const std::size_t slots = 2 * times.size();
  if (times.size() > 4) throw ConfigError("plain enumeration limited to 4 edges");
  std::map<Pattern, double> out;
  std::vector<VertexId> vert(slots);
  std::function<void(std::size_t, VertexId, double)> rec =
      [&](std::size_t p, VertexId used, double prob) {
        if (p == slots) {
          Pattern pat;
          for (std::size_t i = 0; i < times.size(); ++i) {
            pat.emplace_back(vert[2 * i], vert[2 * i + 1]);
          }
          out[pat] += prob;
          return;
        }
        const double t = times[p / 2];
        double norm = tau;
        for (std::size_t q = 0; q < p; ++q) norm += f(distance(t, times[q / 2]));
        for (std::size_t q = 0; q < p; ++q) {
          double w = f(distance(t, times[q / 2]));
          if (w <= 0.0) continue;
          vert[p] = vert[q];
          rec(p + 1, used, prob * w / norm);
        }
        vert[p] = used;
        rec(p + 1, used + 1, prob * tau / norm);
      };
  rec(0, 0, 1.0);
  return out;
}

double naive_cluster_loglik(std::span<const EdgeIndex> members,
                            const std::vector<Edge>& edges,
                            const HyperParams& hp, std::span<const double> h) {
  double ll = 0.0;
  for (std::size_t m = 0; m < members.size(); ++m) {
    const Edge& e = edges[members[m]];
    double tot = 0.0, same_s = 0.0, same_r = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      const Edge& o = edges[members[q]];
      double w = hp.decay2(distance(e.time, o.time));
      tot += w;
      if (o.sender == e.sender) same_s += w;
      if (o.recipient == e.recipient) same_r += w;
    }
    ll += std::log((hp.tau * h[e.sender] + same_s) / (hp.tau + tot));
    ll += std::log((hp.tau * h[e.recipient] + same_r) / (hp.tau + tot));
  }
  return ll;
}

std::vector<std::pair<EdgeIndex, double>> naive_follow_conditional(
    EdgeIndex i, const std::vector<Edge>& edges, const ModelState& state,
    const HyperParams& hp) {
  std::vector<EdgeIndex> targets;
  std::vector<double> logw;
  std::vector<EdgeIndex> c = state.follow;
  for (EdgeIndex j = 0; j <= i; ++j) {
    double w = j == i ? hp.alpha
                      : hp.decay1(distance(edges[i].time, edges[j].time));
    if (!(w > 0.0)) continue;
    c[i] = j;
    auto z = root_labels(c);
    std::map<EdgeIndex, std::vector<EdgeIndex>> groups;
    for (EdgeIndex k = 0; k < z.size(); ++k) groups[z[k]].push_back(k);
    double ll = 0.0;
    for (const auto& [root, mem] : groups) {
      ll += naive_cluster_loglik(mem, edges, hp, state.h);
    }
    targets.push_back(j);
    logw.push_back(std::log(w) + ll);
  }
  normalize_log_weights(logw);
  std::vector<std::pair<EdgeIndex, double>> out;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    out.emplace_back(targets[k], logw[k]);
  }
  return out;
}

std::pair<std::vector<double>, double> vertex_predictive(
    EdgeIndex i, Role role, EdgeIndex k, const std::vector<Edge>& edges,
    std::span<const EdgeIndex> z, const HyperParams& hp,
    std::span<const double> h, double h_plus) {
  std::vector<EdgeIndex> hist;
  for (EdgeIndex j = 0; j < i; ++j) {
    if (z[j] == k) hist.push_back(j);
  }
  if (hist.size() > 8) throw ConfigError("history too long to enumerate");
  const double ti = edges[i].time;

  std::vector<double> num(h.size(), 0.0);
  double num_new = 0.0;
  double denom = 0.0;
  // weight of the current history link configuration, then the
  // distribution of edge i's endpoint under it
  std::function<void(std::size_t, double)> rec = [&](std::size_t m, double w) {
    if (m == hist.size()) {
      double norm = hp.tau;
      for (EdgeIndex j : hist) norm += hp.decay2(distance(ti, edges[j].time));
      for (EdgeIndex j : hist) {
        num[endpoint(edges[j], role)] +=
            w * hp.decay2(distance(ti, edges[j].time)) / norm;
      }
      for (std::size_t v = 0; v < h.size(); ++v) num[v] += w * hp.tau * h[v] / norm;
      num_new += w * hp.tau * h_plus / norm;
      denom += w;
      return;
    }
    const Edge& e = edges[hist[m]];
    const VertexId v = endpoint(e, role);
    double norm = hp.tau;
    for (std::size_t q = 0; q < m; ++q) {
      norm += hp.decay2(distance(e.time, edges[hist[q]].time));
    }
    rec(m + 1, w * hp.tau * h[v] / norm);
    for (std::size_t q = 0; q < m; ++q) {
      if (endpoint(edges[hist[q]], role) != v) continue;
      double f = hp.decay2(distance(e.time, edges[hist[q]].time));
      if (f <= 0.0) continue;
      rec(m + 1, w * f / norm);
    }
  };
  rec(0, 1.0);
  for (double& x : num) x /= denom;
  return {num, num_new / denom};
}

double exact_heldout_logprob(const std::vector<Edge>& train,
                             const ModelState& state, const HyperParams& hp,
                             const std::vector<Edge>& test) {
  const std::size_t nt = train.size();
  const std::size_t n = test.size();
  if (n == 0) return 0.0;
  const auto ztrain = root_labels(state.follow);
  const VertexId vtrain = static_cast<VertexId>(state.h.size());
  double active = 0.0;
  for (auto c : state.eta) active += c > 0;
  const double base = hp.gamma + hp.sigma * active;

  // all edges in one index space: training first, then test
  std::vector<Edge> all = train;
  all.insert(all.end(), test.begin(), test.end());
  std::vector<EdgeIndex> z(nt + n);
  std::copy(ztrain.begin(), ztrain.end(), z.begin());
  std::map<VertexId, std::uint32_t> novel;  // tables per unseen vertex
  std::uint32_t novel_tables = 0;

  auto base_prob = [&](VertexId v) {
    if (v < vtrain) return state.h[v];
    auto it = novel.find(v);
    double urn = it == novel.end()
                     ? (base + hp.sigma * novel.size()) / (base + novel_tables)
                     : (it->second - hp.sigma) / (base + novel_tables);
    return state.h_plus * urn;
  };
  auto open_table = [&](VertexId v) {
    if (v >= vtrain) {
      ++novel[v];
      ++novel_tables;
    }
  };
  auto close_table = [&](VertexId v) {
    if (v >= vtrain) {
      if (--novel[v] == 0) novel.erase(v);
      --novel_tables;
    }
  };

  std::function<double(std::size_t)> rec;
  // sums over the endpoint tables of edge i, then recurses to i + 1
  auto endpoints = [&](std::size_t i) {
    const double t = all[i].time;
    double norm = hp.tau;
    for (std::size_t j = 0; j < i; ++j) {
      if (z[j] == z[i]) norm += hp.decay2(distance(t, all[j].time));
    }
    double total = 0.0;
    const VertexId s = all[i].sender;
    const VertexId r = all[i].recipient;
    // sender options
    std::vector<std::pair<double, bool>> sopts;  // (prob, opens table)
    for (std::size_t j = 0; j < i; ++j) {
      if (z[j] != z[i] || all[j].sender != s) continue;
      double f = hp.decay2(distance(t, all[j].time));
      if (f > 0.0) sopts.emplace_back(f / norm, false);
    }
    sopts.emplace_back(hp.tau * base_prob(s) / norm, true);
    for (const auto& [ps, opened] : sopts) {
      if (opened) open_table(s);
      std::vector<std::pair<double, bool>> ropts;
      for (std::size_t j = 0; j < i; ++j) {
        if (z[j] != z[i] || all[j].recipient != r) continue;
        double f = hp.decay2(distance(t, all[j].time));
        if (f > 0.0) ropts.emplace_back(f / norm, false);
      }
      ropts.emplace_back(hp.tau * base_prob(r) / norm, true);
      for (const auto& [pr, ropened] : ropts) {
        if (ropened) open_table(r);
        total += ps * pr * rec(i + 1);
        if (ropened) close_table(r);
      }
      if (opened) close_table(s);
    }
    return total;
  };
  rec = [&](std::size_t i) -> double {
    if (i == nt + n) return 1.0;
    const double t = all[i].time;
    double norm = hp.alpha;
    for (std::size_t j = 0; j < i; ++j) norm += hp.decay1(distance(t, all[j].time));
    double total = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      double f = hp.decay1(distance(t, all[j].time));
      if (f <= 0.0) continue;
      z[i] = z[j];
      total += f / norm * endpoints(i);
    }
    z[i] = static_cast<EdgeIndex>(i);
    total += hp.alpha / norm * endpoints(i);
    return total;
  };
  return std::log(rec(nt));
}

}  // namespace dnnd::oracle
