#include "dnnd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dnnd/error.hpp"

namespace dnnd {

double ClusterWeights::total() const {
  double t = fresh;
  for (const auto& [label, w] : existing) t += w;
  return t;
}

double ClusterWeights::weight_of(EdgeIndex label) const {
  auto it = std::lower_bound(
      existing.begin(), existing.end(), label,
      [](const auto& p, EdgeIndex l) { return p.first < l; });
  return it != existing.end() && it->first == label ? it->second : 0.0;
}

ClusterWeights cluster_prior_weights(EdgeIndex i, const std::vector<Edge>& edges,
                                     std::span<const EdgeIndex> z,
                                     const HyperParams& hp) {
  std::map<EdgeIndex, double> acc;
  const double supp = hp.decay1.support();
  for (EdgeIndex j = i; j-- > 0;) {
    double d = distance(edges[i].time, edges[j].time);
    if (d >= supp) break;
    double w = hp.decay1(d);
    if (w > 0.0) acc[z[j]] += w;
  }
  ClusterWeights out;
  out.existing.assign(acc.begin(), acc.end());
  out.fresh = hp.alpha;
  return out;
}

double VertexWeights::total() const {
  double t = fresh;
  for (double w : per_vertex) t += w;
  return t;
}

VertexWeights vertex_predictive_weights(EdgeIndex i, Role role, EdgeIndex k,
                                        const std::vector<Edge>& edges,
                                        std::span<const EdgeIndex> z,
                                        const HyperParams& hp,
                                        std::span<const double> h,
                                        double h_plus) {
  double mass = h_plus;
  for (double v : h) {
    if (!(v >= 0.0)) throw InvalidStateError("h has a negative entry");
    mass += v;
  }
  if (!(h_plus >= 0.0) || std::abs(mass - 1.0) > 1e-9) {
    throw InvalidStateError("h is not a probability vector");
  }
  VertexWeights out;
  out.per_vertex.resize(h.size());
  for (std::size_t v = 0; v < h.size(); ++v) out.per_vertex[v] = hp.tau * h[v];
  out.fresh = hp.tau * h_plus;
  const double supp = hp.decay2.support();
  for (EdgeIndex j = i; j-- > 0;) {
    double d = distance(edges[i].time, edges[j].time);
    if (d >= supp) break;
    if (z[j] != k) continue;
    VertexId v = endpoint(edges[j], role);
    if (v >= h.size()) throw InvalidStateError("vertex outside h");
    out.per_vertex[v] += hp.decay2(d);
  }
  return out;
}

void DecayAccumulator::expire(double t) {
  switch (f_.kind) {
    case DecayKind::Window:
      while (!live_.empty() && t - live_.front().first >= f_.lambda) {
        auto it = mass_.find(live_.front().second);
        if (--it->second.value <= 0.0) mass_.erase(it);
        live_.pop_front();
        total_.value -= 1.0;
      }
      break;
    case DecayKind::Logistic:
      while (!live_.empty() && t - live_.front().first >= f_.support()) {
        live_.pop_front();
      }
      break;
    default:
      break;
  }
}

double DecayAccumulator::decayed(const Mass& m, double t) const {
  if (m.value == 0.0 || t == m.time) return m.value;
  return m.value * std::exp(-(t - m.time) / f_.lambda);
}

void DecayAccumulator::add(VertexId v, double t) {
  switch (f_.kind) {
    case DecayKind::Window:
      expire(t);
      live_.emplace_back(t, v);
      mass_[v].value += 1.0;
      total_.value += 1.0;
      break;
    case DecayKind::Logistic:
      expire(t);
      live_.emplace_back(t, v);
      break;
    case DecayKind::Constant:
      mass_[v].value += 1.0;
      total_.value += 1.0;
      break;
    case DecayKind::Exponential: {
      Mass& m = mass_[v];
      m.value = decayed(m, t) + 1.0;
      m.time = t;
      total_.value = decayed(total_, t) + 1.0;
      total_.time = t;
      break;
    }
  }
}

double DecayAccumulator::total(double t) {
  switch (f_.kind) {
    case DecayKind::Window:
      expire(t);
      return total_.value;
    case DecayKind::Constant:
      return total_.value;
    case DecayKind::Exponential:
      return decayed(total_, t);
    case DecayKind::Logistic: {
      expire(t);
      double s = 0.0;
      for (const auto& [tj, v] : live_) s += f_(t - tj);
      return s;
    }
  }
  return 0.0;
}

double DecayAccumulator::of(VertexId v, double t) {
  switch (f_.kind) {
    case DecayKind::Window: {
      expire(t);
      auto it = mass_.find(v);
      return it == mass_.end() ? 0.0 : it->second.value;
    }
    case DecayKind::Constant: {
      auto it = mass_.find(v);
      return it == mass_.end() ? 0.0 : it->second.value;
    }
    case DecayKind::Exponential: {
      auto it = mass_.find(v);
      return it == mass_.end() ? 0.0 : decayed(it->second, t);
    }
    case DecayKind::Logistic: {
      expire(t);
      double s = 0.0;
      for (const auto& [tj, u] : live_) {
        if (u == v) s += f_(t - tj);
      }
      return s;
    }
  }
  return 0.0;
}

void DecayAccumulator::clear() {
  live_.clear();
  mass_.clear();
  total_ = Mass{};
}

double endpoint_log_term(double tau, double h_v, double same, double all) {
  return std::log(tau * h_v + same) - std::log(tau + all);
}

double cluster_loglik(std::span<const EdgeIndex> members,
                      const std::vector<Edge>& edges, const HyperParams& hp,
                      std::span<const double> h) {
  DecayAccumulator snd(hp.decay2);
  DecayAccumulator rcp(hp.decay2);
  double ll = 0.0;
  for (EdgeIndex i : members) {
    const Edge& e = edges[i];
    ll += endpoint_log_term(hp.tau, h[e.sender], snd.of(e.sender, e.time),
                            snd.total(e.time));
    ll += endpoint_log_term(hp.tau, h[e.recipient],
                            rcp.of(e.recipient, e.time), rcp.total(e.time));
    snd.add(e.sender, e.time);
    rcp.add(e.recipient, e.time);
  }
  return ll;
}

double log_follow_prior(const std::vector<Edge>& edges,
                        std::span<const EdgeIndex> follow, const DecayFn& f1,
                        double alpha) {
  DecayAccumulator acc(f1);
  double lp = 0.0;
  for (EdgeIndex i = 0; i < edges.size(); ++i) {
    double t = edges[i].time;
    double norm = alpha + acc.total(t);
    double w = follow[i] == i
                   ? alpha
                   : f1(distance(t, edges[follow[i]].time));
    lp += std::log(w) - std::log(norm);
    acc.add(0, t);
  }
  return lp;
}

}  // namespace dnnd
