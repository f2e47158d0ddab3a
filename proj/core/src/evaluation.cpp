#include "dnnd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "dnnd/error.hpp"

namespace dnnd::eval {

void LtrConfig::validate() const {
  if (particles < 1) throw ConfigError("particle count must be >= 1");
}

namespace {

// Decay sums one cluster contributes to the next edge.
struct Terms {
  double w1 = 0.0;
  double s_tot = 0.0;
  double s_same = 0.0;
  double r_tot = 0.0;
  double r_same = 0.0;
};

void check_after(const std::vector<Edge>& train, double t) {
  if (!train.empty() && t < train.back().time) {
    throw InputError("held-out edges must not precede the training edges");
  }
}

// Training-side terms for one future edge: every training cluster whose
// decay sums reach time t.
class TrainIndex {
 public:
  TrainIndex(const std::vector<Edge>& train, const std::vector<EdgeIndex>& z,
             const HyperParams& hp)
      : train_(train), z_(z), hp_(hp) {
    if (!hp.decay1.has_finite_support() || !hp.decay2.has_finite_support()) {
      for (EdgeIndex j = 0; j < train.size(); ++j) {
        auto& c = static_[z[j]];
        c.size += 1.0;
        c.senders[train[j].sender] += 1.0;
        c.recipients[train[j].recipient] += 1.0;
      }
    }
  }

  std::map<EdgeIndex, Terms> terms(VertexId s, VertexId r, double t) const {
    std::map<EdgeIndex, Terms> out;
    if (hp_.decay1.has_finite_support()) {
      scan(t, hp_.decay1.support(), [&](EdgeIndex j, double d) {
        double f = hp_.decay1(d);
        if (f > 0.0) out[z_[j]].w1 += f;
      });
    } else {
      for (const auto& [k, c] : static_) out[k].w1 = c.size;
    }
    auto add2 = [&](EdgeIndex k, double f, VertexId sj, VertexId rj) {
      Terms& x = out[k];
      x.s_tot += f;
      x.r_tot += f;
      if (sj == s) x.s_same += f;
      if (rj == r) x.r_same += f;
    };
    if (hp_.decay2.has_finite_support()) {
      scan(t, hp_.decay2.support(), [&](EdgeIndex j, double d) {
        double f = hp_.decay2(d);
        if (f > 0.0) add2(z_[j], f, train_[j].sender, train_[j].recipient);
      });
    } else {
      for (const auto& [k, c] : static_) {
        Terms& x = out[k];
        x.s_tot = x.r_tot = c.size;
        auto is = c.senders.find(s);
        x.s_same = is == c.senders.end() ? 0.0 : is->second;
        auto ir = c.recipients.find(r);
        x.r_same = ir == c.recipients.end() ? 0.0 : ir->second;
      }
    }
    return out;
  }

 private:
  template <class F>
  void scan(double t, double supp, F&& f) const {
    for (EdgeIndex j = static_cast<EdgeIndex>(train_.size()); j-- > 0;) {
      double d = distance(t, train_[j].time);
      if (d >= supp) break;
      f(j, d);
    }
  }

  struct Static {
    double size = 0.0;
    std::unordered_map<VertexId, double> senders;
    std::unordered_map<VertexId, double> recipients;
  };

  const std::vector<Edge>& train_;
  const std::vector<EdgeIndex>& z_;
  const HyperParams& hp_;
  std::map<EdgeIndex, Static> static_;
};

struct Particle {
  std::vector<EdgeIndex> z;
  std::map<VertexId, std::uint32_t> novel;
  std::uint32_t novel_tables = 0;
};

class LtrModel {
 public:
  LtrModel(const std::vector<Edge>& train, const infer::PosteriorSample& sample,
           const std::vector<Edge>& test)
      : train_(train),
        test_(test),
        hp_(sample.hp),
        h_(sample.state.h),
        h_plus_(sample.state.h_plus),
        z_train_(root_labels(sample.state.follow)) {
    double active = 0.0;
    for (auto c : sample.state.eta) active += c > 0;
    base_ = hp_.gamma + hp_.sigma * active;
    TrainIndex index(train_, z_train_, hp_);
    pre_.reserve(test.size());
    for (const Edge& e : test) pre_.push_back(index.terms(e.sender, e.recipient, e.time));
  }

  // Predictive probability of test edge n under particle p; when `rng` is
  // given, also draws the edge's latent choices into p.
  double step(std::size_t n, Particle& p, Rng* rng) const {
    const Edge& e = test_[n];
    std::map<EdgeIndex, Terms> terms = pre_[n];
    const double supp = std::max(hp_.decay1.support(), hp_.decay2.support());
    for (std::size_t m = n; m-- > 0;) {
      double d = distance(e.time, test_[m].time);
      if (d >= supp) break;
      double f1 = hp_.decay1(d);
      double f2 = hp_.decay2(d);
      if (f1 <= 0.0 && f2 <= 0.0) continue;
      Terms& x = terms[p.z[m]];
      x.w1 += f1;
      x.s_tot += f2;
      x.r_tot += f2;
      if (test_[m].sender == e.sender) x.s_same += f2;
      if (test_[m].recipient == e.recipient) x.r_same += f2;
    }

    std::vector<EdgeIndex> labels;
    std::vector<double> weights;
    double norm = hp_.alpha;
    for (const auto& [k, x] : terms) {
      if (x.w1 <= 0.0) continue;
      norm += x.w1;
      labels.push_back(k);
      weights.push_back(x.w1 * pair_prob(e, x, p));
    }
    const Terms empty;
    labels.push_back(new_label(n));
    weights.push_back(hp_.alpha * pair_prob(e, empty, p));
    const double prob = std::accumulate(weights.begin(), weights.end(), 0.0) / norm;

    if (rng) {
      std::size_t pick = rng->categorical(weights);
      const EdgeIndex k = labels[pick];
      const Terms& x = pick + 1 == labels.size() ? empty : terms.at(k);
      p.z[n] = k;
      draw_tables(e, x, p, *rng);
    }
    return prob;
  }

  Particle fresh() const {
    Particle p;
    p.z.assign(test_.size(), 0);
    return p;
  }

 private:
  EdgeIndex new_label(std::size_t n) const {
    return static_cast<EdgeIndex>(train_.size() + n);
  }

  bool is_novel(VertexId v) const { return v >= h_.size(); }

  double base_prob(VertexId v, const Particle& p) const {
    if (!is_novel(v)) return h_[v];
    auto it = p.novel.find(v);
    double denom = base_ + p.novel_tables;
    double urn = it == p.novel.end() ? (base_ + hp_.sigma * p.novel.size()) / denom
                                     : (it->second - hp_.sigma) / denom;
    return h_plus_ * urn;
  }

  static void open(VertexId v, Particle& p) {
    ++p.novel[v];
    ++p.novel_tables;
  }
  static void close(VertexId v, Particle& p) {
    if (--p.novel[v] == 0) p.novel.erase(v);
    --p.novel_tables;
  }

  // (join, open) probabilities of one endpoint; open is the new-table mass.
  std::pair<double, double> side(VertexId v, double same, double tot,
                                 const Particle& p) const {
    double denom = hp_.tau + tot;
    return {same / denom, hp_.tau * base_prob(v, p) / denom};
  }

  double pair_prob(const Edge& e, const Terms& x, Particle& p) const {
    auto [sj, so] = side(e.sender, x.s_same, x.s_tot, p);
    if (is_novel(e.sender) && is_novel(e.recipient)) {
      auto [rj, ro] = side(e.recipient, x.r_same, x.r_tot, p);
      double out = sj * (rj + ro);
      open(e.sender, p);
      auto [rj2, ro2] = side(e.recipient, x.r_same, x.r_tot, p);
      close(e.sender, p);
      return out + so * (rj2 + ro2);
    }
    auto [rj, ro] = side(e.recipient, x.r_same, x.r_tot, p);
    return (sj + so) * (rj + ro);
  }

  void draw_tables(const Edge& e, const Terms& x, Particle& p, Rng& rng) const {
    if (is_novel(e.sender)) {
      auto [sj, so] = side(e.sender, x.s_same, x.s_tot, p);
      double w_join = sj;
      double w_open = so;
      if (is_novel(e.recipient)) {
        auto [rj, ro] = side(e.recipient, x.r_same, x.r_tot, p);
        w_join *= rj + ro;
        open(e.sender, p);
        auto [rj2, ro2] = side(e.recipient, x.r_same, x.r_tot, p);
        close(e.sender, p);
        w_open *= rj2 + ro2;
      }
      double w[2] = {w_join, w_open};
      if (rng.categorical(w) == 1) open(e.sender, p);
    }
    if (is_novel(e.recipient)) {
      auto [rj, ro] = side(e.recipient, x.r_same, x.r_tot, p);
      double w[2] = {rj, ro};
      if (rng.categorical(w) == 1) open(e.recipient, p);
    }
  }

  const std::vector<Edge>& train_;
  const std::vector<Edge>& test_;
  HyperParams hp_;
  std::vector<double> h_;
  double h_plus_;
  std::vector<EdgeIndex> z_train_;
  double base_ = 0.0;
  std::vector<std::map<EdgeIndex, Terms>> pre_;
};

}  // namespace

std::vector<double> left_to_right_sample(const std::vector<Edge>& train,
                                         const infer::PosteriorSample& sample,
                                         const std::vector<Edge>& test,
                                         std::size_t particles,
                                         bool redraw_prefix, Rng& rng) {
  if (particles < 1) throw ConfigError("particle count must be >= 1");
  std::vector<double> out(test.size());
  if (test.empty()) return out;
  check_after(train, test.front().time);
  for (std::size_t i = 1; i < test.size(); ++i) {
    if (test[i].time < test[i - 1].time) {
      throw InputError("held-out edges must be sorted by time");
    }
  }
  LtrModel model(train, sample, test);
  std::vector<Rng> streams;
  streams.reserve(particles);
  for (std::size_t m = 0; m < particles; ++m) streams.push_back(rng.split());
  std::vector<Particle> ps(particles, model.fresh());

  for (std::size_t n = 0; n < test.size(); ++n) {
    double sum = 0.0;
    for (std::size_t m = 0; m < particles; ++m) {
      if (redraw_prefix) {
        ps[m] = model.fresh();
        for (std::size_t q = 0; q < n; ++q) model.step(q, ps[m], &streams[m]);
        sum += model.step(n, ps[m], nullptr);
      } else {
        sum += model.step(n, ps[m], &streams[m]);
      }
    }
    out[n] = std::log(sum / static_cast<double>(particles));
  }
  return out;
}

LtrResult left_to_right_loglik(const std::vector<Edge>& train,
                               const std::vector<infer::PosteriorSample>& samples,
                               const std::vector<Edge>& test,
                               const LtrConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ConfigError("no posterior samples to evaluate");
  LtrResult res;
  res.edge_log.assign(test.size(), 0.0);
  Rng rng(cfg.seed);
  for (const auto& s : samples) {
    Rng stream = rng.split();
    auto per_edge =
        left_to_right_sample(train, s, test, cfg.particles, cfg.redraw_prefix, stream);
    double total = 0.0;
    for (std::size_t n = 0; n < per_edge.size(); ++n) {
      res.edge_log[n] += per_edge[n] / static_cast<double>(samples.size());
      total += per_edge[n];
    }
    res.sample_total.push_back(total);
  }
  res.total = std::accumulate(res.edge_log.begin(), res.edge_log.end(), 0.0);
  return res;
}

double EdgePredictive::total() const {
  return std::accumulate(prob.begin(), prob.end(), novel);
}

EdgePredictive edge_predictive(const std::vector<Edge>& train,
                               const infer::PosteriorSample& sample, double t) {
  check_after(train, t);
  const HyperParams& hp = sample.hp;
  const auto& h = sample.state.h;
  const double h_plus = sample.state.h_plus;
  const std::size_t nv = h.size();
  const auto z = root_labels(sample.state.follow);

  struct Cluster {
    double w1 = 0.0;
    double tot = 0.0;
    std::map<VertexId, double> snd;
    std::map<VertexId, double> rcp;
  };
  std::map<EdgeIndex, Cluster> clusters;
  auto each_recent = [&](const DecayFn& f, auto&& fn) {
    if (!f.has_finite_support()) {
      for (EdgeIndex j = 0; j < train.size(); ++j) fn(j, 1.0);
      return;
    }
    const double supp = f.support();
    for (EdgeIndex j = static_cast<EdgeIndex>(train.size()); j-- > 0;) {
      double d = distance(t, train[j].time);
      if (d >= supp) break;
      double w = f(d);
      if (w > 0.0) fn(j, w);
    }
  };
  each_recent(hp.decay1, [&](EdgeIndex j, double w) { clusters[z[j]].w1 += w; });
  each_recent(hp.decay2, [&](EdgeIndex j, double w) {
    auto it = clusters.find(z[j]);
    if (it == clusters.end() || it->second.w1 <= 0.0) return;
    it->second.tot += w;
    it->second.snd[train[j].sender] += w;
    it->second.rcp[train[j].recipient] += w;
  });

  double norm = hp.alpha;
  for (const auto& [k, c] : clusters) norm += c.w1;

  // P(u, v) = C h_u h_v + h_u R(v) + S(u) h_v + sum_k w_k b_k(u) b'_k(v)
  double big_c = hp.alpha / norm;
  double seen = big_c * (1.0 - h_plus) * (1.0 - h_plus);
  std::vector<double> r_vec(nv, 0.0), s_vec(nv, 0.0);
  EdgePredictive out;
  out.num_vertices = nv;
  out.prob.assign(nv * nv, 0.0);
  for (const auto& [k, c] : clusters) {
    if (c.w1 <= 0.0) continue;
    const double w = c.w1 / norm;
    const double a = hp.tau / (hp.tau + c.tot);
    big_c += w * a * a;
    seen += w * (1.0 - a * h_plus) * (1.0 - a * h_plus);
    const double scale = 1.0 / (hp.tau + c.tot);
    for (const auto& [v, x] : c.rcp) r_vec[v] += w * a * x * scale;
    for (const auto& [u, x] : c.snd) s_vec[u] += w * a * x * scale;
    for (const auto& [u, xs] : c.snd) {
      for (const auto& [v, xr] : c.rcp) {
        out.prob[u * nv + v] += w * xs * scale * xr * scale;
      }
    }
  }
  for (std::size_t u = 0; u < nv; ++u) {
    double* row = &out.prob[u * nv];
    for (std::size_t v = 0; v < nv; ++v) {
      row[v] += big_c * h[u] * h[v] + h[u] * r_vec[v] + s_vec[u] * h[v];
    }
  }
  out.novel = 1.0 - seen;
  return out;
}

ForecastPrediction rank_pairs(const EdgePredictive& pred, std::size_t limit,
                              std::size_t n_test) {
  std::vector<std::size_t> idx;
  idx.reserve(pred.prob.size());
  for (std::size_t k = 0; k < pred.prob.size(); ++k) {
    if (pred.prob[k] > 0.0) idx.push_back(k);
  }
  const std::size_t keep = std::min(limit, idx.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (pred.prob[a] != pred.prob[b]) return pred.prob[a] > pred.prob[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(), better);
  ForecastPrediction out;
  out.n_test = n_test;
  for (std::size_t k = 0; k < keep; ++k) {
    out.pairs.emplace_back(static_cast<VertexId>(idx[k] / pred.num_vertices),
                           static_cast<VertexId>(idx[k] % pred.num_vertices));
    out.scores.push_back(pred.prob[idx[k]]);
  }
  return out;
}

Forecast forecast(const std::vector<Edge>& train,
                  const std::vector<infer::PosteriorSample>& samples,
                  const std::vector<Edge>& test, std::size_t limit,
                  std::size_t max_samples) {
  if (samples.empty()) throw ConfigError("no posterior samples to forecast with");
  if (test.empty()) throw InputError("forecast needs at least one test edge");
  const double t = test.front().time;
  const std::size_t use = std::min(max_samples, samples.size());
  Forecast out;
  EdgePredictive avg;
  for (std::size_t s = samples.size() - use; s < samples.size(); ++s) {
    EdgePredictive p = edge_predictive(train, samples[s], t);
    out.per_sample.push_back(rank_pairs(p, limit, test.size()));
    if (avg.prob.empty()) {
      avg.num_vertices = p.num_vertices;
      avg.prob.assign(p.prob.size(), 0.0);
    }
    for (std::size_t k = 0; k < p.prob.size(); ++k) avg.prob[k] += p.prob[k] / use;
    avg.novel += p.novel / use;
  }
  out.averaged = rank_pairs(avg, limit, test.size());
  return out;
}

}  // namespace dnnd::eval
