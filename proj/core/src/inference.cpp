#include "dnnd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "dnnd/distributions.hpp"
#include "dnnd/error.hpp"
#include "dnnd/kernels.hpp"
#include "dnnd/py_urn.hpp"

namespace dnnd::infer {

namespace {

constexpr double kNegInf = -kInfinity;

std::size_t slot(Hyper h) { return static_cast<std::size_t>(h); }

bool in_support(Hyper which, double x) {
  if (which == Hyper::Sigma) return x >= 0.0 && x < 1.0;
  return x > 0.0 && std::isfinite(x);
}

double log_h_density(const ModelState& s, const HyperParams& hp) {
  std::vector<double> x;
  std::vector<double> params;
  for (std::size_t v = 0; v < s.eta.size(); ++v) {
    if (s.eta[v] == 0) continue;
    x.push_back(s.h[v]);
    params.push_back(s.eta[v] - hp.sigma);
  }
  x.push_back(s.h_plus);
  params.push_back(hp.gamma + hp.sigma * (params.size()));
  return log_dirichlet_pdf(x, params);
}

std::vector<std::vector<EdgeIndex>> group_members(
    std::span<const EdgeIndex> z) {
  std::vector<std::vector<EdgeIndex>> groups(z.size());
  for (EdgeIndex i = 0; i < z.size(); ++i) groups[z[i]].push_back(i);
  return groups;
}

}  // namespace

void ChainConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (thin < 1) throw ConfigError("thinning interval must be >= 1");
  if (adapt_interval < 1) throw ConfigError("adapt interval must be >= 1");
  priors.validate();
  init.validate();
}

void retire_vertices(ModelState& state) {
  for (std::size_t v = 0; v < state.eta.size(); ++v) {
    if (state.eta[v] == 0 && state.h[v] > 0.0) {
      state.h_plus += state.h[v];
      state.h[v] = 0.0;
    }
  }
}

void sample_h(ModelState& state, const HyperParams& hp, Rng& rng) {
  std::vector<double> params;
  std::vector<std::size_t> active;
  for (std::size_t v = 0; v < state.eta.size(); ++v) {
    if (state.eta[v] > 0) {
      params.push_back(state.eta[v] - hp.sigma);
      active.push_back(v);
    } else if (state.h[v] > 0.0) {
      throw InvalidStateError("vertex " + std::to_string(v) +
                              " has no tables but positive h");
    }
  }
  params.push_back(hp.gamma + hp.sigma * static_cast<double>(active.size()));
  auto draw = sample_dirichlet(params, rng);
  std::fill(state.h.begin(), state.h.end(), 0.0);
  for (std::size_t k = 0; k < active.size(); ++k) state.h[active[k]] = draw[k];
  state.h_plus = draw.back();
}

std::vector<std::pair<EdgeIndex, double>> table_conditional(
    EdgeIndex i, Role role, const std::vector<Edge>& edges,
    std::span<const EdgeIndex> z, const ModelState& state,
    const HyperParams& hp) {
  std::vector<std::pair<EdgeIndex, double>> out;
  const VertexId v = endpoint(edges[i], role);
  const double supp = hp.decay2.support();
  for (EdgeIndex j = i; j-- > 0;) {
    double d = distance(edges[i].time, edges[j].time);
    if (d >= supp) break;
    if (z[j] != z[i] || endpoint(edges[j], role) != v) continue;
    double w = hp.decay2(d);
    if (w > 0.0) out.emplace_back(j, w);
  }
  out.emplace_back(i, hp.tau * state.h[v]);
  return out;
}

namespace {

void relink_table(EdgeIndex i, Role role, EdgeIndex target,
                  const std::vector<Edge>& edges, ModelState& state) {
  auto& links = role == Role::Sender ? state.sender_link : state.recipient_link;
  const VertexId v = endpoint(edges[i], role);
  const EdgeIndex old = links[i];
  if (old == i && target != i) --state.eta[v];
  if (old != i && target == i) ++state.eta[v];
  links[i] = target;
}

}  // namespace

EdgeIndex gibbs_table(EdgeIndex i, Role role, const std::vector<Edge>& edges,
                      std::span<const EdgeIndex> z, ModelState& state,
                      const HyperParams& hp, Rng& rng) {
  auto options = table_conditional(i, role, edges, z, state, hp);
  std::vector<double> w;
  w.reserve(options.size());
  for (const auto& o : options) w.push_back(o.second);
  EdgeIndex target = options[rng.categorical(w)].first;
  relink_table(i, role, target, edges, state);
  return target;
}

bool mh_accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return rng.uniform() < std::exp(log_ratio);
}

double hyper_log_target(Hyper which, const HyperParams& hp,
                        const std::vector<Edge>& edges,
                        const ModelState& state, const PriorSpec& priors,
                        bool dirichlet_only_target) {
  double lp = log_prior(priors, which, get(hp, which));
  if (!std::isfinite(lp)) return kNegInf;
  switch (which) {
    case Hyper::Alpha:
    case Hyper::Lambda1:
      return lp + log_follow_prior(edges, state.follow, hp.decay1, hp.alpha);
    case Hyper::Tau:
    case Hyper::Lambda2: {
      auto groups = group_members(root_labels(state.follow));
      double ll = 0.0;
      for (const auto& g : groups) {
        if (!g.empty()) ll += cluster_loglik(g, edges, hp, state.h);
      }
      return lp + ll;
    }
    case Hyper::Gamma:
    case Hyper::Sigma: {
      double out = lp + log_h_density(state, hp);
      if (!dirichlet_only_target) out += py_log_eppf(state.eta, hp.gamma, hp.sigma);
      return out;
    }
  }
  return kNegInf;
}

Sampler::Sampler(std::vector<Edge> edges, const ChainConfig& cfg)
    : edges_(std::move(edges)), cfg_(cfg), hp_(cfg.init), rng_(cfg.seed) {
  if (edges_.empty()) throw InputError("cannot run a chain on an empty dataset");
  cfg_.validate();
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].time < edges_[i - 1].time) {
      throw InputError("edges must be sorted by time");
    }
  }
  state_ = initial_state(edges_, hp_, cfg_.init_mode, rng_);
  rebuild();
  init_steps();
}

Sampler::Sampler(std::vector<Edge> edges, const ChainConfig& cfg,
                 ModelState state, HyperParams hp, const std::string& rng_token,
                 std::size_t iteration, std::array<MoveStats, 6> moves)
    : edges_(std::move(edges)),
      cfg_(cfg),
      hp_(hp),
      state_(std::move(state)),
      iteration_(iteration),
      moves_(moves) {
  if (edges_.empty()) throw InputError("cannot run a chain on an empty dataset");
  cfg_.validate();
  hp_.validate();
  ValidateOptions opts;
  opts.tables_within_clusters = false;
  opts.h_tolerance = 1e-9;
  validate_state(state_, edges_, opts);
  rng_.restore(rng_token);
  rebuild();
}

void Sampler::init_steps() {
  for (Hyper h : kAllHypers) {
    double x = get(hp_, h);
    MoveStats& m = moves_[slot(h)];
    m = MoveStats{};
    if (cfg_.priors.proposal_step > 0.0) {
      m.step = cfg_.priors.proposal_step;
    } else {
      m.step = x > 0.0 ? 0.1 * x : 0.05;
    }
  }
}

void Sampler::rebuild() {
  const std::size_t n = edges_.size();
  z_ = root_labels(state_.follow);
  members_.assign(n, {});
  followers_.assign(n, {});
  roots_.clear();
  for (EdgeIndex i = 0; i < n; ++i) {
    members_[z_[i]].push_back(i);
    if (state_.follow[i] == i) {
      roots_.insert(i);
    } else {
      followers_[state_.follow[i]].push_back(i);
    }
  }
}

void Sampler::reset(std::vector<Edge> edges, ModelState state) {
  edges_ = std::move(edges);
  state_ = std::move(state);
  rebuild();
}

void Sampler::check_consistency() const {
  if (root_labels(state_.follow) != z_) {
    throw InvalidStateError("cached cluster labels are stale");
  }
  std::size_t counted = 0;
  for (EdgeIndex r : roots_) {
    if (state_.follow[r] != r) throw InvalidStateError("root set is stale");
    for (EdgeIndex i : members_[r]) {
      if (z_[i] != r) throw InvalidStateError("member list is stale");
    }
    if (!std::is_sorted(members_[r].begin(), members_[r].end())) {
      throw InvalidStateError("member list is unsorted");
    }
    counted += members_[r].size();
  }
  if (counted != edges_.size() || roots_.size() != count_roots(state_.follow)) {
    throw InvalidStateError("member lists do not partition the edges");
  }
}

std::size_t Sampler::num_tables() const {
  return count_roots(state_.sender_link) + count_roots(state_.recipient_link);
}

std::size_t Sampler::max_cluster_size() const {
  std::size_t m = 0;
  for (EdgeIndex r : roots_) m = std::max(m, members_[r].size());
  return m;
}

double Sampler::log_likelihood() const {
  double ll = 0.0;
  for (EdgeIndex r : roots_) {
    ll += cluster_loglik(members_[r], edges_, hp_, state_.h);
  }
  return ll;
}

void Sampler::sweep() {
  // follows are drawn with table links marginalized, so the links are
  // redrawn right after to leave a consistent state
  sweep_follows();
  sweep_tables();
  update_h();
  update_hypers();
  if (cfg_.validate_each_sweep) {
    ValidateOptions opts;
    opts.h_tolerance = 1e-9;
    validate_state(state_, edges_, opts);
    check_consistency();
  }
  ++iteration_;
}

void Sampler::run(std::size_t until, std::vector<PosteriorSample>* out) {
  while (iteration_ < until) {
    sweep();
    const std::size_t it = iteration_ - 1;
    if (out && it >= cfg_.burnin && (it - cfg_.burnin) % cfg_.thin == 0) {
      out->push_back(PosteriorSample{it, state_, hp_});
    }
  }
}

void Sampler::sweep_tables() {
  const double supp = hp_.decay2.support();
  std::vector<double> w;
  std::vector<EdgeIndex> target;
  for (EdgeIndex i = 0; i < edges_.size(); ++i) {
    const auto& mem = members_[z_[i]];
    const auto pos = std::lower_bound(mem.begin(), mem.end(), i) - mem.begin();
    for (Role role : {Role::Sender, Role::Recipient}) {
      const VertexId v = endpoint(edges_[i], role);
      w.clear();
      target.clear();
      for (auto p = pos; p-- > 0;) {
        const EdgeIndex j = mem[p];
        double d = distance(edges_[i].time, edges_[j].time);
        if (d >= supp) break;
        if (endpoint(edges_[j], role) != v) continue;
        double f = hp_.decay2(d);
        if (f > 0.0) {
          w.push_back(f);
          target.push_back(j);
        }
      }
      w.push_back(hp_.tau * state_.h[v]);
      target.push_back(i);
      relink_table(i, role, target[rng_.categorical(w)], edges_, state_);
    }
  }
}

void Sampler::update_h() {
  retire_vertices(state_);
  sample_h(state_, hp_, rng_);
}

void Sampler::sweep_follows() {
  for (EdgeIndex i = 0; i < edges_.size(); ++i) gibbs_follow(i);
}

std::vector<EdgeIndex> Sampler::subtree(EdgeIndex i) const {
  std::vector<EdgeIndex> out;
  std::vector<EdgeIndex> stack{i};
  while (!stack.empty()) {
    EdgeIndex u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (EdgeIndex w : followers_[u]) stack.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double Sampler::merge_delta(std::span<const EdgeIndex> a,
                            std::span<const EdgeIndex> b) const {
  if (a.empty() || b.empty()) return 0.0;
  const DecayFn& f2 = hp_.decay2;
  const double supp = f2.support();
  const double tau = hp_.tau;
  const auto& h = state_.h;
  const EdgeIndex start = std::max(a.front(), b.front());
  const double ts = edges_[start].time;

  struct Side {
    std::span<const EdgeIndex> list;
    std::size_t pos;
    DecayAccumulator snd;
    DecayAccumulator rcp;
  };
  auto make_side = [&](std::span<const EdgeIndex> list) {
    Side s{list,
           static_cast<std::size_t>(
               std::lower_bound(list.begin(), list.end(), start) - list.begin()),
           DecayAccumulator(f2), DecayAccumulator(f2)};
    std::size_t q = s.pos;
    while (q > 0 && distance(ts, edges_[list[q - 1]].time) < supp) --q;
    for (; q < s.pos; ++q) {
      const Edge& e = edges_[list[q]];
      s.snd.add(e.sender, e.time);
      s.rcp.add(e.recipient, e.time);
    }
    return s;
  };
  Side sa = make_side(a);
  Side sb = make_side(b);

  double delta = 0.0;
  while (sa.pos < a.size() || sb.pos < b.size()) {
    const bool from_a =
        sb.pos == b.size() || (sa.pos < a.size() && a[sa.pos] < b[sb.pos]);
    Side& own = from_a ? sa : sb;
    Side& other = from_a ? sb : sa;
    const Edge& e = edges_[own.list[own.pos]];
    const double t = e.time;
    if (other.pos == other.list.size() &&
        distance(t, edges_[other.list.back()].time) >= supp) {
      break;
    }
    double so = own.snd.of(e.sender, t), st = own.snd.total(t);
    double xo = other.snd.of(e.sender, t), xt = other.snd.total(t);
    delta += endpoint_log_term(tau, h[e.sender], so + xo, st + xt) -
             endpoint_log_term(tau, h[e.sender], so, st);
    so = own.rcp.of(e.recipient, t);
    st = own.rcp.total(t);
    xo = other.rcp.of(e.recipient, t);
    xt = other.rcp.total(t);
    delta += endpoint_log_term(tau, h[e.recipient], so + xo, st + xt) -
             endpoint_log_term(tau, h[e.recipient], so, st);
    own.snd.add(e.sender, t);
    own.rcp.add(e.recipient, t);
    ++own.pos;
  }
  return delta;
}

EdgeIndex Sampler::gibbs_follow(EdgeIndex i) {
  const EdgeIndex old = state_.follow[i];
  std::vector<EdgeIndex> a;
  if (old == i) {
    a = members_[i];
  } else {
    auto& fl = followers_[old];
    fl.erase(std::find(fl.begin(), fl.end(), i));
    state_.follow[i] = i;
    a = subtree(i);
    auto& rest = members_[z_[i]];
    std::vector<EdgeIndex> kept;
    kept.reserve(rest.size() - a.size());
    std::set_difference(rest.begin(), rest.end(), a.begin(), a.end(),
                        std::back_inserter(kept));
    rest.swap(kept);
    for (EdgeIndex e : a) z_[e] = i;
    members_[i] = a;
    roots_.insert(i);
  }

  const DecayFn& f1 = hp_.decay1;
  const double t = edges_[i].time;
  const bool bounded = f1.has_finite_support();
  std::vector<std::pair<EdgeIndex, double>> cand;
  if (bounded) {
    std::map<EdgeIndex, double> w;
    const double supp = f1.support();
    for (EdgeIndex j = i; j-- > 0;) {
      double d = distance(t, edges_[j].time);
      if (d >= supp) break;
      double f = f1(d);
      if (f > 0.0) w[z_[j]] += f;
    }
    cand.assign(w.begin(), w.end());
  } else {
    for (EdgeIndex r : roots_) {
      if (r >= i) break;
      const auto& mem = members_[r];
      auto cnt = std::lower_bound(mem.begin(), mem.end(), i) - mem.begin();
      cand.emplace_back(r, static_cast<double>(cnt));
    }
  }

  std::vector<double> logw;
  logw.reserve(cand.size() + 1);
  for (const auto& [k, w] : cand) {
    logw.push_back(std::log(w) + merge_delta(a, members_[k]));
  }
  logw.push_back(std::log(hp_.alpha));
  const std::size_t pick = rng_.categorical_log(logw);
  if (pick == cand.size()) return i;

  const EdgeIndex k = cand[pick].first;
  EdgeIndex j;
  if (bounded) {
    std::vector<double> w;
    std::vector<EdgeIndex> js;
    const double supp = f1.support();
    for (EdgeIndex q = i; q-- > 0;) {
      double d = distance(t, edges_[q].time);
      if (d >= supp) break;
      if (z_[q] != k) continue;
      double f = f1(d);
      if (f > 0.0) {
        w.push_back(f);
        js.push_back(q);
      }
    }
    j = js[rng_.categorical(w)];
  } else {
    j = members_[k][rng_.index(static_cast<std::uint64_t>(cand[pick].second))];
  }

  state_.follow[i] = j;
  followers_[j].push_back(i);
  auto& target = members_[k];
  std::vector<EdgeIndex> merged;
  merged.reserve(target.size() + a.size());
  std::merge(target.begin(), target.end(), a.begin(), a.end(),
             std::back_inserter(merged));
  target.swap(merged);
  members_[i].clear();
  members_[i].shrink_to_fit();
  roots_.erase(i);
  for (EdgeIndex e : a) z_[e] = k;
  return j;
}

bool Sampler::mh_hyper(Hyper which) {
  MoveStats& m = moves_[slot(which)];
  const double x = get(hp_, which);
  double prop = x + m.step * rng_.normal();
  if (which == Hyper::Sigma) {
    // reflect into [0, 1)
    while (prop < 0.0 || prop > 1.0) prop = prop < 0.0 ? -prop : 2.0 - prop;
  }
  ++m.proposed;
  ++m.window_proposed;
  if (!in_support(which, prop)) return false;

  HyperParams cand = hp_;
  set(cand, which, prop);
  double cur;
  double next;
  if (which == Hyper::Tau || which == Hyper::Lambda2) {
    cur = log_prior(cfg_.priors, which, x) + log_likelihood();
    HyperParams keep = hp_;
    hp_ = cand;
    next = log_prior(cfg_.priors, which, prop) + log_likelihood();
    hp_ = keep;
  } else {
    cur = hyper_log_target(which, hp_, edges_, state_, cfg_.priors,
                           cfg_.dirichlet_only_target);
    next = hyper_log_target(which, cand, edges_, state_, cfg_.priors,
                            cfg_.dirichlet_only_target);
  }
  if (!std::isfinite(next)) return false;
  const double ratio = std::isfinite(cur) ? next - cur : kInfinity;
  if (!mh_accept(ratio, rng_)) return false;
  hp_ = cand;
  ++m.accepted;
  ++m.window_accepted;
  return true;
}

void Sampler::update_hypers() {
  for (Hyper h : kAllHypers) {
    if (cfg_.is_fixed(h)) continue;
    if (h == Hyper::Lambda1 && !hp_.decay1.uses_lambda()) continue;
    if (h == Hyper::Lambda2 && !hp_.decay2.uses_lambda()) continue;
    mh_hyper(h);
  }
  if (iteration_ < cfg_.burnin && (iteration_ + 1) % cfg_.adapt_interval == 0) {
    for (MoveStats& m : moves_) {
      if (m.window_proposed == 0) continue;
      double rate = static_cast<double>(m.window_accepted) /
                    static_cast<double>(m.window_proposed);
      if (rate < 0.25) m.step *= 0.7;
      if (rate > 0.40) m.step *= 1.3;
      m.window_proposed = 0;
      m.window_accepted = 0;
    }
  }
}

std::vector<PosteriorSample> run_chain(const std::vector<Edge>& edges,
                                       const ChainConfig& cfg) {
  Sampler s(edges, cfg);
  std::vector<PosteriorSample> out;
  s.run(cfg.iterations, &out);
  return out;
}

}  // namespace dnnd::infer
