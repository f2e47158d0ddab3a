#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dnnd/decay.hpp"
#include "dnnd/error.hpp"
#include "dnnd/hyper.hpp"
#include "dnnd/kernels.hpp"
#include "dnnd/model_state.hpp"
#include "dnnd/oracle.hpp"
#include "dnnd/types.hpp"

using namespace dnnd;

namespace {

std::vector<Edge> edges_at(std::initializer_list<Edge> list) { return list; }

HyperParams constant_hp(double alpha = 1.0, double tau = 1.0) {
  HyperParams hp;
  hp.alpha = alpha;
  hp.tau = tau;
  hp.decay1 = DecayFn::constant();
  hp.decay2 = DecayFn::constant();
  return hp;
}

}  // namespace

TEST(Distance, ForwardEqualAndFuture) {
  EXPECT_EQ(distance(5.0, 3.0), 2.0);
  EXPECT_EQ(distance(3.0, 3.0), 0.0);
  EXPECT_EQ(distance(3.0, 5.0), kInfinity);
}

TEST(Distance, InfiniteExactlyWhenFuture) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int k = 0; k < 1000; ++k) {
    double a = u(gen), b = u(gen);
    EXPECT_EQ(std::isinf(distance(a, b)), b > a);
  }
}

TEST(Decay, DocumentedValues) {
  EXPECT_EQ(DecayFn::window(5)(3), 1.0);
  EXPECT_EQ(DecayFn::window(5)(7), 0.0);
  EXPECT_EQ(DecayFn::exponential(2)(0), 1.0);
  EXPECT_DOUBLE_EQ(DecayFn::logistic(2)(2), 0.5);
  EXPECT_EQ(decay_eval(DecayFn::constant(), 1e12), 1.0);
}

TEST(Decay, ZeroAtInfinity) {
  for (auto f : {DecayFn::window(3), DecayFn::exponential(3),
                 DecayFn::logistic(3), DecayFn::constant()}) {
    EXPECT_EQ(f(kInfinity), 0.0) << to_string(f.kind);
  }
}

TEST(Decay, WindowBoundaryExcluded) {
  EXPECT_EQ(DecayFn::window(2)(2.0), 0.0);
  EXPECT_EQ(DecayFn::window(2)(std::nextafter(2.0, 0.0)), 1.0);
}

TEST(Decay, MonotoneNonIncreasing) {
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> ex(0.05);
  for (auto f : {DecayFn::window(4), DecayFn::exponential(4),
                 DecayFn::logistic(4), DecayFn::constant()}) {
    for (int k = 0; k < 2000; ++k) {
      double a = ex(gen), b = ex(gen);
      if (a > b) std::swap(a, b);
      EXPECT_GE(f(a), f(b)) << to_string(f.kind) << " " << a << " " << b;
      EXPECT_GE(f(b), 0.0);
      EXPECT_LE(f(a), 1.0);
    }
  }
}

TEST(Decay, SupportIsWhereValueVanishes) {
  for (auto f : {DecayFn::window(3), DecayFn::exponential(3),
                 DecayFn::logistic(3)}) {
    EXPECT_EQ(f(f.support()), 0.0) << to_string(f.kind);
    EXPECT_EQ(f(2 * f.support()), 0.0);
  }
  EXPECT_TRUE(std::isinf(DecayFn::constant().support()));
}

TEST(Decay, ParseNames) {
  EXPECT_EQ(parse_decay_kind("window"), DecayKind::Window);
  EXPECT_EQ(parse_decay_kind("exp"), DecayKind::Exponential);
  EXPECT_EQ(parse_decay_kind("exponential"), DecayKind::Exponential);
  EXPECT_EQ(parse_decay_kind("logistic"), DecayKind::Logistic);
  EXPECT_EQ(parse_decay_kind("constant"), DecayKind::Constant);
  EXPECT_THROW(parse_decay_kind("gaussian"), ConfigError);
}

TEST(HyperParams, ValidateRejectsOutOfSupport) {
  HyperParams hp;
  EXPECT_NO_THROW(hp.validate());
  hp.sigma = 1.0;
  EXPECT_THROW(hp.validate(), ConfigError);
  hp.sigma = 0.5;
  hp.alpha = 0.0;
  EXPECT_THROW(hp.validate(), ConfigError);
  hp.alpha = 1.0;
  hp.decay1.lambda = -1.0;
  EXPECT_THROW(hp.validate(), ConfigError);
}

TEST(HyperParams, GetSetRoundTrip) {
  HyperParams hp;
  double v = 0.25;
  for (Hyper h : kAllHypers) {
    set(hp, h, v);
    EXPECT_EQ(get(hp, h), v);
    EXPECT_EQ(parse_hyper(to_string(h)), h);
    v += 0.1;
  }
}

TEST(Priors, DefaultsMatchExperimentalSettings) {
  PriorSpec p;
  EXPECT_EQ(p.alpha, (GammaPrior{5, 1}));
  EXPECT_EQ(p.gamma, (GammaPrior{5, 1}));
  EXPECT_EQ(p.tau, (GammaPrior{1, 1}));
  EXPECT_EQ(p.sigma, (BetaPrior{1, 1}));
  EXPECT_EQ(p.lambda, (GammaPrior{50, 1}));
  EXPECT_EQ(log_prior(p, Hyper::Sigma, 0.3), 0.0);
  EXPECT_TRUE(std::isinf(log_prior(p, Hyper::Alpha, -1.0)));
}

TEST(ClusterPrior, FirstEdgeOnlyNewCluster) {
  auto e = edges_at({{0, 1, 0.0}});
  std::vector<EdgeIndex> z{0};
  HyperParams hp;
  hp.alpha = 2.5;
  auto w = cluster_prior_weights(0, e, z, hp);
  EXPECT_TRUE(w.existing.empty());
  EXPECT_EQ(w.fresh, 2.5);
  EXPECT_EQ(w.fresh / w.total(), 1.0);
}

TEST(ClusterPrior, ConstantDecayIsCrp) {
  auto e = edges_at({{0, 1, 0.0}, {0, 1, 1.0}});
  std::vector<EdgeIndex> z{0, 1};
  auto w = cluster_prior_weights(1, e, z, constant_hp());
  ASSERT_EQ(w.existing.size(), 1u);
  EXPECT_EQ(w.weight_of(0), 1.0);
  EXPECT_EQ(w.fresh, 1.0);
  EXPECT_EQ(w.weight_of(0) / w.total(), 0.5);
}

TEST(ClusterPrior, WindowCutoff) {
  auto e = edges_at({{0, 1, 0.0}, {0, 1, 1.0}, {0, 1, 2.0}});
  std::vector<EdgeIndex> z{0, 0, 2};
  HyperParams hp;
  hp.decay1 = DecayFn::window(1.5);
  auto w = cluster_prior_weights(2, e, z, hp);
  EXPECT_EQ(w.weight_of(0), 1.0);
}

TEST(ClusterPrior, CrpCountsUnderConstantDecay) {
  std::vector<Edge> e;
  for (int k = 0; k < 9; ++k) e.push_back({0, 0, double(k)});
  std::vector<EdgeIndex> z{0, 0, 2, 0, 2, 5, 0, 2, 0};
  auto w = cluster_prior_weights(8, e, z, constant_hp(0.7));
  EXPECT_EQ(w.weight_of(0), 4.0);
  EXPECT_EQ(w.weight_of(2), 3.0);
  EXPECT_EQ(w.weight_of(5), 1.0);
  EXPECT_EQ(w.fresh, 0.7);
}

TEST(ClusterPrior, NormalizedWeightsSumToOne) {
  std::mt19937_64 gen(3);
  for (auto f : {DecayFn::window(2), DecayFn::exponential(2),
                 DecayFn::logistic(2), DecayFn::constant()}) {
    std::vector<Edge> e;
    double t = 0;
    for (int k = 0; k < 40; ++k) {
      t += std::uniform_real_distribution<double>(0, 1)(gen);
      e.push_back({0, 0, t});
    }
    std::vector<EdgeIndex> follow(e.size());
    for (EdgeIndex i = 0; i < e.size(); ++i) follow[i] = gen() % (i + 1);
    auto z = root_labels(follow);
    HyperParams hp;
    hp.decay1 = f;
    for (EdgeIndex i = 0; i < e.size(); ++i) {
      auto w = cluster_prior_weights(i, e, z, hp);
      double s = w.fresh / w.total();
      for (auto [k, x] : w.existing) s += x / w.total();
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(VertexPredictive, EmptyClusterUsesBaseMeasure) {
  auto e = edges_at({{0, 0, 0.0}});
  std::vector<EdgeIndex> z{0};
  HyperParams hp = constant_hp();
  std::vector<double> h{0.6};
  auto w = vertex_predictive_weights(0, Role::Sender, 0, e, z, hp, h, 0.4);
  EXPECT_DOUBLE_EQ(w.per_vertex[0], 0.6);
  EXPECT_DOUBLE_EQ(w.fresh, 0.4);
}

TEST(VertexPredictive, OnePriorEdgeAtDistanceZero) {
  auto e = edges_at({{0, 0, 1.0}, {0, 0, 1.0}});
  std::vector<EdgeIndex> z{0, 0};
  HyperParams hp = constant_hp();
  std::vector<double> h{0.6};
  auto w = vertex_predictive_weights(1, Role::Sender, 0, e, z, hp, h, 0.4);
  EXPECT_DOUBLE_EQ(w.per_vertex[0], 1.6);
  EXPECT_DOUBLE_EQ(w.fresh, 0.4);
  EXPECT_DOUBLE_EQ(w.per_vertex[0] / w.total(), 0.8);
}

TEST(VertexPredictive, MalformedBaseMeasureThrows) {
  auto e = edges_at({{0, 0, 0.0}});
  std::vector<EdgeIndex> z{0};
  std::vector<double> h{0.9};
  EXPECT_THROW(
      vertex_predictive_weights(0, Role::Sender, 0, e, z, constant_hp(), h, 0.4),
      InvalidStateError);
}

TEST(VertexPredictive, MatchesTableEnumeration) {
  // three earlier edges of cluster 0 plus one edge of another cluster
  auto e = edges_at({{0, 1, 0.0}, {1, 1, 0.5}, {2, 0, 0.7}, {0, 2, 1.0},
                     {1, 2, 1.5}});
  std::vector<EdgeIndex> z{0, 0, 2, 0, 0};
  std::vector<double> h{0.3, 0.25, 0.15};
  const double hp_plus = 0.3;
  for (auto f2 : {DecayFn::exponential(1.3), DecayFn::window(1.2),
                  DecayFn::logistic(0.5), DecayFn::constant()}) {
    HyperParams hp;
    hp.tau = 0.8;
    hp.decay2 = f2;
    for (Role role : {Role::Sender, Role::Recipient}) {
      auto w = vertex_predictive_weights(4, role, 0, e, z, hp, h, hp_plus);
      auto [probs, fresh] =
          oracle::vertex_predictive(4, role, 0, e, z, hp, h, hp_plus);
      for (std::size_t v = 0; v < h.size(); ++v) {
        EXPECT_NEAR(w.per_vertex[v] / w.total(), probs[v], 1e-12);
      }
      EXPECT_NEAR(w.fresh / w.total(), fresh, 1e-12);
    }
  }
}

TEST(VertexPredictive, InvariantToPermutingIdenticalHistory) {
  auto a = edges_at({{0, 1, 1.0}, {2, 1, 1.0}, {0, 1, 1.0}, {1, 0, 2.0}});
  auto b = edges_at({{0, 1, 1.0}, {0, 1, 1.0}, {2, 1, 1.0}, {1, 0, 2.0}});
  std::vector<EdgeIndex> z{0, 0, 0, 0};
  std::vector<double> h{0.2, 0.2, 0.2};
  HyperParams hp;
  hp.decay2 = DecayFn::exponential(0.7);
  for (Role role : {Role::Sender, Role::Recipient}) {
    auto wa = vertex_predictive_weights(3, role, 0, a, z, hp, h, 0.4);
    auto wb = vertex_predictive_weights(3, role, 0, b, z, hp, h, 0.4);
    EXPECT_EQ(wa.per_vertex, wb.per_vertex);
  }
}

TEST(DecayAccumulator, MatchesDirectSums) {
  std::mt19937_64 gen(5);
  for (auto f : {DecayFn::window(1.5), DecayFn::exponential(0.8),
                 DecayFn::logistic(1.0), DecayFn::constant()}) {
    DecayAccumulator acc(f);
    std::vector<std::pair<double, VertexId>> pts;
    double t = 0;
    for (int k = 0; k < 300; ++k) {
      t += std::exponential_distribution<double>(2.0)(gen);
      VertexId v = gen() % 4;
      double direct_total = 0, direct_v = 0;
      for (auto [tp, vp] : pts) {
        direct_total += f(t - tp);
        if (vp == v) direct_v += f(t - tp);
      }
      EXPECT_NEAR(acc.total(t), direct_total, 1e-9) << to_string(f.kind);
      EXPECT_NEAR(acc.of(v, t), direct_v, 1e-9) << to_string(f.kind);
      acc.add(v, t);
      pts.emplace_back(t, v);
    }
  }
}

TEST(ClusterLoglik, EmptyClusterIsZero) {
  std::vector<EdgeIndex> none;
  std::vector<Edge> e;
  std::vector<double> h{1.0};
  EXPECT_EQ(cluster_loglik(none, e, HyperParams{}, h), 0.0);
}

TEST(ClusterLoglik, SingleEdgeSelfLoop) {
  auto e = edges_at({{0, 0, 0.0}});
  std::vector<EdgeIndex> m{0};
  std::vector<double> h{0.6};
  EXPECT_NEAR(cluster_loglik(m, e, HyperParams{}, h), std::log(0.36), 1e-15);
}

TEST(ClusterLoglik, MatchesNaiveAndIsAdditive) {
  std::mt19937_64 gen(9);
  std::vector<Edge> e;
  double t = 0;
  for (int k = 0; k < 60; ++k) {
    t += std::exponential_distribution<double>(1.0)(gen);
    e.push_back({VertexId(gen() % 5), VertexId(gen() % 5), t});
  }
  std::vector<double> h{0.1, 0.2, 0.15, 0.25, 0.1};
  for (auto f2 : {DecayFn::window(3), DecayFn::exponential(2),
                  DecayFn::logistic(1), DecayFn::constant()}) {
    HyperParams hp;
    hp.tau = 0.6;
    hp.decay2 = f2;
    std::vector<EdgeIndex> a, b, all;
    for (EdgeIndex i = 0; i < e.size(); ++i) {
      (i % 3 == 0 ? a : b).push_back(i);
      all.push_back(i);
    }
    double la = cluster_loglik(a, e, hp, h);
    EXPECT_NEAR(la, oracle::naive_cluster_loglik(a, e, hp, h), 1e-9);
    EXPECT_NEAR(cluster_loglik(all, e, hp, h),
                oracle::naive_cluster_loglik(all, e, hp, h), 1e-9);
    // disjoint clusters multiply
    double lb = cluster_loglik(b, e, hp, h);
    EXPECT_NEAR(la + lb, oracle::naive_cluster_loglik(a, e, hp, h) +
                             oracle::naive_cluster_loglik(b, e, hp, h),
                1e-9);
  }
}

TEST(FollowPrior, MatchesProductOfConditionals) {
  auto e = edges_at({{0, 0, 0.0}, {0, 0, 0.5}, {0, 0, 1.0}, {0, 0, 3.0}});
  std::vector<EdgeIndex> c{0, 0, 1, 3};
  DecayFn f = DecayFn::exponential(1.0);
  double a = 0.8;
  double expect = std::log(a / a) + std::log(f(0.5) / (a + f(0.5))) +
                  std::log(f(0.5) / (a + f(1.0) + f(0.5))) +
                  std::log(a / (a + f(3.0) + f(2.5) + f(2.0)));
  EXPECT_NEAR(log_follow_prior(e, c, f, a), expect, 1e-12);
}

TEST(ModelState, RootLabelsAndCounts) {
  std::vector<EdgeIndex> c{0, 0, 2, 1, 2, 5};
  EXPECT_EQ(root_labels(c), (std::vector<EdgeIndex>{0, 0, 2, 0, 2, 5}));
  EXPECT_EQ(count_roots(c), 3u);
}

TEST(ModelState, InitialStateIsValid) {
  auto e = edges_at({{0, 1, 0.0}, {1, 2, 1.0}, {0, 1, 5.0}, {2, 0, 20.0}});
  HyperParams hp;
  hp.decay1 = DecayFn::window(10);
  Rng rng(1);
  for (auto mode : {InitMode::Star, InitMode::Singleton, InitMode::Random}) {
    ModelState s = initial_state(e, hp, mode, rng);
    EXPECT_NO_THROW(validate_state(s, e));
  }
  ModelState star = initial_state(e, hp, InitMode::Star, rng);
  EXPECT_EQ(star.follow, (std::vector<EdgeIndex>{0, 0, 0, 3}));
  // every endpoint opens its own table
  EXPECT_EQ(star.eta, (std::vector<std::uint32_t>{3, 3, 2}));
  EXPECT_DOUBLE_EQ(star.h_plus, 0.25);
}

TEST(ModelState, ValidatorCatchesViolations) {
  auto e = edges_at({{0, 1, 0.0}, {0, 1, 1.0}});
  Rng rng(0);
  ModelState good = initial_state(e, HyperParams{}, InitMode::Star, rng);
  ASSERT_NO_THROW(validate_state(good, e));

  ModelState s = good;
  s.follow[0] = 1;
  EXPECT_THROW(validate_state(s, e), InvalidStateError);

  s = good;
  s.h[0] += 0.1;
  EXPECT_THROW(validate_state(s, e), InvalidStateError);

  s = good;
  s.eta[0] = 5;
  EXPECT_THROW(validate_state(s, e), InvalidStateError);

  // table link to an edge with a different sender
  auto e2 = edges_at({{0, 1, 0.0}, {1, 1, 1.0}});
  s = initial_state(e2, HyperParams{}, InitMode::Star, rng);
  s.sender_link[1] = 0;
  s.eta = table_counts(e2, s, 2);
  EXPECT_THROW(validate_state(s, e2), InvalidStateError);

  // table link crossing clusters
  s = good;
  s.follow[1] = 1;
  s.sender_link[1] = 0;
  s.eta = table_counts(e, s, 2);
  EXPECT_THROW(validate_state(s, e), InvalidStateError);
  ValidateOptions loose;
  loose.tables_within_clusters = false;
  EXPECT_NO_THROW(validate_state(s, e, loose));
}
