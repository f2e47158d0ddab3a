#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dnnd/error.hpp"
#include "dnnd/evaluation.hpp"
#include "dnnd/genmodel.hpp"
#include "dnnd/inference.hpp"
#include "dnnd/metrics.hpp"
#include "dnnd/oracle.hpp"

using namespace dnnd;
using eval::ForecastPrediction;
using eval::Pair;

namespace {

ForecastPrediction ranked(std::vector<Pair> pairs) {
  ForecastPrediction p;
  p.pairs = std::move(pairs);
  for (std::size_t k = 0; k < p.pairs.size(); ++k) {
    p.scores.push_back(1.0 - 0.01 * static_cast<double>(k));
  }
  p.n_test = p.pairs.size();
  return p;
}

std::vector<Edge> as_edges(const std::vector<Pair>& pairs) {
  std::vector<Edge> e;
  for (auto [s, r] : pairs) e.push_back({s, r, 0.0});
  return e;
}

// A posterior sample with random follows, all-self tables and h drawn from
// its Dirichlet conditional.
infer::PosteriorSample sample_for(const std::vector<Edge>& train,
                                  const HyperParams& hp, std::uint64_t seed) {
  Rng rng(seed);
  ModelState s = initial_state(train, hp, InitMode::Random, rng);
  infer::sample_h(s, hp, rng);
  return {0, s, hp};
}

}  // namespace

TEST(Hits, DocumentedExamples) {
  auto top = ranked({{1, 2}, {2, 3}, {3, 1}});
  EXPECT_DOUBLE_EQ(eval::hits_at_k(top, as_edges({{1, 2}}), 3), 1.0 / 3.0);
  EXPECT_EQ(eval::hits_at_k(top, as_edges({{5, 5}}), 3), 0.0);
  EXPECT_EQ(eval::hits_at_k(top, as_edges({{1, 2}, {2, 3}, {3, 1}, {4, 4}}), 3),
            1.0);
}

TEST(Hits, ShortListKeepsDenominatorK) {
  auto top = ranked({{1, 2}});
  EXPECT_DOUBLE_EQ(eval::hits_at_k(top, as_edges({{1, 2}}), 4), 0.25);
  EXPECT_THROW(eval::hits_at_k(top, as_edges({{1, 2}}), 0), ConfigError);
}

TEST(Hits, DuplicateTestEdgesCountOnce) {
  auto top = ranked({{1, 2}, {2, 3}});
  EXPECT_EQ(eval::hits_at_k(top, as_edges({{1, 2}, {1, 2}, {1, 2}}), 2), 0.5);
}

TEST(AveragePrecision, DocumentedExamples) {
  auto test = as_edges({{1, 2}, {2, 3}});
  EXPECT_EQ(eval::ap_at_k({ranked({{1, 2}, {9, 9}})}, test, 2), 0.5);
  EXPECT_EQ(eval::ap_at_k({ranked({{2, 3}, {1, 2}}), ranked({{1, 2}, {2, 3}})},
                          test, 2),
            1.0);
  EXPECT_EQ(eval::ap_at_k({ranked({{1, 2}, {2, 3}}), ranked({{7, 7}, {8, 8}})},
                          test, 2),
            0.5);
}

TEST(AveragePrecision, EmptyTestIsAnError) {
  EXPECT_THROW(eval::ap_at_k({ranked({{1, 2}})}, {}, 1), InputError);
}

TEST(F1, DocumentedExamples) {
  auto test = as_edges({{1, 2}, {2, 3}});
  EXPECT_EQ(eval::f1_score(ranked({{1, 2}, {2, 3}}), test), 1.0);
  EXPECT_EQ(eval::f1_score(ranked({{5, 6}, {6, 5}}), test), 0.0);
  EXPECT_DOUBLE_EQ(eval::f1_score(ranked({{1, 2}, {4, 4}}), test), 0.5);
  EXPECT_THROW(eval::f1_score(ranked({{1, 2}}), {}), InputError);
}

TEST(Metrics, PermutationInvariantInTestEdges) {
  std::vector<Pair> pairs{{1, 2}, {2, 3}, {3, 1}, {1, 2}, {4, 5}};
  auto top = ranked({{1, 2}, {4, 5}, {0, 0}});
  std::mt19937 gen(3);
  const double h = eval::hits_at_k(top, as_edges(pairs), 3);
  const double a = eval::ap_at_k({top}, as_edges(pairs), 3);
  const double f = eval::f1_score(top, as_edges(pairs));
  for (int k = 0; k < 10; ++k) {
    std::shuffle(pairs.begin(), pairs.end(), gen);
    EXPECT_EQ(eval::hits_at_k(top, as_edges(pairs), 3), h);
    EXPECT_EQ(eval::ap_at_k({top}, as_edges(pairs), 3), a);
    EXPECT_EQ(eval::f1_score(top, as_edges(pairs)), f);
  }
}

TEST(Forecast, PredictionInvariants) {
  ForecastPrediction p = ranked({{1, 2}, {2, 3}});
  EXPECT_NO_THROW(p.validate());
  p.scores = {0.1, 0.2};
  EXPECT_THROW(p.validate(), InvalidStateError);
  p = ranked({{1, 2}, {1, 2}});
  EXPECT_THROW(p.validate(), InvalidStateError);
  EXPECT_EQ(ranked({{1, 2}, {2, 3}, {3, 4}}).truncated(2).pairs.size(), 2u);
}

TEST(EdgePredictive, SingleTrainingEdgeClosedForm) {
  HyperParams hp;
  hp.alpha = 0.6;
  hp.tau = 1.7;
  hp.decay1 = DecayFn::constant();
  hp.decay2 = DecayFn::constant();
  std::vector<Edge> train{{0, 1, 0.0}};
  ModelState s;
  s.follow = {0};
  s.sender_link = {0};
  s.recipient_link = {0};
  s.h = {0.3, 0.5};
  s.h_plus = 0.2;
  s.eta = {1, 1};
  auto pred = eval::edge_predictive(train, {0, s, hp}, 3.0);
  const double a = hp.alpha, t = hp.tau;
  double seen = 0;
  for (VertexId u = 0; u < 2; ++u) {
    for (VertexId v = 0; v < 2; ++v) {
      double ps = (t * s.h[u] + (u == 0)) / (t + 1);
      double pr = (t * s.h[v] + (v == 1)) / (t + 1);
      double expect = 1 / (1 + a) * ps * pr + a / (1 + a) * s.h[u] * s.h[v];
      EXPECT_NEAR(pred.at(u, v), expect, 1e-14);
      seen += expect;
    }
  }
  EXPECT_NEAR(pred.novel, 1 - seen, 1e-14);
  EXPECT_NEAR(pred.total(), 1.0, 1e-12);
}

TEST(EdgePredictive, ExpiredWindowsLeaveBaseMeasure) {
  HyperParams hp;
  hp.decay1 = DecayFn::window(2);
  hp.decay2 = DecayFn::window(2);
  std::vector<Edge> train{{0, 1, 0.0}, {1, 2, 1.0}, {2, 0, 1.5}};
  auto smp = sample_for(train, hp, 4);
  auto pred = eval::edge_predictive(train, smp, 10.0);
  const auto& h = smp.state.h;
  for (VertexId u = 0; u < 3; ++u) {
    for (VertexId v = 0; v < 3; ++v) {
      EXPECT_NEAR(pred.at(u, v), h[u] * h[v], 1e-15);
    }
  }
}

TEST(EdgePredictive, SumsToOne) {
  for (auto f : {DecayFn::window(3), DecayFn::exponential(2),
                 DecayFn::logistic(1), DecayFn::constant()}) {
    HyperParams hp;
    hp.tau = 0.4;
    hp.decay1 = f;
    hp.decay2 = DecayFn::exponential(1.5);
    Rng rng(9);
    auto tr = gen::simulate_dnnd(hp, gen::unit_schedule(80, 0.3), rng);
    auto smp = sample_for(tr.edges, hp, 10);
    auto pred = eval::edge_predictive(tr.edges, smp, tr.edges.back().time + 0.5);
    EXPECT_NEAR(pred.total(), 1.0, 1e-9) << to_string(f.kind);
    for (double p : pred.prob) EXPECT_GE(p, 0.0);
    EXPECT_GE(pred.novel, -1e-12);
  }
}

TEST(EdgePredictive, RejectsTimesBeforeTraining) {
  std::vector<Edge> train{{0, 1, 5.0}};
  EXPECT_THROW(eval::edge_predictive(train, sample_for(train, HyperParams{}, 1), 4.0),
               InputError);
}

TEST(LeftToRight, EmptyTestSetIsZero) {
  std::vector<Edge> train{{0, 1, 0.0}};
  auto res = eval::left_to_right_loglik(train, {sample_for(train, HyperParams{}, 1)},
                                        {}, eval::LtrConfig{});
  EXPECT_EQ(res.total, 0.0);
  EXPECT_TRUE(res.edge_log.empty());
}

TEST(LeftToRight, ZeroParticlesIsAConfigError) {
  std::vector<Edge> train{{0, 1, 0.0}};
  eval::LtrConfig cfg;
  cfg.particles = 0;
  EXPECT_THROW(eval::left_to_right_loglik(
                   train, {sample_for(train, HyperParams{}, 1)}, train, cfg),
               ConfigError);
}

TEST(LeftToRight, SingleEdgeIsExactForAnyParticleCount) {
  HyperParams hp;
  hp.decay1 = DecayFn::exponential(2);
  hp.decay2 = DecayFn::window(3);
  std::vector<Edge> train{{0, 1, 0.0}, {1, 2, 0.5}, {0, 2, 1.0}, {2, 1, 2.0}};
  auto smp = sample_for(train, hp, 3);
  std::vector<Edge> test{{2, 1, 2.5}};
  auto pred = eval::edge_predictive(train, smp, 2.5);
  for (std::size_t m : {1u, 7u, 100u}) {
    eval::LtrConfig cfg;
    cfg.particles = m;
    cfg.seed = m;
    auto res = eval::left_to_right_loglik(train, {smp}, test, cfg);
    EXPECT_NEAR(res.total, std::log(pred.at(2, 1)), 1e-12);
    EXPECT_NEAR(res.total, oracle::exact_heldout_logprob(train, smp.state, hp, test),
                1e-12);
  }
}

TEST(LeftToRight, SingleNovelEdgeMatchesEnumeration) {
  HyperParams hp;
  hp.sigma = 0.4;
  hp.decay1 = DecayFn::window(4);
  hp.decay2 = DecayFn::window(4);
  std::vector<Edge> train{{0, 1, 0.0}, {1, 0, 1.0}};
  auto smp = sample_for(train, hp, 6);
  for (std::vector<Edge> test : {std::vector<Edge>{{2, 2, 2.0}},
                                 std::vector<Edge>{{0, 3, 2.0}},
                                 std::vector<Edge>{{2, 3, 2.0}}}) {
    auto res = eval::left_to_right_loglik(train, {smp}, test, eval::LtrConfig{});
    EXPECT_NEAR(res.total, oracle::exact_heldout_logprob(train, smp.state, hp, test),
                1e-12);
  }
}

TEST(LeftToRight, TwoEdgesAgreeWithEnumeration) {
  HyperParams hp;
  hp.alpha = 0.7;
  hp.sigma = 0.3;
  hp.decay1 = DecayFn::exponential(1.5);
  hp.decay2 = DecayFn::exponential(2.0);
  std::vector<Edge> train{{0, 1, 0.0}, {1, 2, 0.6}, {0, 1, 1.2}, {2, 0, 1.6}};
  std::vector<Edge> test{{0, 1, 2.0}, {3, 1, 2.3}};
  auto smp = sample_for(train, hp, 8);
  const double exact = oracle::exact_heldout_logprob(train, smp.state, hp, test);
  for (bool redraw : {false, true}) {
    std::vector<double> est;
    for (int r = 0; r < 30; ++r) {
      eval::LtrConfig cfg;
      cfg.particles = 2000;
      cfg.seed = 100 + r;
      cfg.redraw_prefix = redraw;
      est.push_back(eval::left_to_right_loglik(train, {smp}, test, cfg).total);
    }
    double mean = 0, sq = 0;
    for (double x : est) mean += x / est.size();
    for (double x : est) sq += (x - mean) * (x - mean) / (est.size() - 1);
    EXPECT_NEAR(mean, exact, 4 * std::sqrt(sq / est.size()) + 1e-12);
  }
}

TEST(LeftToRight, AveragesOverSamples) {
  HyperParams hp;
  std::vector<Edge> train{{0, 1, 0.0}, {1, 0, 1.0}};
  std::vector<Edge> test{{0, 1, 2.0}};
  auto a = sample_for(train, hp, 1);
  auto b = sample_for(train, hp, 2);
  auto res = eval::left_to_right_loglik(train, {a, b}, test, eval::LtrConfig{});
  ASSERT_EQ(res.sample_total.size(), 2u);
  EXPECT_NEAR(res.total, 0.5 * (res.sample_total[0] + res.sample_total[1]), 1e-12);
}

TEST(Forecast, RanksPairsAtFirstTestTime) {
  HyperParams hp;
  hp.decay1 = DecayFn::window(5);
  hp.decay2 = DecayFn::window(5);
  Rng rng(12);
  auto tr = gen::simulate_dnnd(hp, gen::unit_schedule(60), rng);
  std::vector<Edge> train(tr.edges.begin(), tr.edges.begin() + 50);
  std::vector<Edge> test(tr.edges.begin() + 50, tr.edges.end());
  std::vector<infer::PosteriorSample> samples;
  for (int s = 0; s < 12; ++s) samples.push_back(sample_for(train, hp, s));
  auto fc = eval::forecast(train, samples, test, 15);
  EXPECT_EQ(fc.per_sample.size(), 10u);
  EXPECT_EQ(fc.averaged.pairs.size(), 15u);
  EXPECT_EQ(fc.averaged.n_test, test.size());
  EXPECT_NO_THROW(fc.averaged.validate());
  // averaged ranking is the ranking of the mean predictive
  eval::EdgePredictive mean;
  for (int s = 2; s < 12; ++s) {
    auto p = eval::edge_predictive(train, samples[s], test.front().time);
    if (mean.prob.empty()) {
      mean.num_vertices = p.num_vertices;
      mean.prob.assign(p.prob.size(), 0.0);
    }
    for (std::size_t k = 0; k < p.prob.size(); ++k) mean.prob[k] += p.prob[k] / 10;
  }
  EXPECT_EQ(eval::rank_pairs(mean, 15, test.size()).pairs, fc.averaged.pairs);
}

TEST(Forecast, RankTiesBreakBySenderThenRecipient) {
  eval::EdgePredictive p;
  p.num_vertices = 2;
  p.prob = {0.2, 0.3, 0.3, 0.1};
  auto r = eval::rank_pairs(p, 3, 1);
  EXPECT_EQ(r.pairs, (std::vector<Pair>{{0, 1}, {1, 0}, {0, 0}}));
}
