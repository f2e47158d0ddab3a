#include <gtest/gtest.h>

#include <cmath>

#include "dnnd/error.hpp"
#include "dnnd/experiments.hpp"
#include "dnnd/genmodel.hpp"

using namespace dnnd;

TEST(Ols, ExactLine) {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(2 * v - 3);
  auto f = study::ols_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, -3.0, 1e-13);
  EXPECT_NEAR(f.stderr_slope, 0.0, 1e-7);
  EXPECT_EQ(f.points, 4u);
}

TEST(Ols, HandComputedResiduals) {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 2, 5};
  auto f = study::ols_fit(x, y);
  EXPECT_NEAR(f.slope, 1.1, 1e-14);
  EXPECT_NEAR(f.intercept, 1.1, 1e-14);
  EXPECT_NEAR(f.stderr_slope, std::sqrt(0.27), 1e-14);
}

TEST(Ols, RejectsDegenerateInput) {
  std::vector<double> two{1, 2}, flat{3, 3, 3}, y{1, 2, 3};
  EXPECT_THROW(study::ols_fit(two, two), ConfigError);
  EXPECT_THROW(study::ols_fit(flat, y), ConfigError);
  EXPECT_THROW(study::ols_fit(y, two), ConfigError);
}

TEST(Checkpoints, GeometricSpacing) {
  EXPECT_EQ(study::geometric_checkpoints(1000, 100000),
            (std::vector<std::size_t>{1000, 1778, 3162, 5623, 10000, 17783, 31623,
                                      56234, 100000}));
  EXPECT_EQ(study::geometric_checkpoints(10, 25, 2), (std::vector<std::size_t>{10, 25}));
  EXPECT_TRUE(study::geometric_checkpoints(50, 10).empty());
}

TEST(Checkpoints, VerticesSeen) {
  std::vector<Edge> e{{0, 1, 0}, {1, 1, 1}, {2, 0, 2}, {3, 4, 3}};
  std::vector<std::size_t> at{1, 2, 3, 4, 10};
  EXPECT_EQ(study::vertices_seen(e, at), (std::vector<std::size_t>{2, 2, 3, 5, 5}));
}

TEST(Degrees, LogBins) {
  std::vector<Edge> e{{0, 1, 0}, {0, 2, 1}, {0, 0, 2}};
  EXPECT_EQ(study::total_degrees(e), (std::vector<std::size_t>{4, 1, 1}));
  auto bins = study::log_binned_degrees(e);
  ASSERT_EQ(bins.size(), 3u);
  EXPECT_EQ(bins[0].lo, 1u);
  EXPECT_EQ(bins[0].hi, 2u);
  EXPECT_EQ(bins[0].count, 2u);
  EXPECT_EQ(bins[1].count, 0u);
  EXPECT_EQ(bins[2].lo, 4u);
  EXPECT_EQ(bins[2].count, 1u);
  EXPECT_DOUBLE_EQ(bins[0].density, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(bins[2].density, 1.0 / 12.0);
}

TEST(Sparsity, PointsMatchSimulationAndOrderSlopes) {
  study::SparsityConfig cfg;
  cfg.sigmas = {0.0, 0.8};
  cfg.edges = 20000;
  cfg.seeds = 2;
  cfg.seed = 11;
  cfg.fit_from = 200;  // keep the fit on the tail
  auto reps = study::sparsity_study(cfg);
  ASSERT_EQ(reps.size(), 4u);

  // rebuild the first report from its seed
  HyperParams hp = cfg.base;
  Rng rng(reps[0].seed);
  auto tr = gen::simulate_dnnd(hp, gen::unit_schedule(cfg.edges), rng);
  auto marks = study::geometric_checkpoints(cfg.fit_from, cfg.edges, cfg.per_decade);
  auto nv = study::vertices_seen(tr.edges, marks);
  ASSERT_EQ(reps[0].points.size(), marks.size());
  for (std::size_t k = 0; k < marks.size(); ++k) {
    EXPECT_DOUBLE_EQ(reps[0].points[k].first, std::log(double(nv[k])));
    EXPECT_DOUBLE_EQ(reps[0].points[k].second, std::log(double(marks[k])));
  }
  EXPECT_EQ(reps[0].final_vertices, tr.num_vertices());

  // more vertex creation under sigma = 0.8 means a shallower E-vs-V curve
  for (int s = 0; s < 2; ++s) {
    EXPECT_GT(reps[s].fit.slope, reps[2 + s].fit.slope);
    EXPECT_GT(reps[s].final_vertices, 0u);
  }
}

TEST(Sparsity, FlatVertexCountGivesInfiniteSlope) {
  study::SparsityConfig cfg;
  cfg.sigmas = {0.0};
  cfg.edges = 2000;
  cfg.seeds = 1;
  cfg.fit_from = 100;
  // a single vertex: every table draws it again
  cfg.base.gamma = 1e-12;
  auto reps = study::sparsity_study(cfg);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].final_vertices, 1u);
  EXPECT_TRUE(std::isinf(reps[0].fit.slope));
}

TEST(Sparsity, MeanSlopeDecreasesWithSigma) {
  study::SparsityConfig cfg;
  cfg.sigmas = {0.0, 0.3, 0.8};
  cfg.edges = 100000;
  cfg.seeds = 5;
  cfg.seed = 40;
  std::vector<double> mean(3, 0.0);
  for (const auto& r : study::sparsity_study(cfg)) {
    const std::size_t j = r.sigma == 0.0 ? 0 : r.sigma == 0.3 ? 1 : 2;
    mean[j] += r.fit.slope / double(cfg.seeds);
  }
  EXPECT_GT(mean[0], mean[1]);
  EXPECT_GT(mean[1], mean[2]);
}
