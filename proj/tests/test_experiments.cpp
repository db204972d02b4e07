#include <gtest/gtest.h>

#include "convsdf/experiments.hpp"

using namespace convsdf;

namespace {

ExperimentConfig small_example1() {
  auto c = ExperimentConfig::defaults("example1");
  c.min = {-0.03, -0.03};
  c.max = {0.03, 0.03};
  c.sources = 40;
  c.trials = 2;
  c.taus = {1e-3, 2e-3};
  return c;
}

}  // namespace

TEST(ExperimentConfig, ProtocolGrids) {
  using C = std::vector<std::size_t>;
  EXPECT_EQ(ExperimentConfig::defaults("example1").grid().counts(), (C{125, 125}));
  EXPECT_EQ(ExperimentConfig::defaults("example2").grid().counts(), (C{253, 253}));
  EXPECT_EQ(ExperimentConfig::defaults("example3").grid().counts(), (C{257, 257}));
  EXPECT_EQ(ExperimentConfig::defaults("example4").grid().counts(), (C{61, 45, 25}));
  EXPECT_EQ(ExperimentConfig::defaults("example5").grid().counts(), (C{65, 65, 65}));
  EXPECT_EQ(ExperimentConfig::defaults("example1").taus.size(), 9u);
  EXPECT_EQ(ExperimentConfig::defaults("example2").sources, 10000u);
}

TEST(ExperimentConfig, Rejections) {
  EXPECT_THROW(ExperimentConfig::defaults("example9"), ValidationError);
  auto c = ExperimentConfig::defaults("example1");
  c.trials = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ExperimentConfig::defaults("example1");
  c.taus = {1e-3, -1.0};
  EXPECT_THROW(c.validate(), ValidationError);
  c = ExperimentConfig::defaults("example1");
  c.name = "nope";
  EXPECT_THROW(run_experiment(c), ValidationError);
}

TEST(Sublinear, RatioLogic) {
  auto row = [](double tau, double mean) { return TauSweepRow{tau, mean, mean, mean, 0.0, {mean}}; };
  auto good = check_sublinear({row(1, 1.0), row(2, 1.5), row(3, 2.0)});
  EXPECT_TRUE(good.monotone);
  EXPECT_TRUE(good.sublinear);
  ASSERT_EQ(good.error_ratios.size(), 2u);
  EXPECT_DOUBLE_EQ(good.error_ratios[0], 1.5);
  EXPECT_DOUBLE_EQ(good.tau_ratios[1], 1.5);
  auto fast = check_sublinear({row(1, 1.0), row(2, 2.5)});
  EXPECT_TRUE(fast.monotone);
  EXPECT_FALSE(fast.sublinear);
  auto flat = check_sublinear({row(1, 1.0), row(2, 1.0)});
  EXPECT_FALSE(flat.monotone);
}

TEST(Experiment, ReportsAreReproducible) {
  auto c = small_example1();
  auto a = run_experiment(c);
  auto b = run_experiment(c);
  EXPECT_EQ(a.json.dump(), b.json.dump());
  EXPECT_EQ(a.csv, b.csv);
  c.seed = 2;
  EXPECT_NE(run_experiment(c).csv, a.csv);
}

TEST(Experiment, ConfigIsEmbedded) {
  auto c = small_example1();
  auto r = run_experiment(c);
  EXPECT_EQ(r.json["experiment"], "example1");
  EXPECT_EQ(r.json["config"]["seed"], 1);
  EXPECT_EQ(r.json["config"]["sources"], 40);
  EXPECT_EQ(r.json["config"]["zero_policy"], "count_as_zero");
  EXPECT_EQ(r.json["config"]["counts"], (std::vector<std::size_t>{32, 32}));
  ASSERT_EQ(r.json["results"].size(), 2u);
  EXPECT_EQ(r.json["results"][0]["trial_errors"].size(), 2u);
  EXPECT_TRUE(r.json.contains("growth"));
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "tau,mean_error,max_error,min_error,bound");
}

TEST(Experiment, TauSweepRowsAreConsistent) {
  auto rows = tau_sweep(small_example1());
  for (const auto& r : rows) {
    EXPECT_LE(r.min, r.mean);
    EXPECT_LE(r.mean, r.max);
    EXPECT_GT(r.min, 0.0);
    EXPECT_DOUBLE_EQ(r.bound, r.tau * std::log(40.0));
  }
  EXPECT_LT(rows[0].mean, rows[1].mean);
}

TEST(Experiment, BaselinesOnSmallGrid) {
  auto c = ExperimentConfig::defaults("example2");
  c.min = {-0.03, -0.03};
  c.max = {0.03, 0.03};
  c.spacing = 1.0 / 512;
  c.sources = 30;
  c.trials = 2;
  c.taus = {1e-3};
  auto s = compare_baselines(c);
  ASSERT_EQ(s.trials.size(), 2u);
  for (const auto& t : s.trials) {
    EXPECT_GT(t.convolution, 0.0);
    EXPECT_GT(t.sweeping, 0.0);
    EXPECT_LE(t.sources, 30u);
  }
  EXPECT_NEAR(s.ratio, s.convolution_mean / s.sweeping_mean, 1e-15);
}

TEST(Experiment, MeshesClassifyOnCoarseGrid) {
  auto c = ExperimentConfig::defaults("example5");
  c.spacing = 1.0 / 128;
  for (const auto& name : c.shapes) {
    auto r = run_mesh(c, name);
    EXPECT_GE(r.agreement, 0.99) << name;
    EXPECT_GT(r.interior, 0u) << name;
    EXPECT_NEAR(r.mu_inside_mean, 1.0, 0.1) << name;
  }
  EXPECT_THROW(experiment_mesh("torus"), ValidationError);
}
