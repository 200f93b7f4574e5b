// Copyright 2026 The tmatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "tmatch/error.hpp"
#include "tmatch/experiments.hpp"
#include "tmatch/statistics.hpp"

namespace tmatch {
namespace {

ExperimentConfig small(const char* tmpl, Scaling scaling) {
  ExperimentConfig c;
  c.template_spec = tmpl;
  c.scaling = scaling;
  c.ns = {300};
  c.repeats = 40;
  c.seed = 2024;
  c.workers = 1;
  return c;
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
  for (const char* tmpl : {"A", "E"}) {
    auto cfg = small(tmpl, tmpl[0] == 'A' ? Scaling::kSqrtN : Scaling::kN);
    cfg.loss = "huber";
    cfg.noise = "t:3";
    const auto one = run_monte_carlo(cfg);
    cfg.workers = 4;
    const auto four = run_monte_carlo(cfg);
    EXPECT_EQ(one.scenarios[0].scaled_errors, four.scenarios[0].scaled_errors);
    EXPECT_EQ(one.to_json().dump(), four.to_json().dump());
  }
}

TEST(MonteCarlo, ScalingConsistency) {
  const auto cfg = small("B", Scaling::kSqrtN);
  const auto r = run_monte_carlo(cfg);
  const auto& s = r.scenarios[0];
  EXPECT_EQ(s.failures, 0u);
  EXPECT_EQ(s.rate, std::sqrt(300.0));
  EXPECT_NEAR(s.mean_abs_scaled_error, s.rate * s.mean_abs_error,
              1e-12 * s.mean_abs_scaled_error);
  double total = 0;
  for (double e : s.scaled_errors) total += std::abs(e);
  EXPECT_NEAR(s.mean_abs_scaled_error, total / s.scaled_errors.size(),
              1e-12 * s.mean_abs_scaled_error);
  ASSERT_TRUE(s.tau.has_value());
  ASSERT_TRUE(s.ks_vs_normal.has_value());
  EXPECT_EQ(s.quantiles.size(), 5u);
  EXPECT_LE(s.quantiles.front().second, s.quantiles.back().second);
}

TEST(MonteCarlo, ZeroNoiseErrorsStayWithinTolerance) {
  auto cfg = small("A", Scaling::kSqrtN);
  cfg.noise_override = NoiseModel::degenerate_zero();
  cfg.theta_star = 0.031;
  const auto r = run_monte_carlo(cfg);
  for (double e : r.scenarios[0].scaled_errors) {
    EXPECT_LE(std::abs(e), r.scenarios[0].rate * cfg.search.refine_tol * 10);
  }
  EXPECT_FALSE(r.scenarios[0].tau.has_value());
}

TEST(MonteCarlo, ZeroNoiseBoxErrorStaysInsideTheFlat) {
  auto cfg = small("C", Scaling::kN);
  cfg.noise_override = NoiseModel::degenerate_zero();
  cfg.mode = DesignMode::kFixed;
  // On the fixed grid i/(n+1) the flat around the truth has width 1/(n+1).
  const auto r = run_monte_carlo(cfg);
  const double n = 300;
  for (double e : r.scenarios[0].scaled_errors) {
    EXPECT_LE(std::abs(e), n / (n + 1));
  }
}

TEST(MonteCarlo, RateSlopeOverSampleSizes) {
  auto cfg = small("A", Scaling::kSqrtN);
  cfg.ns = {100, 400, 1600};
  cfg.repeats = 60;
  const auto r = run_monte_carlo(cfg);
  ASSERT_TRUE(r.rate_slope.has_value());
  std::vector<double> ns, errs;
  for (const auto& s : r.scenarios) {
    ns.push_back(static_cast<double>(s.n));
    errs.push_back(s.mean_abs_error);
  }
  EXPECT_DOUBLE_EQ(*r.rate_slope, rate_slope(ns, errs));
}

TEST(MonteCarlo, TheorySilentCauchySquared) {
  auto cfg = small("A", Scaling::kSqrtN);
  cfg.noise = "cauchy";
  cfg.repeats = 5;
  const auto r = run_monte_carlo(cfg);
  EXPECT_TRUE(r.theory_silent);
  EXPECT_FALSE(r.scenarios[0].tau.has_value());
  EXPECT_TRUE(r.to_json()["theory_silent"].get<bool>());
}

TEST(MonteCarlo, PoissonReferenceForJumpTemplates) {
  auto cfg = small("C", Scaling::kN);
  cfg.limit_reference_draws = 500;
  const auto r = run_monte_carlo(cfg);
  ASSERT_TRUE(r.scenarios[0].ks_vs_poisson.has_value());
  EXPECT_GE(*r.scenarios[0].ks_vs_poisson, 0.0);
  EXPECT_LE(*r.scenarios[0].ks_vs_poisson, 1.0);
}

TEST(MonteCarlo, LocationScaleSummary) {
  auto cfg = small("C", Scaling::kN);
  cfg.model = Model::kLocationScale;
  cfg.repeats = 8;
  cfg.truth = {1.0, 0.0, 1.0};
  const auto r = run_monte_carlo(cfg);
  const auto& s = r.scenarios[0];
  EXPECT_EQ(s.failures, 0u);
  ASSERT_TRUE(s.location_scale.has_value());
  EXPECT_EQ(s.location_scale->beta_errors.size(), 8u);
  ASSERT_TRUE(s.location_scale->beta_var.has_value());
  EXPECT_NEAR(*s.location_scale->beta_var, 2.0, 1e-9);
}

TEST(MonteCarlo, PeriodicModel) {
  auto cfg = small("periodic:C", Scaling::kN);
  cfg.model = Model::kPeriodic;
  cfg.mode = DesignMode::kRegular;
  cfg.theta_star = 0.1;
  cfg.noise_override = NoiseModel::degenerate_zero();
  const auto r = run_monte_carlo(cfg);
  for (double e : r.scenarios[0].scaled_errors) EXPECT_EQ(e, 0.0);
}

TEST(MonteCarlo, InvalidConfigurations) {
  auto cfg = small("A", Scaling::kSqrtN);
  cfg.repeats = 0;
  EXPECT_THROW(run_monte_carlo(cfg), Error);
  cfg = small("Q", Scaling::kSqrtN);
  EXPECT_THROW(run_monte_carlo(cfg), Error);
  cfg = small("A", Scaling::kSqrtN);
  cfg.noise = "weird";
  EXPECT_THROW(run_monte_carlo(cfg), Error);
}

TEST(ExperimentConfigJson, RoundTrip) {
  auto cfg = small("E", Scaling::kN);
  cfg.loss = "tukey:3";
  cfg.ns = {100, 200};
  cfg.search.bounds = {-0.1, 0.2};
  cfg.search.coarse_grid = 64;
  cfg.ls_search.nu_bounds = {0.8, 1.25};
  cfg.truth = {2.0, 0.05, 1.1};
  cfg.limit_reference_draws = 77;
  const auto j = cfg.to_json();
  const auto back = ExperimentConfig::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_EQ(back.ns, cfg.ns);
  EXPECT_EQ(back.search.bounds, cfg.search.bounds);
  EXPECT_EQ(back.truth.nu, 1.1);
}

TEST(ExperimentConfigJson, PartialDocumentsKeepDefaults) {
  const auto cfg = ExperimentConfig::from_json(
      nlohmann::json::parse(R"({"template": "C", "n": 500, "scaling": "n"})"));
  EXPECT_EQ(cfg.template_spec, "C");
  EXPECT_EQ(cfg.ns, std::vector<std::size_t>{500});
  EXPECT_EQ(cfg.scaling, Scaling::kN);
  EXPECT_EQ(cfg.repeats, 200u);
  EXPECT_THROW(ExperimentConfig::from_json(
                   nlohmann::json::parse(R"({"scaling": "log"})")),
               Error);
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::parse(R"({"n": "x"})")),
               Error);
}

TEST(TableSuite, ShapeAndDeterminism) {
  TableSuiteConfig cfg;
  cfg.repeats = 2;
  cfg.n = 150;
  cfg.ns = {100, 150, 200};
  cfg.workers = 1;
  const auto a = run_table_suite(cfg);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].name, "table1");
  EXPECT_EQ(a[0].rows.size(), 6u);
  EXPECT_EQ(a[2].rows.size(), 9u);
  EXPECT_EQ(a[0].header,
            (std::vector<std::string>{"template", "noise", "squared",
                                      "absolute", "huber", "tukey"}));
  EXPECT_EQ(a[1].header, (std::vector<std::string>{"n", "100", "150", "200"}));
  EXPECT_EQ(a[3].rows[0][0], "mean_abs_n_error");
  cfg.workers = 3;
  const auto b = run_table_suite(cfg);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].to_csv(), b[k].to_csv());
}

TEST(TableSuite, CsvLayout) {
  Table t;
  t.header = {"a", "b"};
  t.rows = {{"1", "2"}, {"3", "4"}};
  EXPECT_EQ(t.to_csv(), "a,b\n1,2\n3,4\n");
}

TEST(ScenarioSeed, DependsOnLabelAndMaster) {
  EXPECT_EQ(scenario_seed(7, "x"), scenario_seed(7, "x"));
  EXPECT_NE(scenario_seed(7, "x"), scenario_seed(7, "y"));
  EXPECT_NE(scenario_seed(7, "x"), scenario_seed(8, "x"));
}

}  // namespace
}  // namespace tmatch
