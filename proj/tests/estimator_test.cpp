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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tmatch/dataset.hpp"
#include "tmatch/error.hpp"
#include "tmatch/estimator.hpp"

namespace tmatch {
namespace {

const DesignModel kUnit = DesignModel::uniform();

// Straight transcription of the empirical risk, kept separate from the
// library's windowed evaluator.
double naive_risk(const Dataset& d, const Template& f, const Loss& loss,
                  double theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    s += loss.value(d.ys[i] - f(d.xs[i] - theta));
  }
  return s / static_cast<double>(d.size());
}

double brute_force_min(const Dataset& d, const Template& f, const Loss& loss,
                       Interval b, int grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    best = std::min(best, naive_risk(d, f, loss, b.lo + b.width() * k / grid));
  }
  for (double x : d.xs) {
    for (const auto& disc : f.discontinuities()) {
      for (double eps : {-1e-9, 0.0, 1e-9}) {
        const double t = x - disc.location + eps;
        if (b.contains(t)) best = std::min(best, naive_risk(d, f, loss, t));
      }
    }
  }
  return best;
}

Dataset noisy(const char* name, const NoiseModel& noise, std::size_t n,
              std::uint64_t seed, double theta = 0.0) {
  Rng rng = make_rng(seed);
  return generate_shift(builtin_template(name), theta, kUnit, noise, n,
                        DesignMode::kRandom, rng);
}

TEST(Objective, HandComputedValues) {
  Dataset one;
  one.xs = {0.5};
  one.ys = {2.0};
  EXPECT_DOUBLE_EQ(objective(one, builtin_template("C"), Loss::squared(), 0.0),
                   1.0);
  const auto d = noisy("C", NoiseModel::gaussian(), 50, 3);
  double far = 0;
  for (double y : d.ys) far += std::abs(y);
  EXPECT_NEAR(objective(d, builtin_template("C"), Loss::absolute(), 10.0),
              far / 50.0, 1e-14);
  for (double theta : {-0.3, -0.01, 0.0, 0.2, 0.77}) {
    for (const auto& loss : {Loss::squared(), Loss::huber(), Loss::tukey()}) {
      for (const char* name : {"A", "B", "D", "E"}) {
        const auto f = builtin_template(name);
        EXPECT_NEAR(objective(d, f, loss, theta), naive_risk(d, f, loss, theta),
                    1e-13);
      }
    }
  }
  EXPECT_THROW(objective(Dataset{}, builtin_template("A"), Loss::squared(), 0.0),
               Error);
}

TEST(Objective, ZeroNoiseVanishesAtTruth) {
  Rng rng = make_rng(9);
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    const auto f = builtin_template(name);
    const auto d = generate_shift(f, 0.03, kUnit, NoiseModel::degenerate_zero(),
                                  300, DesignMode::kRandom, rng);
    for (const auto& loss : {Loss::squared(), Loss::absolute()}) {
      EXPECT_EQ(objective(d, f, loss, 0.03), 0.0) << name;
    }
  }
}

TEST(FitShift, ZeroNoiseLipschitzRecovery) {
  Rng rng = make_rng(4);
  const auto f = builtin_template("A");
  const auto d = generate_shift(f, 0.1, kUnit, NoiseModel::degenerate_zero(),
                                500, DesignMode::kRandom, rng);
  SearchConfig cfg;
  cfg.bounds = {-0.5, 0.5};
  for (const auto& loss : {Loss::squared(), Loss::absolute(), Loss::huber(),
                           Loss::tukey()}) {
    const auto r = fit_shift(d, f, loss, cfg);
    EXPECT_NEAR(r.theta, 0.1, 1e-7) << loss.name();
    EXPECT_FALSE(r.hint.has_value());
  }
}

TEST(FitShift, FlatObjectiveReportsHintContainingTruth) {
  Rng rng = make_rng(12);
  const auto f = builtin_template("C");
  const auto d = generate_shift(f, 0.0, kUnit, NoiseModel::degenerate_zero(),
                                10, DesignMode::kRandom, rng);
  const auto r = fit_shift(d, f, Loss::squared());
  ASSERT_TRUE(r.hint.has_value());
  EXPECT_TRUE(r.hint->contains(0.0));
  EXPECT_TRUE(r.hint->contains(r.theta));
  EXPECT_EQ(r.objective_at_min, 0.0);
  // Every point strictly inside the hint is a minimizer.
  for (double u : {0.1, 0.5, 0.9}) {
    const double t = r.hint->lo + u * r.hint->width();
    EXPECT_EQ(naive_risk(d, f, Loss::squared(), t), 0.0);
  }
}

TEST(FitShift, NeverWorseThanBruteForce) {
  const NoiseModel noises[] = {NoiseModel::gaussian(), NoiseModel::student_t(3),
                               NoiseModel::cauchy()};
  const Loss losses[] = {Loss::squared(), Loss::absolute(), Loss::huber(),
                         Loss::tukey()};
  int instance = 0;
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    for (int k = 0; k < 2; ++k, ++instance) {
      const auto& noise = noises[instance % 3];
      const auto& loss = losses[instance % 4];
      const auto f = builtin_template(name);
      const auto d = noisy(name, noise, 120, derive_seed(77, instance), 0.02);
      const SearchConfig cfg;
      const auto r = fit_shift(d, f, loss, cfg);
      const double brute = brute_force_min(d, f, loss, cfg.bounds, 40000);
      EXPECT_LE(r.objective_at_min, brute + 1e-12 * std::max(1.0, brute))
          << name << " " << loss.name() << " " << noise.name() << " excess "
          << r.objective_at_min - brute;
      EXPECT_NEAR(r.objective_at_min, naive_risk(d, f, loss, r.theta),
                  1e-12 * std::max(1.0, r.objective_at_min));
      EXPECT_TRUE(cfg.bounds.contains(r.theta));
    }
  }
}

TEST(FitShift, ShiftEquivariance) {
  const double s = 0.125;
  for (const char* name : {"A", "C", "E"}) {
    const auto f = builtin_template(name);
    const auto d = noisy(name, NoiseModel::gaussian(0.5), 150, 31);
    Dataset moved = d;
    for (double& x : moved.xs) x += s;
    SearchConfig cfg;
    SearchConfig cfg_moved;
    cfg_moved.bounds = {cfg.bounds.lo + s, cfg.bounds.hi + s};
    const auto a = fit_shift(d, f, Loss::squared(), cfg);
    const auto b = fit_shift(moved, f, Loss::squared(), cfg_moved);
    EXPECT_NEAR(b.theta, a.theta + s, 1e-7) << name;
    EXPECT_NEAR(b.objective_at_min, a.objective_at_min, 1e-9);
  }
}

TEST(FitShift, ConfigurationErrors) {
  const auto d = noisy("A", NoiseModel::gaussian(), 20, 1);
  const auto f = builtin_template("A");
  SearchConfig cfg;
  cfg.bounds = {0.1, 0.1};
  try {
    fit_shift(d, f, Loss::squared(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateBounds);
  }
  cfg = {};
  cfg.coarse_grid = 4;
  EXPECT_THROW(fit_shift(d, f, Loss::squared(), cfg), Error);
  try {
    fit_shift(Dataset{}, f, Loss::squared());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
}

TEST(FitLocationScale, ZeroNoiseRecovery) {
  struct Case {
    const char* name;
    LocationScale truth;
  };
  for (const Case& c : {Case{"A", {1.0, 0.0, 1.0}}, Case{"C", {2.0, 0.05, 1.1}},
                        Case{"B", {0.7, -0.04, 0.9}}}) {
    const auto f = builtin_template(c.name);
    Rng rng = make_rng(6);
    const auto d = generate_location_scale(f, c.truth, kUnit,
                                           NoiseModel::degenerate_zero(), 400,
                                           DesignMode::kRandom, rng);
    const auto r = fit_location_scale(d, f, Loss::squared());
    EXPECT_NEAR(r.objective_at_min, 0.0, 1e-12) << c.name;
    if (f.piecewise_constant()) {
      // Only the design points pin the edges down: any (xi, nu) that keeps
      // every design point on the same side of both box edges is exact.
      EXPECT_NEAR(r.estimate.beta, c.truth.beta, 1e-9);
      for (double x : d.xs) {
        EXPECT_EQ(f((x - r.estimate.xi) / r.estimate.nu),
                  f((x - c.truth.xi) / c.truth.nu))
            << x;
      }
    } else {
      EXPECT_NEAR(r.estimate.beta, c.truth.beta, 1e-6) << c.name;
      EXPECT_NEAR(r.estimate.xi, c.truth.xi, 1e-6) << c.name;
      EXPECT_NEAR(r.estimate.nu, c.truth.nu, 1e-6) << c.name;
    }
  }
}

TEST(FitLocationScale, SquaredProfileIsTheNormalEquation) {
  const auto f = builtin_template("A");
  Rng rng = make_rng(14);
  const auto d = generate_location_scale(f, {1.3, 0.02, 1.05}, kUnit,
                                         NoiseModel::gaussian(0.3), 300,
                                         DesignMode::kRandom, rng);
  LocationScaleSearch cfg;
  cfg.beta_bounds = {-10.0, 10.0};
  const auto r = fit_location_scale(d, f, Loss::squared(), cfg);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double fi = f((d.xs[i] - r.estimate.xi) / r.estimate.nu);
    num += d.ys[i] * fi;
    den += fi * fi;
  }
  EXPECT_NEAR(r.estimate.beta, num / den, 1e-9);
  EXPECT_NEAR(r.objective_at_min, objective(d, f, Loss::squared(), r.estimate),
              1e-12);
}

TEST(FitLocationScale, PinnedBoxNestsTheShiftFit) {
  LocationScaleSearch box;
  box.beta_bounds = {1.0, 1.0};
  box.nu_bounds = {1.0, 1.0};
  for (const char* name : {"A", "C"}) {
    const auto f = builtin_template(name);
    const auto d = noisy(name, NoiseModel::gaussian(), 200, 55);
    const auto shift = fit_shift(d, f, Loss::squared());
    const auto ls = fit_location_scale(d, f, Loss::squared(), box);
    EXPECT_EQ(ls.estimate.beta, 1.0);
    EXPECT_EQ(ls.estimate.nu, 1.0);
    if (shift.hint) {
      EXPECT_TRUE(shift.hint->contains(ls.estimate.xi)) << name;
      EXPECT_NEAR(ls.objective_at_min, shift.objective_at_min, 1e-12);
    } else {
      EXPECT_NEAR(ls.estimate.xi, shift.theta, 1e-6) << name;
    }
  }
}

TEST(FitLocationScale, InvalidBoxes) {
  const auto d = noisy("A", NoiseModel::gaussian(), 20, 1);
  LocationScaleSearch cfg;
  cfg.nu_bounds = {-1.0, 2.0};
  try {
    fit_location_scale(d, builtin_template("A"), Loss::squared(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidBounds);
  }
  cfg = {};
  cfg.xi_bounds = {0.5, -0.5};
  EXPECT_THROW(fit_location_scale(d, builtin_template("A"), Loss::squared(), cfg),
               Error);
}

Dataset regular(const Template& f, double theta, const NoiseModel& noise,
                std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return generate_shift(f, theta, kUnit, noise, n, DesignMode::kRegular, rng);
}

TEST(FitPeriodic, ZeroNoiseOnGridTruth) {
  const auto f = builtin_template("periodic:C");
  const auto d = regular(f, 0.25, NoiseModel::degenerate_zero(), 64, 1);
  const auto r = fit_periodic_correlation(d, f);
  EXPECT_EQ(r.index, 16u);
  EXPECT_DOUBLE_EQ(r.theta, 0.25);
}

TEST(FitPeriodic, MatchesGridLeastSquares) {
  const auto f = builtin_template("periodic:D");
  for (int k = 0; k < 10; ++k) {
    const std::size_t n = 20 + 7 * k;
    const auto d = regular(f, 0.1 * k - 0.3, NoiseModel::gaussian(), n, 100 + k);
    const auto r = fit_periodic_correlation(d, f);
    std::size_t best_t = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t <= n; ++t) {
      double s = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        const double u = (static_cast<double>(i) - static_cast<double>(t)) /
                         static_cast<double>(n);
        const double e = d.ys[i - 1] - f(u);
        s += e * e;
      }
      if (s < best - 1e-12) {
        best = s;
        best_t = t;
      }
    }
    EXPECT_EQ(r.index, best_t) << n;
  }
}

TEST(FitPeriodic, ConstantSignalTiesToFirstIndex) {
  // A mean-zero periodic template: +1 on [0, 0.5), -1 on [0.5, 1).
  std::vector<Piece> pieces = {Piece{0.0, 0.5, {1.0}, 0.0},
                               Piece{0.5, 1.0, {-1.0}, 0.0}};
  const Template f("square", pieces, {{0.0, 2.0}, {0.5, -2.0}},
                   Smoothness::kPiecewiseLipschitz, 1.0, true);
  Dataset d;
  for (int i = 1; i <= 10; ++i) {
    d.xs.push_back(i / 10.0);
    d.ys.push_back(3.0);
  }
  EXPECT_EQ(fit_periodic_correlation(d, f).index, 1u);
}

TEST(FitPeriodic, RejectsIrregularDesign) {
  const auto f = builtin_template("periodic:C");
  const auto d = noisy("C", NoiseModel::gaussian(), 30, 2);
  try {
    fit_periodic_correlation(d, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotRegularGrid);
  }
}

}  // namespace
}  // namespace tmatch
