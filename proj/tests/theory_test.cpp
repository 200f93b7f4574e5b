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
#include <numbers>

#include "tmatch/error.hpp"
#include "tmatch/theory.hpp"

namespace tmatch {
namespace {

using std::numbers::pi;

const DesignModel kUnit = DesignModel::uniform();
const NoiseModel kGauss = NoiseModel::gaussian();

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * pi); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// E[Z^2 ∧ c^2] / P(|Z| <= c)^2 for standard normal Z, in closed form.
double huber_constant_gaussian(double c) {
  const double p = 2 * Phi(c) - 1;
  const double num = p - 2 * c * phi(c) + 2 * c * c * (1 - Phi(c));
  return num / (p * p);
}

// E|Z + a| - E|Z| for standard normal Z.
double absolute_excess_gaussian(double a) {
  return a * (2 * Phi(a) - 1) + 2 * phi(a) - 2 * phi(0);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(CPhiLoss, ClosedForms) {
  EXPECT_NEAR(c_phi_loss(Loss::squared(), kGauss), 1.0, 1e-12);
  EXPECT_NEAR(c_phi_loss(Loss::squared(), NoiseModel::gaussian(2)), 4.0, 1e-12);
  EXPECT_NEAR(c_phi_loss(Loss::squared(), NoiseModel::student_t(3)), 3.0, 1e-12);
  EXPECT_NEAR(c_phi_loss(Loss::absolute(), kGauss), pi / 2, 1e-12);
  EXPECT_NEAR(c_phi_loss(Loss::absolute(), NoiseModel::cauchy()), pi * pi / 4,
              1e-12);
  EXPECT_NEAR(c_phi_loss(Loss::absolute(), NoiseModel::student_t(3)),
              3 * pi * pi / 16, 1e-12);
  EXPECT_NEAR(c_phi_loss(Loss::absolute(), NoiseModel::laplace()), 1.0, 1e-12);
  for (double c : {0.3, 1.0, 1.345, 2.5}) {
    EXPECT_NEAR(c_phi_loss(Loss::huber(c), kGauss), huber_constant_gaussian(c),
                1e-8)
        << c;
  }
}

TEST(CPhiLoss, HuberInterpolatesBetweenSquaredAndAbsolute) {
  EXPECT_NEAR(c_phi_loss(Loss::huber(100), kGauss), 1.0, 1e-3);
  EXPECT_NEAR(c_phi_loss(Loss::huber(0.01), kGauss), pi / 2, 1e-2);
}

TEST(CPhiLoss, TukeyAgreesWithSimpsonRule) {
  const Loss tukey = Loss::tukey();
  const double c = tukey.threshold();
  // Composite Simpson on [-c, c]; both integrands vanish outside.
  const int m = 200000;
  const double h = 2 * c / m;
  double num = 0, den = 0;
  for (int k = 0; k <= m; ++k) {
    const double z = -c + k * h;
    const double w = (k == 0 || k == m) ? 1 : (k % 2 ? 4 : 2);
    num += w * tukey.d1(z) * tukey.d1(z) * phi(z);
    den += w * tukey.d2(z) * phi(z);
  }
  num *= h / 3;
  den *= h / 3;
  EXPECT_NEAR(c_phi_loss(tukey, kGauss), num / (den * den), 1e-8);
  EXPECT_NEAR(curvature_constant(tukey, kGauss), 0.5 * den, 1e-10);
  EXPECT_NEAR(score_variance(tukey, kGauss), num, 1e-10);
}

TEST(CPhiLoss, InadmissiblePairs) {
  EXPECT_EQ(code_of([] { c_phi_loss(Loss::squared(), NoiseModel::cauchy()); }),
            ErrorCode::kInfiniteMoment);
  EXPECT_EQ(code_of([] {
              c_phi_loss(Loss::squared(), NoiseModel::student_t(2));
            }),
            ErrorCode::kInfiniteMoment);
}

TEST(AsymptoticVariance, TemplateAExamples) {
  const auto a = builtin_template("A");
  const auto sq = asymptotic_variance_shift(a, kUnit, Loss::squared(), kGauss, 0);
  EXPECT_NEAR(sq.denom, 8.0, 1e-10);
  EXPECT_NEAR(sq.tau2, 0.125, 1e-10);
  EXPECT_NEAR(sq.c0, 1.0, 1e-10);
  EXPECT_NEAR(sq.c1, 4.0, 1e-10);
  EXPECT_NEAR(sq.info, 8.0, 1e-8);
  EXPECT_NEAR(std::sqrt(sq.tau2) * std::sqrt(2 / pi), 0.2821, 1e-4);
  const auto ab = asymptotic_variance_shift(a, kUnit, Loss::absolute(), kGauss, 0);
  EXPECT_NEAR(ab.tau2, pi / 16, 1e-10);
  EXPECT_NEAR(ab.c0, phi(0), 1e-12);
  // Shifting the truth by 0.1 leaves the support inside [0, 1].
  const auto moved =
      asymptotic_variance_shift(a, kUnit, Loss::squared(), kGauss, 0.1);
  EXPECT_NEAR(moved.tau2, 0.125, 1e-10);
  // With the truth at 0.4 only the rising half stays inside the design.
  const auto clipped =
      asymptotic_variance_shift(a, kUnit, Loss::squared(), kGauss, 0.4);
  EXPECT_NEAR(clipped.denom, 16 * 0.35, 1e-9);
}

TEST(AsymptoticVariance, TemplateBDenominator) {
  // f = (1-u^2)^3 with u = 4x-2, so f'(x)^2 = 576 u^2 (1-u^2)^4 and
  // dx = du/4. The u-integral over [-1, 1] is the beta value B(3/2, 5).
  const double integral_u = 256.0 / 3465.0;
  const double expected = 144.0 * integral_u;
  const auto r = asymptotic_variance_shift(builtin_template("B"), kUnit,
                                           Loss::squared(), kGauss, 0);
  EXPECT_NEAR(r.denom, expected, 1e-9 * expected);
  EXPECT_NEAR(r.tau2, 1.0 / expected, 1e-9);
}

TEST(AsymptoticVariance, CramerRaoBound) {
  const NoiseModel noises[] = {kGauss, NoiseModel::student_t(3),
                               NoiseModel::cauchy(), NoiseModel::laplace()};
  const Loss losses[] = {Loss::squared(), Loss::absolute(), Loss::huber(),
                         Loss::tukey()};
  for (const char* name : {"A", "B"}) {
    const auto f = builtin_template(name);
    for (const auto& noise : noises) {
      for (const auto& loss : losses) {
        if (loss == Loss::squared() && !std::isfinite(noise.variance())) continue;
        const auto r = asymptotic_variance_shift(f, kUnit, loss, noise, 0);
        EXPECT_NEAR(r.tau2, r.c_phi_loss / r.denom, 1e-10 * r.tau2);
        const bool mle =
            (loss == Loss::squared() && noise == kGauss) ||
            (loss == Loss::absolute() && noise == NoiseModel::laplace());
        if (mle) {
          EXPECT_NEAR(r.info * r.tau2, 1.0, 1e-6) << loss.name() << noise.name();
        } else {
          EXPECT_GT(r.info * r.tau2, 1.0 + 1e-6) << loss.name() << noise.name();
        }
      }
    }
  }
}

TEST(AsymptoticVariance, RejectsDiscontinuousTemplates) {
  for (const char* name : {"C", "D", "E"}) {
    EXPECT_EQ(code_of([&] {
                asymptotic_variance_shift(builtin_template(name), kUnit,
                                          Loss::squared(), kGauss, 0);
              }),
              ErrorCode::kNonSmoothTemplate);
  }
}

TEST(LocationInformation, KnownValues) {
  EXPECT_NEAR(location_information(kGauss), 1.0, 1e-10);
  EXPECT_NEAR(location_information(NoiseModel::gaussian(2)), 0.25, 1e-10);
  EXPECT_NEAR(location_information(NoiseModel::cauchy()), 0.5, 1e-10);
  EXPECT_NEAR(location_information(NoiseModel::student_t(3)), 4.0 / 6.0, 1e-10);
  EXPECT_NEAR(location_information(NoiseModel::laplace(0.5)), 4.0, 1e-10);
}

TEST(Delta, ExamplesAndSymmetry) {
  const auto c = builtin_template("C");
  EXPECT_NEAR(delta(c, kUnit, 0.1, 0.0), 0.2, 1e-10);
  EXPECT_EQ(delta(c, kUnit, 0.05, 0.05), 0.0);
  const auto a = builtin_template("A");
  EXPECT_NEAR(delta(a, kUnit, 1e-3, 0.0), 8e-6, 8e-8);
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    const auto f = builtin_template(name);
    for (double t1 : {-0.2, 0.0, 0.013, 0.3}) {
      for (double t2 : {-0.1, 0.0, 0.07}) {
        EXPECT_EQ(delta(f, kUnit, t1, t2), delta(f, kUnit, t2, t1));
        EXPECT_GE(delta(f, kUnit, t1, t2), 0.0);
      }
    }
  }
}

TEST(JumpConstant, ValuesAndJumpLaw) {
  EXPECT_NEAR(jump_constant(builtin_template("C"), kUnit, 0), 2.0, 1e-12);
  EXPECT_NEAR(jump_constant(builtin_template("D"), kUnit, 0), 4.0, 1e-12);
  EXPECT_NEAR(jump_constant(builtin_template("E"), kUnit, 0), 1.0, 1e-12);
  // The right edge of C leaves the design support.
  EXPECT_NEAR(jump_constant(builtin_template("C"), kUnit, 0.3), 1.0, 1e-12);
  for (const char* name : {"C", "D", "E"}) {
    const auto f = builtin_template(name);
    const double d = jump_constant(f, kUnit, 0);
    for (double t : {1e-4, -1e-4}) {
      EXPECT_NEAR(delta(f, kUnit, t, 0) / std::abs(t), d, 0.01 * d) << name;
    }
  }
  EXPECT_EQ(code_of([] { jump_constant(builtin_template("A"), kUnit, 0); }),
            ErrorCode::kNoDiscontinuity);
}

TEST(ShiftLimitComponents, TemplateC) {
  const auto comps = shift_limit_components(builtin_template("C"), kUnit, 0);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps[0].intensity, 1.0);
  EXPECT_EQ(comps[1].intensity, 1.0);
  EXPECT_EQ(std::abs(comps[0].jump), 1.0);
  EXPECT_EQ(std::abs(comps[1].jump), 1.0);
}

TEST(PopulationRisk, AtTruthAndCurvatureRatio) {
  const auto a = builtin_template("A");
  EXPECT_NEAR(population_risk(a, kUnit, Loss::squared(), kGauss, 0, 0), 1.0,
              1e-8);
  EXPECT_NEAR(population_risk(a, kUnit, Loss::absolute(), kGauss, 0, 0),
              2 * phi(0), 1e-8);
  for (const auto& loss : {Loss::squared(), Loss::huber()}) {
    const double c0 = curvature_constant(loss, kGauss);
    const double ex = population_risk(a, kUnit, loss, kGauss, 1e-3, 0) -
                      population_risk(a, kUnit, loss, kGauss, 0, 0);
    const double ratio = ex / delta(a, kUnit, 1e-3, 0);
    EXPECT_NEAR(ratio, c0, 0.01 * c0) << loss.name();
    const double direct = excess_risk(a, kUnit, loss, kGauss, 1e-3, 0);
    EXPECT_NEAR(direct / delta(a, kUnit, 1e-3, 0), c0, 0.01 * c0);
  }
  EXPECT_NEAR(curvature_constant(Loss::huber(), kGauss),
              0.5 * (2 * Phi(1.345) - 1), 1e-10);
}

TEST(PopulationRisk, BoxTemplateExcessIsPiecewiseExact) {
  const auto c = builtin_template("C");
  for (double t : {0.02, 0.1, -0.15}) {
    const double width = 2 * std::abs(t);
    EXPECT_NEAR(excess_risk(c, kUnit, Loss::squared(), kGauss, t, 0), width,
                1e-10);
    EXPECT_NEAR(excess_risk(c, kUnit, Loss::absolute(), kGauss, t, 0),
                width * absolute_excess_gaussian(1.0), 1e-9);
  }
  EXPECT_GT(population_risk(c, kUnit, Loss::absolute(), kGauss, 10, 0) -
                population_risk(c, kUnit, Loss::absolute(), kGauss, 0, 0),
            0.0);
  EXPECT_NEAR(loss_shift_excess(Loss::squared(), kGauss, 0.7), 0.49, 1e-15);
  EXPECT_NEAR(loss_shift_excess(Loss::absolute(), kGauss, -0.7),
              absolute_excess_gaussian(0.7), 1e-10);
}

TEST(PopulationRisk, HeavyTailsNeedBoundedLosses) {
  const auto c = builtin_template("C");
  const auto cauchy = NoiseModel::cauchy();
  EXPECT_EQ(code_of([&] {
              population_risk(c, kUnit, Loss::absolute(), cauchy, 0.1, 0);
            }),
            ErrorCode::kInadmissiblePair);
  EXPECT_EQ(code_of([&] {
              population_risk(c, kUnit, Loss::squared(), cauchy, 0.1, 0);
            }),
            ErrorCode::kInadmissiblePair);
  // Tukey is bounded, so E[L(Z)] exists for Cauchy noise.
  const double r0 = population_risk(c, kUnit, Loss::tukey(), cauchy, 0, 0);
  EXPECT_GT(r0, 0.0);
  EXPECT_LT(r0, 1.0);
  // Excess risk is always finite for the absolute loss.
  EXPECT_GT(excess_risk(c, kUnit, Loss::absolute(), cauchy, 0.1, 0), 0.0);
}

TEST(RelativeEfficiency, Gaussian) {
  EXPECT_NEAR(relative_efficiency(Loss::squared(), kGauss), 1.0, 1e-12);
  EXPECT_NEAR(relative_efficiency(Loss::absolute(), kGauss), pi / 2, 1e-12);
  for (double c : {0.1, 0.5, 1.345, 3.0, 10.0}) {
    // For large c the excess over 1 is far below double precision.
    EXPECT_GE(relative_efficiency(Loss::huber(c), kGauss), 1.0 - 1e-12) << c;
  }
  EXPECT_THROW(relative_efficiency(Loss::huber(), NoiseModel::cauchy()), Error);
}

TEST(LocationScaleAsymptotics, TemplateC) {
  const auto r = location_scale_asymptotics(builtin_template("C"), kUnit,
                                            Loss::squared(), kGauss, {});
  EXPECT_NEAR(r.denom, 0.5, 1e-12);
  EXPECT_NEAR(r.beta_var, 2.0, 1e-10);
  ASSERT_EQ(r.xi.size(), 2u);
  ASSERT_EQ(r.nu.size(), 2u);
  EXPECT_EQ(r.xi[0].intensity, 1.0);
  EXPECT_EQ(r.xi[1].intensity, 1.0);
  EXPECT_NEAR(r.nu[0].intensity, 0.25, 1e-15);
  EXPECT_NEAR(r.nu[1].intensity, 0.75, 1e-15);
  const auto amp = location_scale_asymptotics(builtin_template("C"), kUnit,
                                              Loss::squared(), kGauss,
                                              {2.0, 0.0, 1.0});
  EXPECT_NEAR(amp.beta_var, 2.0, 1e-10);
  EXPECT_EQ(std::abs(amp.xi[0].jump), 2.0);
}

}  // namespace
}  // namespace tmatch
