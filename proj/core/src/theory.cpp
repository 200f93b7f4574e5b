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

#include "tmatch/theory.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tmatch/error.hpp"
#include "tmatch/quadrature.hpp"

namespace tmatch {
namespace {

double over_real_line(const NoiseModel& noise, const quad::Integrand& g,
                      std::vector<double> breaks = {}) {
  for (double k : noise.kinks()) breaks.push_back(k);
  return quad::integrate_real_line(g, std::move(breaks), noise.scale());
}

// 2 ∫_0^c g φ for an even integrand g.
double symmetric_core(const NoiseModel& noise, double c,
                      const quad::Integrand& g) {
  return 2.0 * quad::integrate(
                   [&](double z) { return g(z) * noise.density(z); }, 0.0, c);
}

// Knots of f(· - θ) inside the design support; periodic templates repeat
// their knots every unit.
std::vector<double> shifted_knots(const Template& f, double theta,
                                  const Interval& support, double scale = 1.0) {
  std::vector<double> out;
  for (double k : f.knots()) {
    const double at = theta + scale * k;
    if (!f.periodic()) {
      out.push_back(at);
      continue;
    }
    for (double m = std::floor(support.lo - at); at + m <= support.hi; m += 1.0) {
      out.push_back(at + m);
    }
  }
  return out;
}

double over_design(const DesignModel& design, const quad::Integrand& g,
                   std::vector<double> breaks) {
  const auto& s = design.support();
  return quad::integrate(
      [&](double x) { return g(x) * design.density(x); }, s.lo, s.hi,
      std::move(breaks));
}

double wrap_unit(double x) { return x - std::floor(x); }

}  // namespace

double c_phi_loss(const Loss& loss, const NoiseModel& noise) {
  if (!noise.has_density()) {
    throw Error(ErrorCode::kInadmissiblePair, "noise model has no density");
  }
  switch (loss.kind()) {
    case LossKind::kSquared: {
      const double v = noise.variance();
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInfiniteMoment,
                    noise.name() + " has no finite second moment");
      }
      return v;
    }
    case LossKind::kAbsolute: {
      const double phi0 = noise.density(0.0);
      return 1.0 / (4.0 * phi0 * phi0);
    }
    case LossKind::kHuber:
    case LossKind::kTukey: {
      const double num = score_variance(loss, noise);
      const double curv = 2.0 * curvature_constant(loss, noise);
      if (!(curv > 1e-12)) {
        throw Error(ErrorCode::kZeroCurvature,
                    "E[L''(Z)] is not positive for " + loss.name() + " under " +
                        noise.name());
      }
      return num / (curv * curv);
    }
  }
  return 0.0;
}

double curvature_constant(const Loss& loss, const NoiseModel& noise) {
  const double c = loss.threshold();
  switch (loss.kind()) {
    case LossKind::kSquared: return 1.0;
    case LossKind::kAbsolute: return noise.density(0.0);
    case LossKind::kHuber: return 0.5 * (1.0 - 2.0 * noise.cdf(-c));
    case LossKind::kTukey:
      return 0.5 * symmetric_core(noise, c,
                                  [&](double z) { return loss.d2(z); });
  }
  return 0.0;
}

double score_variance(const Loss& loss, const NoiseModel& noise) {
  const double c = loss.threshold();
  switch (loss.kind()) {
    case LossKind::kSquared: {
      const double v = noise.variance();
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInfiniteMoment,
                    noise.name() + " has no finite second moment");
      }
      return 4.0 * v;
    }
    case LossKind::kAbsolute: return 1.0;
    case LossKind::kHuber:
      return symmetric_core(noise, c, [](double z) { return z * z; }) +
             2.0 * c * c * noise.cdf(-c);
    case LossKind::kTukey:
      return symmetric_core(noise, c, [&](double z) {
        const double d = loss.d1(z);
        return d * d;
      });
  }
  return 0.0;
}

double location_information(const NoiseModel& noise) {
  if (!noise.has_density()) {
    throw Error(ErrorCode::kInadmissiblePair, "noise model has no density");
  }
  return over_real_line(noise, [&](double z) {
    const double s = noise.score(z);
    return s * s * noise.density(z);
  });
}

void require_admissible(const Loss& loss, const NoiseModel& noise) {
  if (!noise.has_density()) {
    throw Error(ErrorCode::kInadmissiblePair, "noise model has no density");
  }
  if (loss.kind() == LossKind::kSquared && !std::isfinite(noise.variance())) {
    throw Error(ErrorCode::kInadmissiblePair,
                "squared loss needs noise with a finite variance, got " +
                    noise.name());
  }
  if (loss.kind() == LossKind::kAbsolute && !(noise.density(0.0) > 0.0)) {
    throw Error(ErrorCode::kInadmissiblePair,
                "absolute loss needs a positive noise density at 0");
  }
}

AsymptoticReport asymptotic_variance_shift(const Template& f,
                                           const DesignModel& design,
                                           const Loss& loss,
                                           const NoiseModel& noise,
                                           double theta_star) {
  if (f.smoothness() != Smoothness::kLipschitz) {
    throw Error(ErrorCode::kNonSmoothTemplate,
                "template '" + f.name() + "' is not Lipschitz");
  }
  require_admissible(loss, noise);
  AsymptoticReport r;
  r.c_phi_loss = c_phi_loss(loss, noise);
  r.denom = over_design(
      design,
      [&](double x) {
        const double d = f.derivative(x - theta_star);
        return d * d;
      },
      shifted_knots(f, theta_star, design.support()));
  if (!(r.denom > 0.0)) {
    throw Error(ErrorCode::kNonSmoothTemplate,
                "template has no slope on the design support");
  }
  r.tau2 = r.c_phi_loss / r.denom;
  r.c0 = curvature_constant(loss, noise);
  r.c1 = score_variance(loss, noise);
  r.info = r.denom * location_information(noise);
  return r;
}

double delta(const Template& f, const DesignModel& design, double theta1,
             double theta2) {
  if (theta1 == theta2) return 0.0;
  auto breaks = shifted_knots(f, theta1, design.support());
  for (double b : shifted_knots(f, theta2, design.support())) breaks.push_back(b);
  return over_design(
      design,
      [&](double x) {
        const double d = f.eval(x - theta1) - f.eval(x - theta2);
        return d * d;
      },
      std::move(breaks));
}

std::vector<JumpComponent> shift_limit_components(const Template& f,
                                                  const DesignModel& design,
                                                  double theta_star) {
  std::vector<JumpComponent> out;
  for (const auto& d : f.discontinuities()) {
    double at = d.location + theta_star;
    if (f.periodic()) at = wrap_unit(at);
    const double lam = design.density(at);
    if (lam > 0.0) out.push_back({at, lam, d.jump});
  }
  if (out.empty()) {
    throw Error(ErrorCode::kNoDiscontinuity,
                "template '" + f.name() +
                    "' has no discontinuity inside the design support");
  }
  return out;
}

double jump_constant(const Template& f, const DesignModel& design,
                     double theta_star) {
  double sum = 0.0;
  for (const auto& c : shift_limit_components(f, design, theta_star)) {
    sum += c.jump * c.jump * c.intensity;
  }
  return sum;
}

double loss_shift_excess(const Loss& loss, const NoiseModel& noise, double a) {
  if (a == 0.0) return 0.0;
  if (loss.kind() == LossKind::kSquared) return a * a;
  require_admissible(loss, noise);
  std::vector<double> breaks = {0.0, -a};
  if (loss.kind() != LossKind::kAbsolute) {
    const double c = loss.threshold();
    breaks = {c, -c, -a + c, -a - c};
  }
  return over_real_line(
      noise,
      [&](double z) {
        return (loss.value(z + a) - loss.value(z)) * noise.density(z);
      },
      std::move(breaks));
}

double excess_risk(const Template& f, const DesignModel& design,
                   const Loss& loss, const NoiseModel& noise, double theta,
                   double theta_star) {
  require_admissible(loss, noise);
  if (theta == theta_star) return 0.0;
  auto breaks = shifted_knots(f, theta, design.support());
  for (double b : shifted_knots(f, theta_star, design.support())) {
    breaks.push_back(b);
  }
  return over_design(
      design,
      [&](double x) {
        return loss_shift_excess(loss, noise,
                                 f.eval(x - theta_star) - f.eval(x - theta));
      },
      std::move(breaks));
}

double population_risk(const Template& f, const DesignModel& design,
                       const Loss& loss, const NoiseModel& noise, double theta,
                       double theta_star) {
  require_admissible(loss, noise);
  double base = 0.0;
  if (loss.kind() == LossKind::kSquared) {
    base = noise.variance();
  } else {
    const bool linear_tail = loss.kind() != LossKind::kTukey;
    const bool no_mean = noise.kind() == NoiseKind::kCauchy ||
                         (noise.kind() == NoiseKind::kStudentT &&
                          noise.parameter() <= 1.0);
    if (linear_tail && no_mean) {
      throw Error(ErrorCode::kInadmissiblePair,
                  loss.name() + " has infinite risk under " + noise.name());
    }
    const double c = loss.threshold();
    std::vector<double> breaks = {0.0};
    if (c > 0) breaks = {-c, c};
    base = over_real_line(
        noise, [&](double z) { return loss.value(z) * noise.density(z); },
        std::move(breaks));
  }
  return base + excess_risk(f, design, loss, noise, theta, theta_star);
}

double relative_efficiency(const Loss& loss, const NoiseModel& noise) {
  if (noise.kind() != NoiseKind::kGaussian) {
    throw Error(ErrorCode::kInadmissiblePair,
                "relative efficiency is defined against Gaussian noise");
  }
  return c_phi_loss(loss, noise) / noise.variance();
}

LocationScaleAsymptotics location_scale_asymptotics(
    const Template& f, const DesignModel& design, const Loss& loss,
    const NoiseModel& noise, const LocationScale& truth) {
  require_admissible(loss, noise);
  if (!(truth.nu > 0.0)) {
    throw Error(ErrorCode::kInvalidScale, "scale parameter must be positive");
  }
  LocationScaleAsymptotics r;
  r.denom = over_design(
      design,
      [&](double x) {
        const double v = f.eval((x - truth.xi) / truth.nu);
        return v * v;
      },
      shifted_knots(f, truth.xi, design.support(), truth.nu));
  if (!(r.denom > 0.0)) {
    throw Error(ErrorCode::kInadmissiblePair,
                "template vanishes on the design support");
  }
  r.beta_var = c_phi_loss(loss, noise) / r.denom;
  for (const auto& d : f.discontinuities()) {
    double at = truth.xi + truth.nu * d.location;
    if (f.periodic()) at = wrap_unit(at);
    const double lam = design.density(at);
    const double jump = truth.beta * d.jump;
    if (lam > 0.0) r.xi.push_back({at, lam, jump});
    if (lam * std::abs(d.location) > 0.0) {
      r.nu.push_back({at, lam * std::abs(d.location), jump});
    }
  }
  return r;
}

}  // namespace tmatch
