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

#pragma once

#include <vector>

#include "tmatch/dataset.hpp"
#include "tmatch/distributions.hpp"
#include "tmatch/loss.hpp"
#include "tmatch/templates.hpp"

namespace tmatch {

struct AsymptoticReport {
  // E[L'(Z)²] / E[L''(Z)]², or 1/(4φ(0)²) for the absolute loss.
  double c_phi_loss = 0.0;
  // E[f'(X - θ*)²].
  double denom = 0.0;
  double tau2 = 0.0;
  // ½ E[L''(Z)]; φ(0) for the absolute loss.
  double c0 = 0.0;
  // E[L'(Z)²].
  double c1 = 0.0;
  // Fisher information for θ: E[f'(X - θ*)²] ∫ φ'²/φ.
  double info = 0.0;
};

// One component of a marked Poisson limit process.
struct JumpComponent {
  // Position of the discontinuity in x.
  double location = 0.0;
  double intensity = 0.0;
  // Jump of the fitted signal at `location`; marks are L(Z + jump) - L(Z).
  double jump = 0.0;
};

struct LocationScaleAsymptotics {
  double beta_var = 0.0;
  // E[f((X - ξ*)/ν*)²].
  double denom = 0.0;
  std::vector<JumpComponent> xi;
  std::vector<JumpComponent> nu;
};

// Throws InfiniteMoment for the squared loss without a finite variance and
// ZeroCurvature when E[L''(Z)] is numerically zero or negative.
double c_phi_loss(const Loss& loss, const NoiseModel& noise);

// ½ E[L''(Z)] (φ(0) for the absolute loss) and E[L'(Z)²].
double curvature_constant(const Loss& loss, const NoiseModel& noise);
double score_variance(const Loss& loss, const NoiseModel& noise);

// ∫ φ'²/φ.
double location_information(const NoiseModel& noise);

// Throws InadmissiblePair when the theory has nothing to say about the pair.
void require_admissible(const Loss& loss, const NoiseModel& noise);

AsymptoticReport asymptotic_variance_shift(const Template& f,
                                           const DesignModel& design,
                                           const Loss& loss,
                                           const NoiseModel& noise,
                                           double theta_star);

// ∫ (f(x - θ₁) - f(x - θ₂))² λ(x) dx.
double delta(const Template& f, const DesignModel& design, double theta1,
             double theta2);

// Σ_d δ_d² λ(d + θ*). Throws NoDiscontinuity when the sum is empty or zero.
double jump_constant(const Template& f, const DesignModel& design,
                     double theta_star);

// E[L(Z + a)] - E[L(Z)].
double loss_shift_excess(const Loss& loss, const NoiseModel& noise, double a);

// M(θ) - M(θ*), finite whenever the loss is Lipschitz or Z has a variance.
double excess_risk(const Template& f, const DesignModel& design,
                   const Loss& loss, const NoiseModel& noise, double theta,
                   double theta_star);

// M(θ) = E[L(Y - f(X - θ))]. Throws InadmissiblePair when E[L(Z)] = ∞.
double population_risk(const Template& f, const DesignModel& design,
                       const Loss& loss, const NoiseModel& noise, double theta,
                       double theta_star);

// Variance ratio against least squares under Gaussian noise.
double relative_efficiency(const Loss& loss, const NoiseModel& noise);

LocationScaleAsymptotics location_scale_asymptotics(
    const Template& f, const DesignModel& design, const Loss& loss,
    const NoiseModel& noise, const LocationScale& truth);

// Limit-process components for the shift estimator of a discontinuous
// template: intensity λ(d + θ*) and jump δ_d per discontinuity.
std::vector<JumpComponent> shift_limit_components(const Template& f,
                                                  const DesignModel& design,
                                                  double theta_star);

}  // namespace tmatch
