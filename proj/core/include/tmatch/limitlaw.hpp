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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tmatch/distributions.hpp"
#include "tmatch/loss.hpp"
#include "tmatch/random.hpp"
#include "tmatch/theory.hpp"

namespace tmatch {

// Two-sided marked Poisson process W on ℝ with W(0) = 0. Each component
// contributes events at rate `intensity` on both half-lines; an event of
// component d carries the mark L(Z + δ_d) - L(Z) to the right of the origin
// and L(Z - δ_d) - L(Z) to the left.
struct MarkedProcessSpec {
  std::vector<JumpComponent> components;
  NoiseModel noise = NoiseModel::gaussian();
  Loss loss = Loss::squared();
  // Replaces every mark by a fixed value (test hook).
  std::optional<double> constant_mark;

  double total_intensity() const noexcept;
};

struct MinimizerInterval {
  double lower = 0.0;
  double upper = 0.0;
  double midpoint = 0.0;
  double min_value = 0.0;
  // Half-width T of the window [-T, T] that contained the minimum.
  double window_used = 0.0;
};

// Closure of the flat on which W attains its minimum. The window starts at
// T = 10/Λ and doubles, extending the same sample path, until the minimizing
// interval lies strictly inside (-T/2, T/2); after 20 doublings this throws
// WindowExplosion.
MinimizerInterval simulate_min_interval(const MarkedProcessSpec& spec, Rng& rng);

// Midpoints of `repeats` independent minimizer intervals; repeat r uses
// make_rng(derive_seed(seed, r)).
std::vector<double> midpoint_sample(const MarkedProcessSpec& spec,
                                    std::size_t repeats, std::uint64_t seed,
                                    int workers = 1);

// Limit process of n(θ̂ - θ*) for a discontinuous template.
MarkedProcessSpec shift_limit_spec(const Template& f, const DesignModel& design,
                                   const Loss& loss, const NoiseModel& noise,
                                   double theta_star);

struct LocationScaleLimit {
  std::vector<double> xi;
  std::vector<double> nu;
};

// Independent midpoint samples for the location and scale processes.
LocationScaleLimit location_scale_limit_samples(
    const LocationScaleAsymptotics& asym, const Loss& loss,
    const NoiseModel& noise, std::size_t repeats, std::uint64_t seed,
    int workers = 1);

}  // namespace tmatch
