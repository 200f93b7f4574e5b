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
#include <optional>

#include "tmatch/dataset.hpp"
#include "tmatch/loss.hpp"
#include "tmatch/templates.hpp"

namespace tmatch {

struct SearchConfig {
  Interval bounds{-0.25, 0.25};
  int coarse_grid = 512;
  // Absolute tolerance of the golden-section refinement.
  double refine_tol = 1e-8;
  bool use_breakpoints = true;
  // Number of local minima of the coarse scan that get refined.
  int brackets = 5;
};

struct EstimationResult {
  double theta = 0.0;
  double objective_at_min = 0.0;
  std::size_t evaluations = 0;
  // Closed range of minimizers when the objective is flat at its minimum.
  std::optional<Interval> hint;

  // Midpoint of the flat range when there is one, otherwise theta.
  double point() const noexcept { return hint ? hint->midpoint() : theta; }
};

struct LocationScaleSearch {
  Interval beta_bounds{0.25, 4.0};
  Interval xi_bounds{-0.25, 0.25};
  Interval nu_bounds{0.5, 2.0};
  // Points per axis of the initial (ξ, ν) scan.
  int coarse_grid = 24;
  double refine_tol = 1e-8;
  bool use_breakpoints = true;
  // Best grid points that are refined further.
  int starts = 3;
};

struct LocationScaleResult {
  LocationScale estimate;
  double objective_at_min = 0.0;
  std::size_t evaluations = 0;
};

struct PeriodicResult {
  // Maximizing shift index in 1..n.
  std::size_t index = 0;
  // index / n reduced modulo 1.
  double theta = 0.0;
  double correlation = 0.0;
};

// (1/n) Σ L(y_i - f(x_i - θ)).
double objective(const Dataset& data, const Template& f, const Loss& loss,
                 double theta);

// (1/n) Σ L(y_i - β f((x_i - ξ)/ν)).
double objective(const Dataset& data, const Template& f, const Loss& loss,
                 const LocationScale& p);

// Global minimizer of the shift objective over cfg.bounds.
//
// Piecewise-constant templates are handled by an exact sweep over the cells
// between consecutive breakpoints x_i - k (k a knot of f), on which the
// objective is constant. Every other template uses a coarse grid overlaid
// with the midpoints of consecutive breakpoints x_i - d (d a discontinuity),
// followed by golden-section refinement of the best local minima, each
// confined to its breakpoint cell. Ties within 1e-12 relative resolve to the
// smallest evaluated θ, and the tied range is reported as the hint.
EstimationResult fit_shift(const Dataset& data, const Template& f,
                           const Loss& loss, const SearchConfig& cfg = {});

// Approximate global minimizer over the (β, ξ, ν) box. β is profiled out in
// closed form (squared loss), by weighted median (absolute loss) or by
// one-dimensional search; (ξ, ν) are found by a coarse scan, a local
// breakpoint scan in ξ, and breakpoint-aware line searches.
LocationScaleResult fit_location_scale(const Dataset& data, const Template& f,
                                       const Loss& loss,
                                       const LocationScaleSearch& cfg = {});

// argmax over t in 1..n of Σ_i f((i - t)/n) y_i for data on the regular grid
// x_i = i/n. Throws NotRegularGrid otherwise. Ties go to the smallest t.
PeriodicResult fit_periodic_correlation(const Dataset& data, const Template& f);

}  // namespace tmatch
