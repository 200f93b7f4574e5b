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

#include <functional>
#include <vector>

namespace tmatch::quad {

struct Options {
  // Per-panel relative target handed to the Gauss-Kronrod driver.
  double rel_tol = 1e-10;
  unsigned max_depth = 15;
  // QuadratureFailure when the estimated error exceeds this fraction of ∫|g|.
  double fail_tol = 1e-8;
};

using Integrand = std::function<double(double)>;

// ∫_a^b g, split into panels at every break strictly inside (a, b).
double integrate(const Integrand& g, double a, double b,
                 std::vector<double> breaks = {}, const Options& opt = {});

// ∫_ℝ g through z = s·tan(u), with breaks mapped to u = atan(z/s).
double integrate_real_line(const Integrand& g, std::vector<double> breaks = {},
                           double scale = 1.0, const Options& opt = {});

}  // namespace tmatch::quad
