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

#include <cmath>
#include <cstddef>

namespace tmatch::detail {

struct LineMin {
  double x = 0.0;
  double fx = 0.0;
  std::size_t evals = 0;
};

// Golden-section search for a minimum of f on [a, b]. Only interior points
// are evaluated; the better of the final two probes is returned.
template <class F>
LineMin golden_section(F&& f, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  LineMin out;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  out.evals = 2;
  for (int iter = 0; iter < 200 && b - a > tol; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++out.evals;
  }
  if (fc <= fd) {
    out.x = c;
    out.fx = fc;
  } else {
    out.x = d;
    out.fx = fd;
  }
  return out;
}

// True when v is within 1e-12 relative of the reference minimum.
inline bool ties_with(double v, double best) noexcept {
  return v <= best + 1e-12 * std::abs(best);
}

}  // namespace tmatch::detail
