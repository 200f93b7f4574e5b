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

#include "tmatch/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "parse_util.hpp"
#include "tmatch/error.hpp"

namespace tmatch::quad {
namespace {

struct Sum {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Boost's recursive driver reports error estimates in the units of the
// reference interval [-1, 1], so the bisection is done here with the
// single-rule estimate rescaled by the half-width.
void bisect(const Integrand& g, double a, double b, unsigned depth,
            double rel_tol, Sum& out) {
  double err = 0.0, l1 = 0.0;
  const double v = GK::integrate(g, a, b, 0, rel_tol, &err, &l1);
  err *= 0.5 * (b - a);
  if (depth == 0 || err <= rel_tol * l1 || err <= 1e-300) {
    out.value += v;
    out.error += err;
    out.l1 += l1;
    return;
  }
  const double mid = 0.5 * (a + b);
  bisect(g, a, mid, depth - 1, rel_tol, out);
  bisect(g, mid, b, depth - 1, rel_tol, out);
}

Sum panels(const Integrand& g, double a, double b, std::vector<double> breaks,
           const Options& opt) {
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double t) { return !(t > a && t < b); }),
               breaks.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.insert(breaks.begin(), a);
  breaks.push_back(b);

  Sum s;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    bisect(g, breaks[k], breaks[k + 1], opt.max_depth, opt.rel_tol, s);
  }
  return s;
}

double checked(const Sum& s, const Options& opt) {
  if (!std::isfinite(s.value) || s.error > opt.fail_tol * s.l1 + 1e-300) {
    if (s.error <= 1e-15 && std::isfinite(s.value)) return s.value;
    throw Error(ErrorCode::kQuadratureFailure,
                "error estimate " + detail::format_double(s.error) +
                    " exceeds tolerance for integral " +
                    detail::format_double(s.value));
  }
  return s.value;
}

}  // namespace

double integrate(const Integrand& g, double a, double b,
                 std::vector<double> breaks, const Options& opt) {
  if (!(b > a)) return 0.0;
  return checked(panels(g, a, b, std::move(breaks), opt), opt);
}

double integrate_real_line(const Integrand& g, std::vector<double> breaks,
                           double scale, const Options& opt) {
  for (double& t : breaks) t = std::atan(t / scale);
  const double half_pi = 0.5 * std::numbers::pi;
  auto mapped = [&](double u) {
    const double c = std::cos(u);
    if (c <= 0.0) return 0.0;
    const double v = g(scale * std::tan(u)) * scale / (c * c);
    return std::isfinite(v) ? v : 0.0;
  };
  return checked(panels(mapped, -half_pi, half_pi, std::move(breaks), opt), opt);
}

}  // namespace tmatch::quad
