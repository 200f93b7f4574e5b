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

#include "tmatch/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tmatch/error.hpp"

namespace tmatch {
namespace {

void require_nonempty(std::span<const double> s, const char* what) {
  if (s.empty()) {
    throw Error(ErrorCode::kEmptySample, std::string(what) + " is empty");
  }
}

}  // namespace

double ks_one_sample(std::span<const double> sample,
                     const std::function<double(double)>& cdf) {
  require_nonempty(sample, "sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "first sample");
  require_nonempty(b, "second sample");
  std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double rate_slope(std::span<const double> ns, std::span<const double> errors) {
  if (ns.size() != errors.size() || ns.size() < 3) {
    throw Error(ErrorCode::kNonPositiveInput,
                "rate slope needs at least three (n, error) pairs");
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (!(ns[k] > 0.0) || !(errors[k] > 0.0)) {
      throw Error(ErrorCode::kNonPositiveInput,
                  "rate slope needs strictly positive inputs");
    }
    lx.push_back(std::log(ns[k]));
    ly.push_back(std::log(errors[k]));
  }
  const double mx = mean(lx), my = mean(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::kNonPositiveInput, "sample sizes must differ");
  }
  return sxy / sxx;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
  require_nonempty(xs, "sample");
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double mean_abs(std::span<const double> xs) {
  std::vector<double> a(xs.size());
  std::transform(xs.begin(), xs.end(), a.begin(),
                 [](double x) { return std::abs(x); });
  return mean(a);
}

double quantile(std::span<const double> sample, double p) {
  require_nonempty(sample, "sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double correlation(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "first sample");
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "samples differ in length");
  }
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double normal_cdf(double x, double sd) {
  return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2));
}

}  // namespace tmatch
