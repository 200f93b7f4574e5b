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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tmatch/error.hpp"
#include "tmatch/estimator.hpp"

namespace tmatch {

PeriodicResult fit_periodic_correlation(const Dataset& data,
                                        const Template& f) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = static_cast<double>(i + 1) / static_cast<double>(n);
    if (std::abs(data.xs[i] - expected) > 1e-9) {
      throw Error(ErrorCode::kNotRegularGrid,
                  "x[" + std::to_string(i) + "] is not " +
                      std::to_string(i + 1) + "/n");
    }
  }
  const Template g = f.as_periodic();

  // table[k] = f(k/n); f((i - t)/n) = table[(i - t) mod n].
  std::vector<double> table(n);
  for (std::size_t k = 0; k < n; ++k) {
    table[k] = g.eval(static_cast<double>(k) / static_cast<double>(n));
  }
  long double scale = 0.0L;
  for (std::size_t i = 0; i < n; ++i) scale += std::abs(data.ys[i]);
  double table_max = 0.0;
  for (double v : table) table_max = std::max(table_max, std::abs(v));
  const double tie = 1e-12 * static_cast<double>(scale) * table_max;

  PeriodicResult best;
  bool first = true;
  for (std::size_t t = 1; t <= n; ++t) {
    long double corr = 0.0L;
    for (std::size_t i = 1; i <= n; ++i) {
      corr += table[(i + n - t) % n] * data.ys[i - 1];
    }
    const double c = static_cast<double>(corr);
    if (first || c > best.correlation + tie) {
      best.index = t;
      best.correlation = c;
      first = false;
    }
  }
  best.theta = static_cast<double>(best.index % n) / static_cast<double>(n);
  return best;
}

}  // namespace tmatch
