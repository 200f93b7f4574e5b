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
#include <vector>

#include "tmatch/error.hpp"
#include "tmatch/statistics.hpp"

namespace tmatch {
namespace {

double uniform_cdf(double x) { return x < 0 ? 0 : (x > 1 ? 1 : x); }

TEST(KolmogorovSmirnov, OneSampleByHand) {
  EXPECT_DOUBLE_EQ(ks_one_sample(std::vector<double>{0.5}, uniform_cdf), 0.5);
  // Steps at 1/3, 2/3, 1 against F = 0.1, 0.2, 0.9: the largest gap is
  // 2/3 - 0.2 just after the second point.
  EXPECT_NEAR(ks_one_sample(std::vector<double>{0.9, 0.1, 0.2}, uniform_cdf),
              2.0 / 3.0 - 0.2, 1e-15);
}

TEST(KolmogorovSmirnov, MidQuantilesEquioscillate) {
  for (int n : {1, 7, 100}) {
    std::vector<double> xs;
    for (int i = 1; i <= n; ++i) xs.push_back((i - 0.5) / n);
    EXPECT_NEAR(ks_one_sample(xs, uniform_cdf), 0.5 / n, 1e-15);
  }
}

TEST(KolmogorovSmirnov, EmptySamplesAreRejected) {
  try {
    ks_one_sample(std::vector<double>{}, uniform_cdf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySample);
  }
  EXPECT_THROW(ks_two_sample(std::vector<double>{}, std::vector<double>{1}),
               Error);
}

TEST(KolmogorovSmirnov, TwoSampleByHand) {
  EXPECT_DOUBLE_EQ(ks_two_sample(std::vector<double>{0}, std::vector<double>{1}),
                   1.0);
  using V = std::vector<double>;
  EXPECT_DOUBLE_EQ(ks_two_sample(V{1, 2, 3}, V{4, 5}), 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(V{1, 3}, V{2, 4}), 0.5);
  EXPECT_DOUBLE_EQ(ks_two_sample(V{1, 1}, V{1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(ks_two_sample(V{1, 2}, V{2, 1}), 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(V{0, 0, 0, 5}, V{0}), 0.25);
}

TEST(RateSlope, RecoversPowerLaws) {
  const std::vector<double> ns = {100, 500, 1000, 5000, 10000};
  std::vector<double> half, one;
  for (double n : ns) {
    half.push_back(3.0 / std::sqrt(n));
    one.push_back(0.7 / n);
  }
  EXPECT_NEAR(rate_slope(ns, half), -0.5, 1e-12);
  EXPECT_NEAR(rate_slope(ns, one), -1.0, 1e-12);
  const std::vector<double> bad = {1, 0, 1, 1, 1};
  try {
    rate_slope(ns, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveInput);
  }
}

TEST(Summaries, QuantileMeanCorrelation) {
  const std::vector<double> xs = {4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(xs, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(xs, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(xs, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(mean(xs), 2.5);
  EXPECT_DOUBLE_EQ(mean_abs(std::vector<double>{-1, 2, -3}), 2.0);
  const std::vector<double> ys = {8, 2, 6, 4};
  const std::vector<double> zs = {-4, -1, -3, -2};
  EXPECT_NEAR(correlation(xs, ys), 1.0, 1e-15);
  EXPECT_NEAR(correlation(xs, zs), -1.0, 1e-15);
}

TEST(Summaries, PairwiseSumIsAccurate) {
  std::vector<double> xs(1 << 20, 0.1);
  const double exact = 0.1 * (1 << 20);
  EXPECT_NEAR(pairwise_sum(xs), exact, 1e-9);
  double naive = 0;
  for (double x : xs) naive += x;
  EXPECT_LE(std::abs(pairwise_sum(xs) - exact), std::abs(naive - exact));
}

TEST(Summaries, NormalCdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_cdf(1.0, 2.0), normal_cdf(0.5), 1e-15);
}

}  // namespace
}  // namespace tmatch
