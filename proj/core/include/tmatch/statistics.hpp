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
#include <span>
#include <vector>

namespace tmatch {

// sup_x |F_n(x) - F(x)|, evaluated exactly at the order statistics.
// Throws EmptySample.
double ks_one_sample(std::span<const double> sample,
                     const std::function<double(double)>& cdf);

// sup_x |F_a(x) - G_b(x)| between two empirical CDFs. Throws EmptySample.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Least-squares slope of log(errors) against log(ns). Needs at least three
// strictly positive pairs; throws NonPositiveInput otherwise.
double rate_slope(std::span<const double> ns, std::span<const double> errors);

// Pairwise (cascade) sum: the result depends only on the order of the input.
double pairwise_sum(std::span<const double> xs);
double mean(std::span<const double> xs);
double mean_abs(std::span<const double> xs);

// Linear-interpolation quantile of the sample (type 7). Throws EmptySample.
double quantile(std::span<const double> sample, double p);

// Pearson correlation; zero when either sample is constant.
double correlation(std::span<const double> a, std::span<const double> b);

double normal_cdf(double x, double sd = 1.0);

}  // namespace tmatch
