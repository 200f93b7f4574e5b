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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmatch/random.hpp"
#include "tmatch/templates.hpp"

namespace tmatch {

enum class NoiseKind { kGaussian, kStudentT, kCauchy, kLaplace, kZero };

// Symmetric noise law with density φ, CDF Φ and score φ'/φ.
class NoiseModel {
 public:
  static NoiseModel gaussian(double sigma = 1.0);
  static NoiseModel student_t(double dof);
  static NoiseModel cauchy();
  static NoiseModel laplace(double b = 1.0);
  // Point mass at zero. Only for exact zero-noise oracles in tests; it has
  // no density and is not reachable from config names.
  static NoiseModel degenerate_zero();

  // "gaussian[:σ]" | "normal" | "t:<ν>" | "cauchy" | "laplace[:b]".
  static NoiseModel parse(std::string_view spec);

  NoiseKind kind() const noexcept { return kind_; }
  // σ for Gaussian, ν for Student t, b for Laplace, 1 for Cauchy.
  double parameter() const noexcept { return param_; }
  // Natural scale used to map the real line onto a bounded interval.
  double scale() const noexcept;

  double density(double z) const noexcept;
  double cdf(double z) const;
  // φ'(z)/φ(z); zero at the Laplace cusp.
  double score(double z) const noexcept;
  // Points where φ is not smooth.
  std::vector<double> kinks() const;

  // +inf when the second moment does not exist.
  double variance() const noexcept;
  bool has_density() const noexcept { return kind_ != NoiseKind::kZero; }

  double draw(Rng& rng) const;
  void sample(Rng& rng, std::span<double> out) const;
  std::vector<double> sample(Rng& rng, std::size_t n) const;

  std::string name() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  NoiseModel(NoiseKind kind, double param) : kind_(kind), param_(param) {}

  NoiseKind kind_;
  double param_;
};

enum class DesignMode { kRandom, kFixed, kRegular };

DesignMode parse_design_mode(std::string_view text);
std::string_view to_string(DesignMode mode);

// Uniform design on [a, b].
class DesignModel {
 public:
  static DesignModel uniform(double a = 0.0, double b = 1.0);
  // "uniform" | "uniform:a,b".
  static DesignModel parse(std::string_view spec);

  const Interval& support() const noexcept { return support_; }
  double density(double x) const noexcept;
  double cdf(double x) const noexcept;
  double quantile(double p) const noexcept;

  // kRandom: iid draws. kFixed: quantiles at i/(n+1). kRegular: the
  // equispaced grid a + (b-a) i/n, i = 1..n.
  std::vector<double> points(DesignMode mode, std::size_t n, Rng& rng) const;

  std::string name() const;

  friend bool operator==(const DesignModel&, const DesignModel&) = default;

 private:
  explicit DesignModel(Interval support) : support_(support) {}

  Interval support_;
};

}  // namespace tmatch
