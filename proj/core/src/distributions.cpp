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

#include "tmatch/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "parse_util.hpp"
#include "tmatch/error.hpp"

namespace tmatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be positive and finite");
  }
}

// Standard uniform on the open interval (0, 1).
double open_uniform(Rng& rng) {
  double u;
  do {
    u = std::generate_canonical<double, 53>(rng);
  } while (u <= 0.0);
  return u;
}

}  // namespace

NoiseModel NoiseModel::gaussian(double sigma) {
  require_positive(sigma, "Gaussian sigma");
  return {NoiseKind::kGaussian, sigma};
}

NoiseModel NoiseModel::student_t(double dof) {
  require_positive(dof, "Student t degrees of freedom");
  return {NoiseKind::kStudentT, dof};
}

NoiseModel NoiseModel::cauchy() { return {NoiseKind::kCauchy, 1.0}; }

NoiseModel NoiseModel::laplace(double b) {
  require_positive(b, "Laplace scale");
  return {NoiseKind::kLaplace, b};
}

NoiseModel NoiseModel::degenerate_zero() { return {NoiseKind::kZero, 0.0}; }

NoiseModel NoiseModel::parse(std::string_view spec) {
  auto [head, arg] = detail::split_head(spec);
  auto param = [&](double fallback) {
    return arg.empty() ? fallback : detail::parse_double(arg, spec);
  };
  if (head == "gaussian" || head == "normal") return gaussian(param(1.0));
  if (head == "t" && !arg.empty()) return student_t(param(0.0));
  if (head == "cauchy" && arg.empty()) return cauchy();
  if (head == "laplace") return laplace(param(1.0));
  throw Error(ErrorCode::kParseError,
              "unknown noise model '" + std::string(spec) + "'");
}

double NoiseModel::scale() const noexcept {
  switch (kind_) {
    case NoiseKind::kGaussian:
    case NoiseKind::kLaplace: return param_;
    case NoiseKind::kStudentT:
    case NoiseKind::kCauchy:
    case NoiseKind::kZero: return 1.0;
  }
  return 1.0;
}

double NoiseModel::density(double z) const noexcept {
  using std::numbers::pi;
  switch (kind_) {
    case NoiseKind::kGaussian: {
      const double u = z / param_;
      return std::exp(-0.5 * u * u) / (param_ * std::sqrt(2.0 * pi));
    }
    case NoiseKind::kStudentT: {
      const double v = param_;
      const double log_norm = std::lgamma(0.5 * (v + 1.0)) -
                              std::lgamma(0.5 * v) - 0.5 * std::log(v * pi);
      return std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(z * z / v));
    }
    case NoiseKind::kCauchy: return 1.0 / (pi * (1.0 + z * z));
    case NoiseKind::kLaplace: return std::exp(-std::abs(z) / param_) / (2.0 * param_);
    case NoiseKind::kZero: return 0.0;
  }
  return 0.0;
}

double NoiseModel::cdf(double z) const {
  switch (kind_) {
    case NoiseKind::kGaussian:
      return 0.5 * std::erfc(-z / (param_ * std::numbers::sqrt2));
    case NoiseKind::kStudentT: {
      if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
      return boost::math::cdf(boost::math::students_t_distribution<>(param_), z);
    }
    case NoiseKind::kCauchy: return 0.5 + std::atan(z) / std::numbers::pi;
    case NoiseKind::kLaplace:
      return z < 0 ? 0.5 * std::exp(z / param_)
                   : 1.0 - 0.5 * std::exp(-z / param_);
    case NoiseKind::kZero: return z < 0 ? 0.0 : 1.0;
  }
  return 0.0;
}

double NoiseModel::score(double z) const noexcept {
  switch (kind_) {
    case NoiseKind::kGaussian: return -z / (param_ * param_);
    case NoiseKind::kStudentT: return -(param_ + 1.0) * z / (param_ + z * z);
    case NoiseKind::kCauchy: return -2.0 * z / (1.0 + z * z);
    case NoiseKind::kLaplace:
      return z == 0.0 ? 0.0 : (z > 0 ? -1.0 : 1.0) / param_;
    case NoiseKind::kZero: return 0.0;
  }
  return 0.0;
}

std::vector<double> NoiseModel::kinks() const {
  if (kind_ == NoiseKind::kLaplace) return {0.0};
  return {};
}

double NoiseModel::variance() const noexcept {
  switch (kind_) {
    case NoiseKind::kGaussian: return param_ * param_;
    case NoiseKind::kStudentT: return param_ > 2.0 ? param_ / (param_ - 2.0) : kInf;
    case NoiseKind::kCauchy: return kInf;
    case NoiseKind::kLaplace: return 2.0 * param_ * param_;
    case NoiseKind::kZero: return 0.0;
  }
  return kInf;
}

double NoiseModel::draw(Rng& rng) const {
  double z = 0.0;
  sample(rng, std::span<double>(&z, 1));
  return z;
}

void NoiseModel::sample(Rng& rng, std::span<double> out) const {
  switch (kind_) {
    case NoiseKind::kGaussian: {
      std::normal_distribution<double> dist(0.0, param_);
      for (double& z : out) z = dist(rng);
      return;
    }
    case NoiseKind::kStudentT: {
      std::student_t_distribution<double> dist(param_);
      for (double& z : out) z = dist(rng);
      return;
    }
    case NoiseKind::kCauchy: {
      std::cauchy_distribution<double> dist(0.0, 1.0);
      for (double& z : out) z = dist(rng);
      return;
    }
    case NoiseKind::kLaplace: {
      for (double& z : out) {
        const double u = open_uniform(rng) - 0.5;
        z = u < 0 ? param_ * std::log1p(2.0 * u) : -param_ * std::log1p(-2.0 * u);
      }
      return;
    }
    case NoiseKind::kZero:
      std::fill(out.begin(), out.end(), 0.0);
      return;
  }
}

std::vector<double> NoiseModel::sample(Rng& rng, std::size_t n) const {
  std::vector<double> out(n);
  sample(rng, out);
  return out;
}

std::string NoiseModel::name() const {
  switch (kind_) {
    case NoiseKind::kGaussian: return "gaussian:" + detail::format_double(param_);
    case NoiseKind::kStudentT: return "t:" + detail::format_double(param_);
    case NoiseKind::kCauchy: return "cauchy";
    case NoiseKind::kLaplace: return "laplace:" + detail::format_double(param_);
    case NoiseKind::kZero: return "zero";
  }
  return "unknown";
}

DesignMode parse_design_mode(std::string_view text) {
  if (text == "random") return DesignMode::kRandom;
  if (text == "fixed") return DesignMode::kFixed;
  if (text == "periodic" || text == "regular") return DesignMode::kRegular;
  throw Error(ErrorCode::kParseError,
              "unknown design mode '" + std::string(text) + "'");
}

std::string_view to_string(DesignMode mode) {
  switch (mode) {
    case DesignMode::kRandom: return "random";
    case DesignMode::kFixed: return "fixed";
    case DesignMode::kRegular: return "periodic";
  }
  return "unknown";
}

DesignModel DesignModel::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidArgument,
                "uniform design needs finite a < b");
  }
  return DesignModel(Interval{a, b});
}

DesignModel DesignModel::parse(std::string_view spec) {
  auto [head, arg] = detail::split_head(spec);
  if (head != "uniform") {
    throw Error(ErrorCode::kParseError,
                "unknown design '" + std::string(spec) + "'");
  }
  if (arg.empty()) return uniform();
  const auto ab = detail::parse_double_list(arg, spec);
  if (ab.size() != 2) {
    throw Error(ErrorCode::kParseError, "uniform design takes 'uniform:a,b'");
  }
  return uniform(ab[0], ab[1]);
}

double DesignModel::density(double x) const noexcept {
  return support_.contains(x) ? 1.0 / support_.width() : 0.0;
}

double DesignModel::cdf(double x) const noexcept {
  if (x <= support_.lo) return 0.0;
  if (x >= support_.hi) return 1.0;
  return (x - support_.lo) / support_.width();
}

double DesignModel::quantile(double p) const noexcept {
  return support_.lo + p * support_.width();
}

std::vector<double> DesignModel::points(DesignMode mode, std::size_t n,
                                        Rng& rng) const {
  std::vector<double> xs(n);
  const double denom = static_cast<double>(mode == DesignMode::kFixed ? n + 1 : n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (mode) {
      case DesignMode::kRandom:
        xs[i] = quantile(std::generate_canonical<double, 53>(rng));
        break;
      case DesignMode::kFixed:
      case DesignMode::kRegular:
        xs[i] = quantile(static_cast<double>(i + 1) / denom);
        break;
    }
  }
  return xs;
}

std::string DesignModel::name() const {
  return "uniform:" + detail::format_double(support_.lo) + "," +
         detail::format_double(support_.hi);
}

}  // namespace tmatch
