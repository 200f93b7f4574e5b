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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace tmatch {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Polynomial on [lo, hi), coefficients in powers of (x - center).
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coefficients;
  double center = 0.0;

  double value(double x) const noexcept;
  double slope(double x) const noexcept;
  int degree() const noexcept {
    return static_cast<int>(coefficients.size()) - 1;
  }
};

struct Discontinuity {
  double location = 0.0;
  // f(d+) - f(d-).
  double jump = 0.0;
};

enum class Smoothness { kLipschitz, kPiecewiseLipschitz, kHolder };

// A known signal shape f: piecewise polynomial, càdlàg, zero off its pieces.
// Periodic templates have period exactly 1 and pieces inside [0, 1).
class Template {
 public:
  Template(std::string name, std::vector<Piece> pieces,
           std::vector<Discontinuity> discontinuities, Smoothness smoothness,
           double holder_alpha = 1.0, bool periodic = false,
           std::optional<double> lipschitz_bound = std::nullopt);

  // JSON piecewise definition; see README for the schema.
  static Template from_json(const nlohmann::json& doc);
  static Template load_json(const std::filesystem::path& path);

  const std::string& name() const noexcept { return name_; }

  double eval(double x) const noexcept;
  double operator()(double x) const noexcept { return eval(x); }
  double left_limit(double x) const noexcept;
  // f(x - theta), reduced modulo 1 when periodic.
  double shifted(double x, double theta) const noexcept {
    return eval(x - theta);
  }
  // f'(x) wherever the piece containing x is differentiable.
  double derivative(double x) const noexcept;

  // Closed hull of the pieces; may be unbounded (stump).
  const Interval& support() const noexcept { return support_; }
  Smoothness smoothness() const noexcept { return smoothness_; }
  double holder_alpha() const noexcept { return holder_alpha_; }
  bool periodic() const noexcept { return periodic_; }
  double lipschitz_bound() const noexcept { return lipschitz_bound_; }
  std::span<const Discontinuity> discontinuities() const noexcept {
    return discontinuities_;
  }
  std::span<const Piece> pieces() const noexcept { return pieces_; }
  bool has_discontinuities() const noexcept {
    return !discontinuities_.empty();
  }
  bool piecewise_constant() const noexcept;

  // Sorted distinct finite piece endpoints: every kink or jump of f.
  std::vector<double> knots() const;

  // Same shape repeated with period 1. Pieces must lie in [0, 1).
  Template as_periodic() const;

 private:
  const Piece* piece_at(double x) const noexcept;
  const Piece* piece_left_of(double x) const noexcept;
  double reduce(double x) const noexcept;
  void validate();

  std::string name_;
  std::vector<Piece> pieces_;
  std::vector<Discontinuity> discontinuities_;
  Smoothness smoothness_;
  double holder_alpha_;
  bool periodic_;
  double lipschitz_bound_ = 0.0;
  Interval support_;
};

// "A".."E", "stump:<a>", "periodic:<name>".
Template builtin_template(std::string_view name);

// Built-ins, plus "json:<path>" for a custom piecewise definition.
Template template_from_spec(std::string_view spec);

std::string_view to_string(Smoothness s);

}  // namespace tmatch
