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

#include <string>
#include <string_view>

namespace tmatch {

enum class LossKind { kSquared, kAbsolute, kHuber, kTukey };

// Even residual penalty L with its first two derivatives. Huber uses the
// half-square core (L'' = 1 on |r| <= c); Tukey is the bounded biweight.
class Loss {
 public:
  static constexpr double kDefaultHuberThreshold = 1.345;
  static constexpr double kDefaultTukeyThreshold = 4.685;

  static Loss squared();
  static Loss absolute();
  static Loss huber(double c = kDefaultHuberThreshold);
  static Loss tukey(double c = kDefaultTukeyThreshold);

  // Accepts "squared" | "absolute" | "huber[:c]" | "tukey[:c]".
  static Loss parse(std::string_view spec);

  LossKind kind() const noexcept { return kind_; }
  // Threshold c; zero for losses without one.
  double threshold() const noexcept { return c_; }

  double value(double r) const noexcept;
  // L'(r). The absolute-value loss uses the symmetric subgradient L'(0) = 0.
  double d1(double r) const noexcept;
  // L''(r). Throws UnsupportedLoss for the absolute-value loss. At the Huber
  // kinks |r| = c the left-limit value 1 is returned.
  double d2(double r) const;

  bool has_second_derivative() const noexcept {
    return kind_ != LossKind::kAbsolute;
  }
  bool is_convex() const noexcept { return kind_ != LossKind::kTukey; }
  bool is_lipschitz() const noexcept {
    return kind_ != LossKind::kSquared;
  }

  // Canonical config name, e.g. "huber:1.345".
  std::string name() const;

  friend bool operator==(const Loss&, const Loss&) = default;

 private:
  Loss(LossKind kind, double c) : kind_(kind), c_(c) {}

  LossKind kind_;
  double c_;
};

}  // namespace tmatch
