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

#include "tmatch/loss.hpp"

#include <cmath>
#include <string>

#include "tmatch/error.hpp"
#include "parse_util.hpp"

namespace tmatch {

Loss Loss::squared() { return Loss(LossKind::kSquared, 0.0); }

Loss Loss::absolute() { return Loss(LossKind::kAbsolute, 0.0); }

Loss Loss::huber(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument,
                "Huber threshold must be positive, got " + std::to_string(c));
  }
  return Loss(LossKind::kHuber, c);
}

Loss Loss::tukey(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument,
                "Tukey threshold must be positive, got " + std::to_string(c));
  }
  return Loss(LossKind::kTukey, c);
}

Loss Loss::parse(std::string_view spec) {
  auto [head, arg] = detail::split_head(spec);
  if (head == "squared" && arg.empty()) return squared();
  if (head == "absolute" && arg.empty()) return absolute();
  if (head == "huber") {
    return arg.empty() ? huber() : huber(detail::parse_double(arg, spec));
  }
  if (head == "tukey") {
    return arg.empty() ? tukey() : tukey(detail::parse_double(arg, spec));
  }
  throw Error(ErrorCode::kParseError,
              "unknown loss '" + std::string(spec) +
                  "' (expected squared|absolute|huber:<c>|tukey:<c>)");
}

double Loss::value(double r) const noexcept {
  switch (kind_) {
    case LossKind::kSquared:
      return r * r;
    case LossKind::kAbsolute:
      return std::abs(r);
    case LossKind::kHuber: {
      const double a = std::abs(r);
      return a <= c_ ? 0.5 * r * r : c_ * a - 0.5 * c_ * c_;
    }
    case LossKind::kTukey: {
      if (std::abs(r) > c_) return 1.0;
      const double u = 1.0 - (r / c_) * (r / c_);
      return 1.0 - u * u * u;
    }
  }
  return 0.0;
}

double Loss::d1(double r) const noexcept {
  switch (kind_) {
    case LossKind::kSquared:
      return 2.0 * r;
    case LossKind::kAbsolute:
      return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    case LossKind::kHuber:
      return r > c_ ? c_ : (r < -c_ ? -c_ : r);
    case LossKind::kTukey: {
      if (std::abs(r) > c_) return 0.0;
      const double u = 1.0 - (r / c_) * (r / c_);
      return 6.0 * r / (c_ * c_) * u * u;
    }
  }
  return 0.0;
}

double Loss::d2(double r) const {
  switch (kind_) {
    case LossKind::kSquared:
      return 2.0;
    case LossKind::kAbsolute:
      throw Error(ErrorCode::kUnsupportedLoss,
                  "absolute-value loss has no second derivative");
    case LossKind::kHuber:
      return std::abs(r) <= c_ ? 1.0 : 0.0;
    case LossKind::kTukey: {
      if (std::abs(r) > c_) return 0.0;
      const double s = (r / c_) * (r / c_);
      return 6.0 / (c_ * c_) * (1.0 - s) * (1.0 - 5.0 * s);
    }
  }
  return 0.0;
}

std::string Loss::name() const {
  switch (kind_) {
    case LossKind::kSquared: return "squared";
    case LossKind::kAbsolute: return "absolute";
    case LossKind::kHuber: return "huber:" + detail::format_double(c_);
    case LossKind::kTukey: return "tukey:" + detail::format_double(c_);
  }
  return "unknown";
}

}  // namespace tmatch
