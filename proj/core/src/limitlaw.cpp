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

#include "tmatch/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "parallel.hpp"
#include "tmatch/error.hpp"

namespace tmatch {
namespace {

constexpr int kMaxDoublings = 20;

// A half-line stops once its walk sits this far above the best value, in
// units of E[m^2] / (2 E[m]). For a walk with positive drift the chance of a
// later dip of that size is about exp(-kTailLog).
constexpr double kTailLog = 23.0;
constexpr std::size_t kMinMarks = 16;

struct Flat {
  double value = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = 0.0;

  // Keeps the lower value; on exact ties keeps the hull.
  void offer(double v, double a, double b) {
    if (v < value) {
      value = v;
      lo = a;
      hi = b;
    } else if (v == value) {
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
  }
};

// One half-line of the process, in distance from the origin. Only the
// running sum and the best completed flat are kept, so memory stays constant
// however far the window grows.
class HalfLine {
 public:
  HalfLine(const MarkedProcessSpec& spec, double sign, std::uint64_t seed)
      : spec_(spec), sign_(sign), rng_(make_rng(seed)),
        gap_(spec.total_intensity()) {
    for (const auto& c : spec.components) {
      cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) +
                            c.intensity);
    }
    last_ = gap_(rng_);
    first_ = last_;
    sum_ = mark();
  }

  double first_event() const noexcept { return first_; }

  // Generates events until the newest one lies beyond t; every flat that
  // starts at or before t is then complete.
  void extend_to(double t) {
    while (last_ <= t) {
      const double next = last_ + gap_(rng_);
      best_.offer(sum_, last_, next);
      sum_ += mark();
      last_ = next;
    }
  }

  const Flat& best() const noexcept { return best_; }

  // True when the walk is far enough above `floor` that dipping below it
  // again is negligible, judged from the marks drawn so far.
  bool settled_above(double floor) const noexcept {
    if (count_ < kMinMarks) return false;
    const double m1 = s1_ / static_cast<double>(count_);
    const double m2 = s2_ / static_cast<double>(count_);
    if (!(m1 > 0.0)) return false;
    return sum_ - floor >= kTailLog * m2 / (2.0 * m1);
  }

 private:
  double mark() {
    const double m = draw_mark();
    ++count_;
    s1_ += m;
    s2_ += m * m;
    return m;
  }

  double draw_mark() {
    std::size_t k = 0;
    if (cumulative_.size() > 1) {
      const double u = std::uniform_real_distribution<double>(
          0.0, cumulative_.back())(rng_);
      k = static_cast<std::size_t>(
          std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
          cumulative_.begin());
      k = std::min(k, cumulative_.size() - 1);
    }
    if (spec_.constant_mark) return *spec_.constant_mark;
    const double z = spec_.noise.draw(rng_);
    const double d = sign_ * spec_.components[k].jump;
    return spec_.loss.value(z + d) - spec_.loss.value(z);
  }

  const MarkedProcessSpec& spec_;
  double sign_;
  Rng rng_;
  std::exponential_distribution<double> gap_;
  std::vector<double> cumulative_;
  double last_ = 0.0;
  double first_ = 0.0;
  double sum_ = 0.0;
  std::size_t count_ = 0;
  double s1_ = 0.0;
  double s2_ = 0.0;
  Flat best_;
};

void validate(const MarkedProcessSpec& spec) {
  if (spec.components.empty()) {
    throw Error(ErrorCode::kNoDiscontinuity,
                "marked process needs at least one component");
  }
  for (const auto& c : spec.components) {
    if (!(c.intensity > 0.0) || !std::isfinite(c.intensity)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "component intensities must be positive and finite");
    }
  }
  if (!spec.constant_mark && !spec.noise.has_density() &&
      spec.noise.kind() != NoiseKind::kZero) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported noise model");
  }
}

}  // namespace

double MarkedProcessSpec::total_intensity() const noexcept {
  double s = 0.0;
  for (const auto& c : components) s += c.intensity;
  return s;
}

MinimizerInterval simulate_min_interval(const MarkedProcessSpec& spec,
                                        Rng& rng) {
  validate(spec);
  const std::uint64_t right_seed = rng();
  const std::uint64_t left_seed = rng();
  HalfLine right(spec, 1.0, right_seed);
  HalfLine left(spec, -1.0, left_seed);

  double t = 10.0 / spec.total_intensity();
  for (int doubling = 0; doubling <= kMaxDoublings; ++doubling, t *= 2.0) {
    right.extend_to(t);
    left.extend_to(t);

    Flat best;
    best.offer(0.0, -left.first_event(), right.first_event());
    const Flat& r = right.best();
    if (r.value < std::numeric_limits<double>::infinity()) {
      best.offer(r.value, r.lo, r.hi);
    }
    const Flat& l = left.best();
    if (l.value < std::numeric_limits<double>::infinity()) {
      best.offer(l.value, -l.hi, -l.lo);
    }
    if (best.lo > -0.5 * t && best.hi < 0.5 * t &&
        right.settled_above(best.value) && left.settled_above(best.value)) {
      return {best.lo, best.hi, 0.5 * (best.lo + best.hi), best.value, t};
    }
  }
  throw Error(ErrorCode::kWindowExplosion,
              "minimum not contained after " + std::to_string(kMaxDoublings) +
                  " window doublings; the mean mark is probably not positive");
}

std::vector<double> midpoint_sample(const MarkedProcessSpec& spec,
                                    std::size_t repeats, std::uint64_t seed,
                                    int workers) {
  validate(spec);
  if (repeats == 0) {
    throw Error(ErrorCode::kInvalidArgument, "repeats must be at least 1");
  }
  std::vector<double> out(repeats);
  detail::parallel_for(repeats, workers, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(seed, r));
    out[r] = simulate_min_interval(spec, rng).midpoint;
  });
  return out;
}

MarkedProcessSpec shift_limit_spec(const Template& f, const DesignModel& design,
                                   const Loss& loss, const NoiseModel& noise,
                                   double theta_star) {
  MarkedProcessSpec spec;
  spec.components = shift_limit_components(f, design, theta_star);
  spec.noise = noise;
  spec.loss = loss;
  return spec;
}

LocationScaleLimit location_scale_limit_samples(
    const LocationScaleAsymptotics& asym, const Loss& loss,
    const NoiseModel& noise, std::size_t repeats, std::uint64_t seed,
    int workers) {
  MarkedProcessSpec xi{asym.xi, noise, loss, std::nullopt};
  MarkedProcessSpec nu{asym.nu, noise, loss, std::nullopt};
  LocationScaleLimit out;
  out.xi = midpoint_sample(xi, repeats, derive_seed(seed, 0), workers);
  out.nu = midpoint_sample(nu, repeats, derive_seed(seed, 1), workers);
  return out;
}

}  // namespace tmatch
