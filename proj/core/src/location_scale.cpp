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
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "search_util.hpp"
#include "tmatch/error.hpp"
#include "tmatch/estimator.hpp"

namespace tmatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_to(const Interval& b, double v) {
  return std::clamp(v, b.lo, b.hi);
}

void check_box(const LocationScaleSearch& cfg) {
  for (const Interval* b : {&cfg.beta_bounds, &cfg.xi_bounds, &cfg.nu_bounds}) {
    if (!std::isfinite(b->lo) || !std::isfinite(b->hi) || b->lo > b->hi) {
      throw Error(ErrorCode::kInvalidBounds,
                  "parameter bounds must be finite with lo <= hi");
    }
  }
  if (!(cfg.nu_bounds.lo > 0.0)) {
    throw Error(ErrorCode::kInvalidBounds, "scale bounds must be positive");
  }
  if (cfg.coarse_grid < 2 || cfg.starts < 1 || !(cfg.refine_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "location-scale search needs grid >= 2, starts >= 1, tol > 0");
  }
}

struct Scored {
  double value = kInf;
  double beta = 0.0;
  double xi = 0.0;
  double nu = 0.0;
};

// Objective with β minimized out, as a function of (ξ, ν).
class ProfileEvaluator {
 public:
  ProfileEvaluator(const Dataset& data, const Template& f, const Loss& loss,
                   const Interval& beta_bounds)
      : f_(f), loss_(loss), beta_(beta_bounds), n_(data.size()) {
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return data.xs[a] < data.xs[b];
    });
    prefix_y_.assign(n_ + 1, 0.0L);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i = order[k];
      xs_.push_back(data.xs[i]);
      ys_.push_back(data.ys[i]);
      ly_.push_back(loss.value(data.ys[i]));
      base_ += ly_.back();
      prefix_y_[k + 1] = prefix_y_[k] + data.ys[i];
      syy_ += static_cast<long double>(data.ys[i]) * data.ys[i];
    }
    fast_ = loss.kind() == LossKind::kSquared && f.piecewise_constant() &&
            !f.periodic();
  }

  const std::vector<double>& xs() const noexcept { return xs_; }
  std::size_t evaluations() const noexcept { return evals_; }

  Scored operator()(double xi, double nu) const {
    ++evals_;
    Scored s;
    s.xi = xi;
    s.nu = nu;
    if (fast_) {
      fast_profile(xi, nu, s);
    } else {
      generic_profile(xi, nu, s);
    }
    return s;
  }

 private:
  std::size_t index_at(double x) const {
    if (x == kInf) return n_;
    if (x == -kInf) return 0;
    return static_cast<std::size_t>(
        std::lower_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
  }

  // Squared loss with a step template: Σ y f and Σ f² are prefix-sum
  // differences over the x-range of each piece.
  void fast_profile(double xi, double nu, Scored& s) const {
    long double syf = 0.0L, sff = 0.0L;
    for (const auto& p : f_.pieces()) {
      const double v = p.coefficients[0];
      if (v == 0.0) continue;
      const std::size_t a = index_at(xi + nu * p.lo);
      const std::size_t b = index_at(xi + nu * p.hi);
      if (b <= a) continue;
      syf += v * (prefix_y_[b] - prefix_y_[a]);
      sff += static_cast<long double>(v) * v * static_cast<long double>(b - a);
    }
    s.beta = sff > 0 ? clamp_to(beta_, static_cast<double>(syf / sff)) : beta_.lo;
    const long double b = s.beta;
    s.value = static_cast<double>((syy_ - 2 * b * syf + b * b * sff) / n_);
  }

  void generic_profile(double xi, double nu, Scored& s) const {
    std::size_t first = 0, last = n_;
    if (!f_.periodic()) {
      const auto& sup = f_.support();
      const double lo = xi + nu * sup.lo;
      const double hi = xi + nu * sup.hi;
      const double margin = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
      first = index_at(lo - margin);
      last = std::isfinite(hi)
                 ? static_cast<std::size_t>(
                       std::upper_bound(xs_.begin(), xs_.end(), hi + margin) -
                       xs_.begin())
                 : n_;
    }
    ys_win_.clear();
    fs_win_.clear();
    long double base = base_;
    for (std::size_t i = first; i < last; ++i) {
      const double fi = f_.eval((xs_[i] - xi) / nu);
      if (fi == 0.0) continue;
      ys_win_.push_back(ys_[i]);
      fs_win_.push_back(fi);
      base -= ly_[i];
    }
    auto value_at = [&](double beta) {
      long double acc = base;
      for (std::size_t k = 0; k < ys_win_.size(); ++k) {
        acc += loss_.value(ys_win_[k] - beta * fs_win_[k]);
      }
      return static_cast<double>(acc / n_);
    };

    if (ys_win_.empty()) {
      s.beta = beta_.lo;
      s.value = static_cast<double>(base / n_);
      return;
    }
    switch (loss_.kind()) {
      case LossKind::kSquared: {
        long double syf = 0.0L, sff = 0.0L;
        for (std::size_t k = 0; k < ys_win_.size(); ++k) {
          syf += static_cast<long double>(ys_win_[k]) * fs_win_[k];
          sff += static_cast<long double>(fs_win_[k]) * fs_win_[k];
        }
        s.beta = clamp_to(beta_, static_cast<double>(syf / sff));
        break;
      }
      case LossKind::kAbsolute:
        s.beta = clamp_to(beta_, weighted_median());
        break;
      case LossKind::kHuber:
        s.beta = beta_.width() > 0
                     ? detail::golden_section(value_at, beta_.lo, beta_.hi,
                                              1e-10 * (1.0 + beta_.width()))
                           .x
                     : beta_.lo;
        break;
      case LossKind::kTukey: {
        constexpr int kGrid = 33;
        double best_b = beta_.lo, best_v = kInf;
        const double step = beta_.width() / (kGrid - 1);
        for (int k = 0; k < kGrid; ++k) {
          const double b = beta_.lo + step * k;
          const double v = value_at(b);
          if (v < best_v) {
            best_v = v;
            best_b = b;
          }
        }
        s.beta = best_b;
        if (step > 0) {
          const auto g = detail::golden_section(
              value_at, std::max(beta_.lo, best_b - step),
              std::min(beta_.hi, best_b + step), 1e-10 * (1.0 + beta_.width()));
          if (g.fx < best_v) s.beta = g.x;
        }
        break;
      }
    }
    s.value = value_at(s.beta);
  }

  // Minimizer of Σ |f_k| |y_k/f_k - β|: the lower weighted median.
  double weighted_median() const {
    pairs_.clear();
    long double total = 0.0L;
    for (std::size_t k = 0; k < ys_win_.size(); ++k) {
      const double w = std::abs(fs_win_[k]);
      pairs_.emplace_back(ys_win_[k] / fs_win_[k], w);
      total += w;
    }
    std::sort(pairs_.begin(), pairs_.end());
    long double acc = 0.0L;
    for (const auto& [r, w] : pairs_) {
      acc += w;
      if (2 * acc >= total) return r;
    }
    return pairs_.back().first;
  }

  const Template& f_;
  const Loss& loss_;
  Interval beta_;
  std::size_t n_;
  std::vector<double> xs_, ys_, ly_;
  std::vector<long double> prefix_y_;
  long double base_ = 0.0L;
  long double syy_ = 0.0L;
  bool fast_ = false;
  mutable std::size_t evals_ = 0;
  mutable std::vector<double> ys_win_, fs_win_;
  mutable std::vector<std::pair<double, double>> pairs_;
};

std::vector<double> axis(const Interval& b, int size) {
  if (b.width() == 0.0) return {b.lo};
  std::vector<double> out(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    out[static_cast<std::size_t>(k)] =
        k == size - 1 ? b.hi : b.lo + b.width() * k / (size - 1);
  }
  return out;
}

class Refiner {
 public:
  Refiner(const ProfileEvaluator& eval, const Template& f,
          const LocationScaleSearch& cfg)
      : eval_(eval), f_(f), cfg_(cfg) {
    for (const auto& d : f.discontinuities()) jumps_.push_back(d.location);
  }

  // Best point on the segment (ξ, ν) + s (vξ, vν), |s| <= w, inside the box.
  Scored line_search(const Scored& from, double vxi, double vnu,
                     double w) const {
    double s_lo = -w, s_hi = w;
    clip(from.xi, vxi, cfg_.xi_bounds, s_lo, s_hi);
    clip(from.nu, vnu, cfg_.nu_bounds, s_lo, s_hi);
    if (!(s_hi > s_lo)) return from;

    std::vector<double> cuts;
    if (cfg_.use_breakpoints) {
      const auto& xs = eval_.xs();
      for (double d : jumps_) {
        const double denom = vxi + vnu * d;
        if (std::abs(denom) < 1e-14) continue;
        const double origin = from.xi + d * from.nu;
        double x_lo = origin + denom * s_lo;
        double x_hi = origin + denom * s_hi;
        if (x_lo > x_hi) std::swap(x_lo, x_hi);
        auto it = std::upper_bound(xs.begin(), xs.end(), x_lo);
        for (; it != xs.end() && *it < x_hi; ++it) {
          const double s = (*it - origin) / denom;
          if (s > s_lo && s < s_hi) cuts.push_back(s);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }

    std::vector<double> nodes;
    nodes.reserve(cuts.size() + 20);
    nodes.push_back(s_lo);
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      nodes.push_back(0.5 * (cuts[j] + cuts[j + 1]));
    }
    if (!cuts.empty()) {
      nodes.push_back(0.5 * (s_lo + cuts.front()));
      nodes.push_back(0.5 * (cuts.back() + s_hi));
    }
    const bool constant = f_.piecewise_constant();
    if (!constant || cuts.empty()) {
      constexpr int kUniform = 16;
      for (int k = 1; k <= kUniform; ++k) {
        nodes.push_back(s_lo + (s_hi - s_lo) * k / kUniform);
      }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    auto at = [&](double s) {
      return eval_(from.xi + s * vxi, from.nu + s * vnu);
    };
    Scored best = from;
    double best_s = 0.0;
    std::size_t best_j = nodes.size();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Scored c = at(nodes[j]);
      if (c.value < best.value) {
        best = c;
        best_s = nodes[j];
        best_j = j;
      }
    }
    if (constant) return best;

    // Golden refinement inside the breakpoint cell of the best node.
    double a = s_lo, b = s_hi;
    if (best_j < nodes.size()) {
      if (best_j > 0) a = nodes[best_j - 1];
      if (best_j + 1 < nodes.size()) b = nodes[best_j + 1];
    } else {
      const auto j = static_cast<std::size_t>(
          std::lower_bound(nodes.begin(), nodes.end(), 0.0) - nodes.begin());
      if (j > 0) a = nodes[j - 1];
      if (j < nodes.size()) b = nodes[j];
    }
    auto cell = std::lower_bound(cuts.begin(), cuts.end(), best_s);
    if (cell != cuts.end()) b = std::min(b, *cell);
    if (cell != cuts.begin()) a = std::max(a, *(cell - 1));
    if (b - a > cfg_.refine_tol) {
      Scored g_best = best;
      detail::golden_section(
          [&](double s) {
            const Scored c = at(s);
            if (c.value < g_best.value) g_best = c;
            return c.value;
          },
          a, b, cfg_.refine_tol);
      best = g_best;
    }
    return best;
  }

  Scored refine(Scored p, double w0, std::size_t n) const {
    std::vector<std::pair<double, double>> dirs = {{1.0, 0.0}, {0.0, 1.0}};
    for (double d : jumps_) dirs.emplace_back(-d, 1.0);
    const bool constant = f_.piecewise_constant();
    const double floor =
        constant ? std::max(16.0 / static_cast<double>(n), cfg_.refine_tol)
                 : cfg_.refine_tol;
    double w = w0;
    for (int round = 0; round < 400 && w > 0; ++round) {
      bool improved = false;
      for (const auto& [vxi, vnu] : dirs) {
        const Scored c = line_search(p, vxi, vnu, w);
        if (c.value < p.value - 1e-15 * std::abs(p.value)) {
          p = c;
          improved = true;
        }
      }
      if (improved) continue;
      if (constant || w <= floor) break;
      w = std::max(0.5 * w, floor);
    }
    return p;
  }

  // Exhaustive scan of the ξ cells within ±w of the start at fixed ν.
  Scored xi_cells(const Scored& from, double w) const {
    if (jumps_.empty() || !cfg_.use_breakpoints) return from;
    const double lo = std::max(cfg_.xi_bounds.lo, from.xi - w);
    const double hi = std::min(cfg_.xi_bounds.hi, from.xi + w);
    std::vector<double> cuts;
    const auto& xs = eval_.xs();
    for (double d : jumps_) {
      auto it = std::upper_bound(xs.begin(), xs.end(), lo + from.nu * d);
      for (; it != xs.end() && *it - from.nu * d < hi; ++it) {
        cuts.push_back(*it - from.nu * d);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Scored best = from;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const Scored c = eval_(0.5 * (cuts[j] + cuts[j + 1]), from.nu);
      if (c.value < best.value) best = c;
    }
    return best;
  }

 private:
  static void clip(double origin, double v, const Interval& b, double& lo,
                   double& hi) {
    if (v == 0.0) return;
    double a = (b.lo - origin) / v;
    double c = (b.hi - origin) / v;
    if (a > c) std::swap(a, c);
    lo = std::max(lo, a);
    hi = std::min(hi, c);
  }

  const ProfileEvaluator& eval_;
  const Template& f_;
  const LocationScaleSearch& cfg_;
  std::vector<double> jumps_;
};

}  // namespace

LocationScaleResult fit_location_scale(const Dataset& data, const Template& f,
                                       const Loss& loss,
                                       const LocationScaleSearch& cfg) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  check_box(cfg);

  ProfileEvaluator eval(data, f, loss, cfg.beta_bounds);
  const auto xi_axis = axis(cfg.xi_bounds, cfg.coarse_grid);
  const auto nu_axis = axis(cfg.nu_bounds, cfg.coarse_grid);
  std::vector<Scored> grid;
  grid.reserve(xi_axis.size() * nu_axis.size());
  for (double xi : xi_axis) {
    for (double nu : nu_axis) grid.push_back(eval(xi, nu));
  }
  const std::size_t starts =
      std::min(grid.size(), static_cast<std::size_t>(cfg.starts));
  std::partial_sort(grid.begin(), grid.begin() + starts, grid.end(),
                    [](const Scored& a, const Scored& b) {
                      return a.value < b.value;
                    });

  const double step_xi =
      xi_axis.size() > 1 ? cfg.xi_bounds.width() / (xi_axis.size() - 1) : 0.0;
  const double step_nu =
      nu_axis.size() > 1 ? cfg.nu_bounds.width() / (nu_axis.size() - 1) : 0.0;
  const double w0 = std::max({step_xi, step_nu, 16.0 * cfg.refine_tol});

  Refiner refiner(eval, f, cfg);
  Scored best;
  for (std::size_t k = 0; k < starts; ++k) {
    Scored p = refiner.xi_cells(grid[k], std::max(step_xi, w0));
    p = refiner.refine(p, w0, data.size());
    if (p.value < best.value) best = p;
  }

  LocationScaleResult r;
  r.estimate = {best.beta, best.xi, best.nu};
  r.objective_at_min = objective(data, f, loss, r.estimate);
  r.evaluations = eval.evaluations() + 1;
  return r;
}

}  // namespace tmatch
