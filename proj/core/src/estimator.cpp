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

#include "tmatch/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "search_util.hpp"
#include "tmatch/error.hpp"

namespace tmatch {
namespace {

void check_nonempty(const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  if (data.xs.size() != data.ys.size()) {
    throw Error(ErrorCode::kInvalidArgument, "x and y lengths differ");
  }
}

void check_config(const SearchConfig& cfg) {
  const auto& b = cfg.bounds;
  if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
    throw Error(ErrorCode::kDegenerateBounds,
                "search bounds must be finite with lo < hi");
  }
  if (!(cfg.refine_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "refine_tol must be positive");
  }
  if (cfg.coarse_grid < 8) {
    throw Error(ErrorCode::kInvalidArgument, "coarse grid needs >= 8 points");
  }
  if (cfg.brackets < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one bracket");
  }
}

// Objective evaluator that only visits design points whose shifted position
// falls inside the template support; everything else contributes L(y_i),
// which is folded into a precomputed base sum.
class ShiftEvaluator {
 public:
  ShiftEvaluator(const Dataset& data, const Template& f, const Loss& loss)
      : f_(f), loss_(loss), n_(data.size()) {
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return data.xs[a] < data.xs[b];
    });
    xs_.reserve(n_);
    ys_.reserve(n_);
    ly_.reserve(n_);
    for (std::size_t i : order) {
      xs_.push_back(data.xs[i]);
      ys_.push_back(data.ys[i]);
      ly_.push_back(loss.value(data.ys[i]));
      base_ += ly_.back();
    }
    windowed_ = !f.periodic();
  }

  double operator()(double theta) const {
    ++evals_;
    if (!windowed_) {
      long double s = 0.0L;
      for (std::size_t i = 0; i < n_; ++i) {
        s += loss_.value(ys_[i] - f_.eval(xs_[i] - theta));
      }
      return static_cast<double>(s / n_);
    }
    const auto& sup = f_.support();
    const double lo = sup.lo + theta;
    const double hi = sup.hi + theta;
    const double margin = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
    auto first = std::lower_bound(xs_.begin(), xs_.end(), lo - margin);
    auto last = std::upper_bound(first, xs_.end(), hi + margin);
    long double s = base_;
    for (auto it = first; it != last; ++it) {
      const auto i = static_cast<std::size_t>(it - xs_.begin());
      s += loss_.value(ys_[i] - f_.eval(xs_[i] - theta)) - ly_[i];
    }
    return static_cast<double>(s / n_);
  }

  std::size_t evaluations() const noexcept { return evals_; }
  const std::vector<double>& sorted_x() const noexcept { return xs_; }
  const std::vector<double>& sorted_y() const noexcept { return ys_; }

 private:
  const Template& f_;
  const Loss& loss_;
  std::size_t n_;
  std::vector<double> xs_, ys_, ly_;
  long double base_ = 0.0L;
  bool windowed_ = true;
  mutable std::size_t evals_ = 0;
};

// Sorted distinct points x_i - k + m strictly inside the bounds, for every
// location k in `locations` and, for periodic templates, every integer m.
std::vector<double> breakpoints(const std::vector<double>& xs,
                                const std::vector<double>& locations,
                                bool periodic, const Interval& bounds) {
  std::vector<double> out;
  for (double x : xs) {
    for (double k : locations) {
      const double base = x - k;
      if (!periodic) {
        if (base > bounds.lo && base < bounds.hi) out.push_back(base);
        continue;
      }
      const double m_lo = std::ceil(bounds.lo - base);
      for (double m = m_lo; base + m < bounds.hi; m += 1.0) {
        if (base + m > bounds.lo) out.push_back(base + m);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> grid_points(const Interval& b, int size) {
  std::vector<double> g(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    g[static_cast<std::size_t>(k)] =
        k == size - 1 ? b.hi : b.lo + b.width() * k / (size - 1);
  }
  return g;
}

// Index j of the cell containing t, where cell 0 is [lo, c_1] and cell j is
// (c_j, c_{j+1}]; `cuts` holds c_1 < ... < c_m.
std::size_t cell_of(const std::vector<double>& cuts, double t) {
  return static_cast<std::size_t>(
      std::lower_bound(cuts.begin(), cuts.end(), t) - cuts.begin());
}

Interval cell_closure(const std::vector<double>& cuts, std::size_t j,
                      const Interval& bounds) {
  return {j == 0 ? bounds.lo : cuts[j - 1],
          j == cuts.size() ? bounds.hi : cuts[j]};
}

// Exact minimization for piecewise-constant, non-periodic templates.
EstimationResult sweep_piecewise_constant(const Dataset& data,
                                          const Template& f, const Loss& loss,
                                          const SearchConfig& cfg) {
  const auto& bounds = cfg.bounds;
  const std::size_t n = data.size();
  const auto knots = f.knots();

  struct Event {
    double at;
    std::size_t point;
  };
  std::vector<Event> events;
  events.reserve(n * knots.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (double k : knots) {
      const double at = data.xs[i] - k;
      if (at > bounds.lo && at < bounds.hi) events.push_back({at, i});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.at < b.at; });

  std::vector<double> cuts;
  cuts.reserve(events.size());
  for (const auto& e : events) {
    if (cuts.empty() || e.at != cuts.back()) cuts.push_back(e.at);
  }
  const std::size_t cells = cuts.size() + 1;
  auto midpoint = [&](std::size_t j) {
    return cell_closure(cuts, j, bounds).midpoint();
  };

  std::vector<double> contrib(n);
  long double total = 0.0L;
  const double mid0 = midpoint(0);
  for (std::size_t i = 0; i < n; ++i) {
    contrib[i] = loss.value(data.ys[i] - f.eval(data.xs[i] - mid0));
    total += contrib[i];
  }
  std::vector<double> value(cells);
  value[0] = static_cast<double>(total / n);
  std::size_t e = 0;
  for (std::size_t j = 1; j < cells; ++j) {
    const double mid = midpoint(j);
    for (; e < events.size() && events[e].at == cuts[j - 1]; ++e) {
      const std::size_t i = events[e].point;
      total -= contrib[i];
      contrib[i] = loss.value(data.ys[i] - f.eval(data.xs[i] - mid));
      total += contrib[i];
    }
    value[j] = static_cast<double>(total / n);
  }

  // Re-score near-optimal cells exactly before deciding ties.
  const double approx_best = *std::min_element(value.begin(), value.end());
  const double slack = 1e-9 * std::abs(approx_best) + 1e-15;
  std::vector<std::pair<std::size_t, double>> candidates;
  for (std::size_t j = 0; j < cells; ++j) {
    if (value[j] <= approx_best + slack) {
      candidates.emplace_back(j, objective(data, f, loss, midpoint(j)));
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, c.second);
  std::size_t first = cells, last = 0;
  for (const auto& c : candidates) {
    if (detail::ties_with(c.second, best)) {
      first = std::min(first, c.first);
      last = std::max(last, c.first);
    }
  }

  // Smallest evaluated point of the first tied cell: its midpoint or the
  // first coarse-grid point inside it.
  const Interval cell = cell_closure(cuts, first, bounds);
  double theta = cell.midpoint();
  const double step = bounds.width() / (cfg.coarse_grid - 1);
  double k = std::ceil((cell.lo - bounds.lo) / step);
  double g = bounds.lo + k * step;
  if (first > 0 && g <= cell.lo) g = bounds.lo + (k + 1.0) * step;
  if (g <= cell.hi) theta = std::min(theta, g);

  EstimationResult r;
  r.theta = theta;
  r.objective_at_min = objective(data, f, loss, theta);
  r.evaluations = cells + candidates.size() + 1;
  r.hint = Interval{cell.lo, cell_closure(cuts, last, bounds).hi};
  return r;
}

}  // namespace

double objective(const Dataset& data, const Template& f, const Loss& loss,
                 double theta) {
  check_nonempty(data);
  long double s = 0.0L;
  for (std::size_t i = 0; i < data.size(); ++i) {
    s += loss.value(data.ys[i] - f.eval(data.xs[i] - theta));
  }
  return static_cast<double>(s / data.size());
}

double objective(const Dataset& data, const Template& f, const Loss& loss,
                 const LocationScale& p) {
  check_nonempty(data);
  if (!(p.nu > 0.0)) {
    throw Error(ErrorCode::kInvalidScale, "scale parameter must be positive");
  }
  long double s = 0.0L;
  for (std::size_t i = 0; i < data.size(); ++i) {
    s += loss.value(data.ys[i] - p.beta * f.eval((data.xs[i] - p.xi) / p.nu));
  }
  return static_cast<double>(s / data.size());
}

EstimationResult fit_shift(const Dataset& data, const Template& f,
                           const Loss& loss, const SearchConfig& cfg) {
  check_nonempty(data);
  check_config(cfg);
  const auto& bounds = cfg.bounds;

  if (cfg.use_breakpoints && f.piecewise_constant() && !f.periodic()) {
    return sweep_piecewise_constant(data, f, loss, cfg);
  }

  ShiftEvaluator eval(data, f, loss);
  std::vector<double> jumps;
  for (const auto& d : f.discontinuities()) jumps.push_back(d.location);
  const std::vector<double> cuts =
      cfg.use_breakpoints
          ? breakpoints(eval.sorted_x(), jumps, f.periodic(), bounds)
          : std::vector<double>{};

  std::vector<double> nodes = grid_points(bounds, cfg.coarse_grid);
  for (std::size_t j = 0; j <= cuts.size(); ++j) {
    nodes.push_back(cell_closure(cuts, j, bounds).midpoint());
  }
  // The objective jumps at each cut and is left-continuous there, so a cell's
  // infimum may sit at either end: score the cut itself and a point just to
  // its right. The offset clears the few ulps over which x - theta rounds
  // back onto the discontinuity.
  for (std::size_t j = 0; j < cuts.size(); ++j) {
    const double c = cuts[j];
    nodes.push_back(c);
    const double right = cell_closure(cuts, j + 1, bounds).midpoint();
    nodes.push_back(std::min(c + 1e-12 * (1.0 + std::abs(c)), right));
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<std::pair<double, double>> seen;  // (θ, objective)
  seen.reserve(nodes.size() + 64 * static_cast<std::size_t>(cfg.brackets));
  std::vector<double> values(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    values[j] = eval(nodes[j]);
    seen.emplace_back(nodes[j], values[j]);
  }

  std::vector<std::size_t> minima;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const bool left_ok = j == 0 || values[j] <= values[j - 1];
    const bool right_ok = j + 1 == nodes.size() || values[j] <= values[j + 1];
    if (left_ok && right_ok) minima.push_back(j);
  }
  const std::size_t keep =
      std::min(minima.size(), static_cast<std::size_t>(cfg.brackets));
  std::partial_sort(minima.begin(), minima.begin() + keep, minima.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] < values[b] ||
                             (values[a] == values[b] && a < b);
                    });
  minima.resize(keep);

  for (std::size_t j : minima) {
    const Interval cell = cell_closure(cuts, cell_of(cuts, nodes[j]), bounds);
    const double a = std::max(j == 0 ? bounds.lo : nodes[j - 1], cell.lo);
    const double b =
        std::min(j + 1 == nodes.size() ? bounds.hi : nodes[j + 1], cell.hi);
    if (!(b - a > cfg.refine_tol)) continue;
    detail::golden_section(
        [&](double t) {
          const double v = eval(t);
          seen.emplace_back(t, v);
          return v;
        },
        a, b, cfg.refine_tol);
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : seen) best = std::min(best, s.second);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : seen) {
    if (detail::ties_with(s.second, best)) {
      lo = std::min(lo, s.first);
      hi = std::max(hi, s.first);
    }
  }

  EstimationResult r;
  r.theta = lo;
  r.objective_at_min = objective(data, f, loss, lo);
  r.evaluations = eval.evaluations() + 1;
  if (f.piecewise_constant() && cfg.use_breakpoints) {
    r.hint = Interval{cell_closure(cuts, cell_of(cuts, lo), bounds).lo,
                      cell_closure(cuts, cell_of(cuts, hi), bounds).hi};
  } else if (hi - lo > 1e3 * cfg.refine_tol) {
    r.hint = Interval{lo, hi};
  }
  return r;
}

}  // namespace tmatch
