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

#include "tmatch/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "tmatch/error.hpp"
#include "tmatch/limitlaw.hpp"
#include "tmatch/loss.hpp"
#include "tmatch/statistics.hpp"
#include "tmatch/theory.hpp"

namespace tmatch {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kReferenceStream = 0x4C494D4954ULL;
constexpr double kQuantileLevels[] = {0.05, 0.25, 0.5, 0.75, 0.95};

nlohmann::ordered_json interval_json(const Interval& b) {
  return nlohmann::ordered_json::array({b.lo, b.hi});
}

Interval interval_from(const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 2) {
    throw Error(ErrorCode::kParseError, "bounds must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

template <class T>
void read_if(const nlohmann::json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

struct Outcome {
  bool ok = false;
  double error = 0.0;
  LocationScale ls;
  std::string message;
};

std::string format_cell(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

double optional_mean_abs(const std::vector<double>& xs) {
  return xs.empty() ? kNaN : mean_abs(xs);
}

void fill_location_scale(ScenarioResult& s, const std::vector<Outcome>& out,
                         const LocationScale& truth, double n,
                         const std::optional<LocationScaleAsymptotics>& asym,
                         const std::optional<LocationScaleLimit>& reference) {
  LocationScaleSummary ls;
  for (const auto& o : out) {
    if (!o.ok) continue;
    ls.beta_errors.push_back(std::sqrt(n) * (o.ls.beta - truth.beta));
    ls.nu_errors.push_back(n * (o.ls.nu - truth.nu));
  }
  ls.mean_abs_beta = optional_mean_abs(ls.beta_errors);
  ls.mean_abs_xi = optional_mean_abs(s.scaled_errors);
  ls.mean_abs_nu = optional_mean_abs(ls.nu_errors);
  if (ls.beta_errors.size() >= 2) {
    ls.corr_beta_xi = correlation(ls.beta_errors, s.scaled_errors);
    ls.corr_beta_nu = correlation(ls.beta_errors, ls.nu_errors);
    ls.corr_xi_nu = correlation(s.scaled_errors, ls.nu_errors);
  }
  if (asym && !ls.beta_errors.empty()) {
    ls.beta_var = asym->beta_var;
    const double sd = std::sqrt(asym->beta_var);
    ls.ks_beta_vs_normal = ks_one_sample(
        ls.beta_errors, [sd](double x) { return normal_cdf(x, sd); });
  }
  if (reference && !s.scaled_errors.empty()) {
    ls.ks_xi_vs_poisson = ks_two_sample(s.scaled_errors, reference->xi);
    ls.ks_nu_vs_poisson = ks_two_sample(ls.nu_errors, reference->nu);
  }
  s.location_scale = std::move(ls);
}

Outcome run_repeat(const ExperimentConfig& cfg, const Template& f,
                   const Loss& loss, const NoiseModel& noise,
                   const DesignModel& design, std::size_t n, std::size_t r) {
  Outcome o;
  try {
    Rng rng = make_rng(derive_seed(cfg.seed, n, r));
    switch (cfg.model) {
      case Model::kShift: {
        const Dataset data =
            generate_shift(f, cfg.theta_star, design, noise, n, cfg.mode, rng);
        const EstimationResult res = fit_shift(data, f, loss, cfg.search);
        o.error = (cfg.midpoint_of_flat ? res.point() : res.theta) - cfg.theta_star;
        break;
      }
      case Model::kPeriodic: {
        const Dataset data =
            generate_shift(f, cfg.theta_star, design, noise, n, cfg.mode, rng);
        const PeriodicResult res = fit_periodic_correlation(data, f);
        const double d = res.theta - cfg.theta_star;
        o.error = d - std::floor(d + 0.5);
        break;
      }
      case Model::kLocationScale: {
        const Dataset data = generate_location_scale(f, cfg.truth, design,
                                                     noise, n, cfg.mode, rng);
        o.ls = fit_location_scale(data, f, loss, cfg.ls_search).estimate;
        o.error = o.ls.xi - cfg.truth.xi;
        break;
      }
    }
    o.ok = true;
  } catch (const std::exception& e) {
    o.message = e.what();
  }
  return o;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

Scaling parse_scaling(std::string_view text) {
  if (text == "sqrt_n") return Scaling::kSqrtN;
  if (text == "n") return Scaling::kN;
  throw Error(ErrorCode::kParseError,
              "scaling must be sqrt_n or n, got '" + std::string(text) + "'");
}

std::string_view to_string(Scaling s) {
  return s == Scaling::kSqrtN ? "sqrt_n" : "n";
}

Model parse_model(std::string_view text) {
  if (text == "shift") return Model::kShift;
  if (text == "location_scale") return Model::kLocationScale;
  if (text == "periodic") return Model::kPeriodic;
  throw Error(ErrorCode::kParseError,
              "model must be shift, location_scale or periodic, got '" +
                  std::string(text) + "'");
}

std::string_view to_string(Model m) {
  switch (m) {
    case Model::kShift: return "shift";
    case Model::kLocationScale: return "location_scale";
    case Model::kPeriodic: return "periodic";
  }
  return "shift";
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["template"] = template_spec;
  j["model"] = std::string(to_string(model));
  j["theta_star"] = theta_star;
  j["beta"] = truth.beta;
  j["xi"] = truth.xi;
  j["nu"] = truth.nu;
  j["loss"] = loss;
  j["noise"] = noise;
  j["design"] = design;
  j["mode"] = std::string(to_string(mode));
  j["n"] = ns;
  j["repeats"] = repeats;
  j["seed"] = seed;
  j["scaling"] = std::string(to_string(scaling));
  j["bounds"] = interval_json(search.bounds);
  j["grid"] = search.coarse_grid;
  j["tol"] = search.refine_tol;
  j["use_breakpoints"] = search.use_breakpoints;
  j["brackets"] = search.brackets;
  j["beta_bounds"] = interval_json(ls_search.beta_bounds);
  j["xi_bounds"] = interval_json(ls_search.xi_bounds);
  j["nu_bounds"] = interval_json(ls_search.nu_bounds);
  j["ls_grid"] = ls_search.coarse_grid;
  j["ls_starts"] = ls_search.starts;
  j["limit_reference_draws"] = limit_reference_draws;
  j["midpoint_of_flat"] = midpoint_of_flat;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc,
                                             ExperimentConfig base) {
  ExperimentConfig c = std::move(base);
  try {
    read_if(doc, "template", c.template_spec);
    if (doc.contains("model")) {
      c.model = parse_model(doc.at("model").get<std::string>());
    }
    read_if(doc, "theta_star", c.theta_star);
    read_if(doc, "beta", c.truth.beta);
    read_if(doc, "xi", c.truth.xi);
    read_if(doc, "nu", c.truth.nu);
    read_if(doc, "loss", c.loss);
    read_if(doc, "noise", c.noise);
    read_if(doc, "design", c.design);
    if (doc.contains("mode")) {
      c.mode = parse_design_mode(doc.at("mode").get<std::string>());
    }
    if (doc.contains("n")) {
      const auto& n = doc.at("n");
      c.ns = n.is_array() ? n.get<std::vector<std::size_t>>()
                          : std::vector<std::size_t>{n.get<std::size_t>()};
    }
    read_if(doc, "repeats", c.repeats);
    read_if(doc, "seed", c.seed);
    if (doc.contains("scaling")) {
      c.scaling = parse_scaling(doc.at("scaling").get<std::string>());
    }
    if (doc.contains("bounds")) c.search.bounds = interval_from(doc.at("bounds"));
    read_if(doc, "grid", c.search.coarse_grid);
    read_if(doc, "tol", c.search.refine_tol);
    read_if(doc, "use_breakpoints", c.search.use_breakpoints);
    read_if(doc, "brackets", c.search.brackets);
    if (doc.contains("beta_bounds")) {
      c.ls_search.beta_bounds = interval_from(doc.at("beta_bounds"));
    }
    if (doc.contains("xi_bounds")) {
      c.ls_search.xi_bounds = interval_from(doc.at("xi_bounds"));
    }
    if (doc.contains("nu_bounds")) {
      c.ls_search.nu_bounds = interval_from(doc.at("nu_bounds"));
    }
    read_if(doc, "ls_grid", c.ls_search.coarse_grid);
    read_if(doc, "ls_starts", c.ls_search.starts);
    c.ls_search.refine_tol = c.search.refine_tol;
    c.ls_search.use_breakpoints = c.search.use_breakpoints;
    read_if(doc, "limit_reference_draws", c.limit_reference_draws);
    read_if(doc, "midpoint_of_flat", c.midpoint_of_flat);
    read_if(doc, "workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("bad experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  return from_json(doc, ExperimentConfig{});
}

nlohmann::ordered_json ExperimentReport::to_json(bool include_raw) const {
  nlohmann::ordered_json j;
  j["config"] = config.to_json();
  j["theory_silent"] = theory_silent;
  auto& list = j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : scenarios) {
    nlohmann::ordered_json e;
    e["n"] = s.n;
    e["rate"] = s.rate;
    e["successes"] = s.scaled_errors.size();
    e["failures"] = s.failures;
    e["failure_messages"] = s.failure_messages;
    e["mean_abs_scaled_error"] = s.mean_abs_scaled_error;
    e["mean_abs_error"] = s.mean_abs_error;
    auto& q = e["quantiles"] = nlohmann::ordered_json::array();
    for (const auto& [p, v] : s.quantiles) q.push_back({{"p", p}, {"value", v}});
    if (s.tau) e["tau"] = *s.tau;
    if (s.ks_vs_normal) e["ks_vs_normal"] = *s.ks_vs_normal;
    if (s.ks_vs_poisson) e["ks_vs_poisson"] = *s.ks_vs_poisson;
    if (s.location_scale) {
      const auto& ls = *s.location_scale;
      nlohmann::ordered_json l;
      l["mean_abs_sqrt_n_beta_error"] = ls.mean_abs_beta;
      l["mean_abs_n_xi_error"] = ls.mean_abs_xi;
      l["mean_abs_n_nu_error"] = ls.mean_abs_nu;
      l["corr_beta_xi"] = ls.corr_beta_xi;
      l["corr_beta_nu"] = ls.corr_beta_nu;
      l["corr_xi_nu"] = ls.corr_xi_nu;
      if (ls.beta_var) l["beta_var"] = *ls.beta_var;
      if (ls.ks_beta_vs_normal) l["ks_beta_vs_normal"] = *ls.ks_beta_vs_normal;
      if (ls.ks_xi_vs_poisson) l["ks_xi_vs_poisson"] = *ls.ks_xi_vs_poisson;
      if (ls.ks_nu_vs_poisson) l["ks_nu_vs_poisson"] = *ls.ks_nu_vs_poisson;
      if (include_raw) {
        l["beta_errors"] = ls.beta_errors;
        l["nu_errors"] = ls.nu_errors;
      }
      e["location_scale"] = std::move(l);
    }
    if (include_raw) e["scaled_errors"] = s.scaled_errors;
    list.push_back(std::move(e));
  }
  if (rate_slope) j["rate_slope"] = *rate_slope;
  return j;
}

ExperimentReport run_monte_carlo(const ExperimentConfig& cfg) {
  const Template f = template_from_spec(cfg.template_spec);
  const Loss loss = Loss::parse(cfg.loss);
  const NoiseModel noise =
      cfg.noise_override ? *cfg.noise_override : NoiseModel::parse(cfg.noise);
  const DesignModel design = DesignModel::parse(cfg.design);
  if (cfg.repeats == 0 || cfg.ns.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least one repeat and one sample size");
  }
  for (std::size_t n : cfg.ns) {
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  }

  ExperimentReport report;
  report.config = cfg;
  report.theory_silent = loss.kind() == LossKind::kSquared &&
                         !std::isfinite(noise.variance());

  std::optional<double> tau;
  std::vector<double> reference;
  std::optional<LocationScaleAsymptotics> ls_asym;
  std::optional<LocationScaleLimit> ls_reference;
  const std::uint64_t ref_seed = derive_seed(cfg.seed, kReferenceStream);
  if (cfg.model == Model::kShift && !report.theory_silent && noise.has_density()) {
    try {
      if (cfg.scaling == Scaling::kSqrtN && !f.has_discontinuities()) {
        tau = std::sqrt(asymptotic_variance_shift(f, design, loss, noise,
                                                  cfg.theta_star)
                            .tau2);
      }
      if (cfg.scaling == Scaling::kN && f.has_discontinuities() &&
          cfg.limit_reference_draws > 0) {
        reference = midpoint_sample(
            shift_limit_spec(f, design, loss, noise, cfg.theta_star),
            cfg.limit_reference_draws, ref_seed, cfg.workers);
      }
    } catch (const Error&) {
      tau.reset();
      reference.clear();
    }
  }
  if (cfg.model == Model::kLocationScale && !report.theory_silent &&
      noise.has_density()) {
    try {
      ls_asym = location_scale_asymptotics(f, design, loss, noise, cfg.truth);
      if (cfg.limit_reference_draws > 0) {
        ls_reference = location_scale_limit_samples(
            *ls_asym, loss, noise, cfg.limit_reference_draws, ref_seed,
            cfg.workers);
      }
    } catch (const Error&) {
      ls_reference.reset();
    }
  }

  std::vector<double> ns_d, mean_errors;
  for (std::size_t n : cfg.ns) {
    std::vector<Outcome> outcomes(cfg.repeats);
    detail::parallel_for(cfg.repeats, cfg.workers, [&](std::size_t r) {
      outcomes[r] = run_repeat(cfg, f, loss, noise, design, n, r);
    });

    ScenarioResult s;
    s.n = n;
    const double nd = static_cast<double>(n);
    s.rate = cfg.model == Model::kLocationScale || cfg.scaling == Scaling::kN
                 ? nd
                 : std::sqrt(nd);
    std::vector<double> raw;
    for (const auto& o : outcomes) {
      if (!o.ok) {
        ++s.failures;
        s.failure_messages.push_back(o.message);
        continue;
      }
      raw.push_back(o.error);
      s.scaled_errors.push_back(s.rate * o.error);
    }
    s.mean_abs_scaled_error = optional_mean_abs(s.scaled_errors);
    s.mean_abs_error = optional_mean_abs(raw);
    if (!s.scaled_errors.empty()) {
      for (double p : kQuantileLevels) {
        s.quantiles.emplace_back(p, quantile(s.scaled_errors, p));
      }
      if (tau) {
        s.tau = tau;
        const double sd = *tau;
        s.ks_vs_normal = ks_one_sample(
            s.scaled_errors, [sd](double x) { return normal_cdf(x, sd); });
      }
      if (!reference.empty()) {
        s.ks_vs_poisson = ks_two_sample(s.scaled_errors, reference);
      }
    }
    if (cfg.model == Model::kLocationScale) {
      fill_location_scale(s, outcomes, cfg.truth, nd, ls_asym, ls_reference);
    }
    ns_d.push_back(nd);
    mean_errors.push_back(s.mean_abs_error);
    report.scenarios.push_back(std::move(s));
  }

  if (ns_d.size() >= 3) {
    try {
      report.rate_slope = rate_slope(ns_d, mean_errors);
    } catch (const Error&) {
      report.rate_slope.reset();
    }
  }
  return report;
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::uint64_t scenario_seed(std::uint64_t master, std::string_view label) {
  return derive_seed(master, fnv1a(label));
}

std::vector<Table> run_table_suite(const TableSuiteConfig& cfg) {
  const std::vector<std::pair<std::string, std::string>> noises = {
      {"Normal", "gaussian:1"}, {"T3", "t:3"}, {"Cauchy", "cauchy"}};
  const std::vector<std::string> losses = {"squared", "absolute", "huber",
                                           "tukey"};

  auto base = [&](const std::string& label) {
    ExperimentConfig c;
    c.repeats = cfg.repeats;
    c.seed = scenario_seed(cfg.seed, label);
    c.workers = cfg.workers;
    c.search = cfg.search;
    return c;
  };

  auto grid_table = [&](const std::string& name,
                        const std::vector<std::string>& templates,
                        Scaling scaling) {
    Table t;
    t.name = name;
    t.header = {"template", "noise"};
    t.header.insert(t.header.end(), losses.begin(), losses.end());
    for (const auto& tmpl : templates) {
      for (const auto& [noise_label, noise] : noises) {
        std::vector<std::string> row = {tmpl, noise_label};
        for (const auto& loss : losses) {
          ExperimentConfig c =
              base(name + "/" + tmpl + "/" + noise_label + "/" + loss);
          c.template_spec = tmpl;
          c.noise = noise;
          c.loss = loss;
          c.ns = {cfg.n};
          c.scaling = scaling;
          row.push_back(
              format_cell(run_monte_carlo(c).scenarios[0].mean_abs_scaled_error));
        }
        t.rows.push_back(std::move(row));
      }
    }
    return t;
  };

  auto sweep_table = [&](const std::string& name, const std::string& tmpl,
                         Scaling scaling, const std::string& label) {
    ExperimentConfig c = base(name + "/" + tmpl + "/T3/absolute");
    c.template_spec = tmpl;
    c.noise = "t:3";
    c.loss = "absolute";
    c.ns = cfg.ns;
    c.scaling = scaling;
    const ExperimentReport r = run_monte_carlo(c);
    Table t;
    t.name = name;
    t.header = {"n"};
    std::vector<std::string> row = {label};
    for (const auto& s : r.scenarios) {
      t.header.push_back(std::to_string(s.n));
      row.push_back(format_cell(s.mean_abs_scaled_error));
    }
    t.rows.push_back(std::move(row));
    return t;
  };

  std::vector<Table> out;
  out.push_back(grid_table("table1", {"A", "B"}, Scaling::kSqrtN));
  out.push_back(sweep_table("table2", "A", Scaling::kSqrtN, "mean_abs_sqrt_n_error"));
  out.push_back(grid_table("table3", {"C", "D", "E"}, Scaling::kN));
  out.push_back(sweep_table("table4", "E", Scaling::kN, "mean_abs_n_error"));
  return out;
}

}  // namespace tmatch
