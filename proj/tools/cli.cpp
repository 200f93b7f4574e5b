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


#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tmatch/dataset.hpp"
#include "tmatch/distributions.hpp"
#include "tmatch/error.hpp"
#include "tmatch/estimator.hpp"
#include "tmatch/experiments.hpp"
#include "tmatch/limitlaw.hpp"
#include "tmatch/loss.hpp"
#include "tmatch/templates.hpp"
#include "tmatch/theory.hpp"

namespace tmatch::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Raised for problems with the command line or configuration, which map to
// the usage exit status rather than the computational one.
struct UsageError {
  std::string name;
  std::string message;
};

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double to_double(const std::string& s, std::string_view flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw UsageError{"ParseError",
                     std::string(flag) + ": not a number: '" + s + "'"};
  }
  return v;
}

std::size_t to_size(const std::string& s, std::string_view flag) {
  const double v = to_double(s, flag);
  if (v < 1 || v != std::floor(v)) {
    throw UsageError{"ParseError",
                     std::string(flag) + ": expected a positive integer, got '" +
                         s + "'"};
  }
  return static_cast<std::size_t>(v);
}

nlohmann::json interval_value(const std::string& text, std::string_view flag) {
  const auto parts = split_commas(text);
  if (parts.size() != 2) {
    throw UsageError{"ParseError",
                     std::string(flag) + ": expected lo,hi, got '" + text + "'"};
  }
  return nlohmann::json::array({to_double(parts[0], flag), to_double(parts[1], flag)});
}

nlohmann::json size_list(const std::string& text, std::string_view flag) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : split_commas(text)) list.push_back(to_size(p, flag));
  return list;
}

// Values bound to flags; each flag that appears on the command line becomes
// a key of the override document layered over the config file.
struct Flags {
  std::string config_path;
  std::string out_dir;
  std::string data_path;
  bool print_config = false;

  std::string template_spec;
  std::string model;
  double theta_star = 0.0;
  double beta = 1.0;
  double xi = 0.0;
  double nu = 1.0;
  std::string loss;
  std::string noise;
  std::string design;
  std::string mode;
  std::string n;
  std::string sweep;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  std::string scaling;
  std::string bounds;
  std::string beta_bounds;
  std::string xi_bounds;
  std::string nu_bounds;
  int grid = 0;
  double tol = 0.0;
  int workers = 0;
};

struct Binding {
  CLI::Option* option;
  std::function<void(nlohmann::json&)> apply;
};

struct Command {
  explicit Command(CLI::App* a) : app(a) {}

  CLI::App* app;
  std::vector<Binding> bindings;

  nlohmann::json overrides() const {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& b : bindings) {
      if (b.option->count() > 0) b.apply(doc);
    }
    return doc;
  }
};

template <typename T>
void bind_option(Command& cmd, const std::string& flag, T& target,
          const std::string& key, const std::string& help) {
  CLI::Option* opt = cmd.app->add_option(flag, target, help)->capture_default_str();
  cmd.bindings.push_back({opt, [&target, key](nlohmann::json& doc) {
                            doc[key] = target;
                          }});
}

void bind_interval(Command& cmd, const std::string& flag, std::string& target,
                   const std::string& key, const std::string& help) {
  CLI::Option* opt = cmd.app->add_option(flag, target, help)->capture_default_str();
  cmd.bindings.push_back({opt, [&target, key, flag](nlohmann::json& doc) {
                            doc[key] = interval_value(target, flag);
                          }});
}

std::string interval_text(const Interval& iv) {
  std::ostringstream s;
  s << iv.lo << ',' << iv.hi;
  return s.str();
}

std::string size_list_text(const std::vector<std::size_t>& ns) {
  std::string s;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(ns[k]);
  }
  return s;
}

void seed_defaults(Flags& f, const ExperimentConfig& d) {
  f.template_spec = d.template_spec;
  f.model = std::string(to_string(d.model));
  f.theta_star = d.theta_star;
  f.beta = d.truth.beta;
  f.xi = d.truth.xi;
  f.nu = d.truth.nu;
  f.loss = d.loss;
  f.noise = d.noise;
  f.design = d.design;
  f.mode = std::string(to_string(d.mode));
  f.n = size_list_text(d.ns);
  f.repeats = d.repeats;
  f.seed = d.seed;
  f.scaling = std::string(to_string(d.scaling));
  f.bounds = interval_text(d.search.bounds);
  f.beta_bounds = interval_text(d.ls_search.beta_bounds);
  f.xi_bounds = interval_text(d.ls_search.xi_bounds);
  f.nu_bounds = interval_text(d.ls_search.nu_bounds);
  f.grid = d.search.coarse_grid;
  f.tol = d.search.refine_tol;
  f.workers = d.workers;
}

void add_io(Command& cmd, Flags& f) {
  cmd.app->add_option("--config", f.config_path,
                      "JSON config file; flags given explicitly override it");
  cmd.app->add_option("--out", f.out_dir, "output directory");
  cmd.app->add_flag("--print-config", f.print_config,
                    "print the resolved configuration as JSON and exit");
}

void add_model_flags(Command& cmd, Flags& f) {
  bind_option(cmd, "--template", f.template_spec, "template",
       "A..E, stump:<a>, periodic:<name> or json:<path>");
  bind_option(cmd, "--model", f.model, "model", "shift | location_scale | periodic");
  bind_option(cmd, "--theta-star", f.theta_star, "theta_star", "true shift");
  bind_option(cmd, "--beta", f.beta, "beta", "true amplitude (location_scale)");
  bind_option(cmd, "--xi", f.xi, "xi", "true location (location_scale)");
  bind_option(cmd, "--nu", f.nu, "nu", "true scale (location_scale)");
  bind_option(cmd, "--loss", f.loss, "loss",
       "squared | absolute | huber[:c] | tukey[:c]");
  bind_option(cmd, "--noise", f.noise, "noise",
       "gaussian:<sigma> | t:<dof> | cauchy | laplace:<b>");
  bind_option(cmd, "--design", f.design, "design", "uniform:<a>,<b>");
}

void add_search_flags(Command& cmd, Flags& f) {
  bind_interval(cmd, "--bounds", f.bounds, "bounds", "shift search range lo,hi");
  bind_option(cmd, "--grid", f.grid, "grid", "coarse grid points of the shift search");
  bind_option(cmd, "--tol", f.tol, "tol", "refinement tolerance");
  bind_interval(cmd, "--beta-bounds", f.beta_bounds, "beta_bounds",
                "amplitude search range lo,hi");
  bind_interval(cmd, "--xi-bounds", f.xi_bounds, "xi_bounds",
                "location search range lo,hi");
  bind_interval(cmd, "--nu-bounds", f.nu_bounds, "nu_bounds",
                "scale search range lo,hi");
}

void add_sampling_flags(Command& cmd, Flags& f) {
  bind_option(cmd, "--mode", f.mode, "mode", "random | fixed | periodic");
  CLI::Option* n_opt =
      cmd.app->add_option("--n", f.n, "sample size or comma-separated list")
          ->capture_default_str();
  cmd.bindings.push_back({n_opt, [&f](nlohmann::json& doc) {
                            doc["n"] = size_list(f.n, "--n");
                          }});
  bind_option(cmd, "--repeats", f.repeats, "repeats", "Monte Carlo repetitions");
  bind_option(cmd, "--seed", f.seed, "seed", "master seed");
  bind_option(cmd, "--scaling", f.scaling, "scaling", "sqrt_n | n");
  bind_option(cmd, "--workers", f.workers, "workers",
       "worker threads (0 = all cores); results do not depend on it");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError{"IoError", "cannot open config '" + path + "'"};
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError{"ParseError", "config '" + path + "': " + e.what()};
  }
}

// Config file first, explicit flags on top; then every textual spec is
// parsed once so that mistakes surface as usage errors before any work.
ExperimentConfig resolve(const Command& cmd, const Flags& f) {
  try {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) {
      cfg = ExperimentConfig::from_json(read_json_file(f.config_path), cfg);
    }
    cfg = ExperimentConfig::from_json(cmd.overrides(), cfg);
    (void)template_from_spec(cfg.template_spec);
    (void)Loss::parse(cfg.loss);
    (void)NoiseModel::parse(cfg.noise);
    (void)DesignModel::parse(cfg.design);
    return cfg;
  } catch (const Error& e) {
    throw UsageError{std::string(e.name()), e.what()};
  }
}

void emit(std::ostream& out, const Flags& f, const std::string& file,
          const std::string& text) {
  if (f.out_dir.empty()) {
    out << text;
    return;
  }
  fs::create_directories(f.out_dir);
  const fs::path path = fs::path(f.out_dir) / file;
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  o << text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  o << text;
}

Json components_json(const std::vector<JumpComponent>& comps) {
  Json list = Json::array();
  for (const auto& c : comps) {
    list.push_back({{"location", c.location},
                    {"intensity", c.intensity},
                    {"jump", c.jump}});
  }
  return list;
}

int do_fit(const ExperimentConfig& cfg, const Flags& f, std::ostream& out) {
  if (f.data_path.empty()) {
    throw UsageError{"InvalidArgument", "fit needs --data <csv>"};
  }
  const Dataset data = read_csv(fs::path(f.data_path));
  const Template tmpl = template_from_spec(cfg.template_spec);
  const Loss loss = Loss::parse(cfg.loss);
  Json j;
  j["template"] = cfg.template_spec;
  j["model"] = std::string(to_string(cfg.model));
  j["loss"] = loss.name();
  j["n"] = data.size();
  switch (cfg.model) {
    case Model::kShift: {
      const EstimationResult r = fit_shift(data, tmpl, loss, cfg.search);
      j["theta"] = r.theta;
      j["objective_at_min"] = r.objective_at_min;
      j["evaluations"] = r.evaluations;
      if (r.hint) {
        j["hint"] = Json::array({r.hint->lo, r.hint->hi});
      } else {
        j["hint"] = nullptr;
      }
      j["point"] = r.point();
      break;
    }
    case Model::kLocationScale: {
      const LocationScaleResult r =
          fit_location_scale(data, tmpl, loss, cfg.ls_search);
      j["beta"] = r.estimate.beta;
      j["xi"] = r.estimate.xi;
      j["nu"] = r.estimate.nu;
      j["objective_at_min"] = r.objective_at_min;
      j["evaluations"] = r.evaluations;
      break;
    }
    case Model::kPeriodic: {
      const PeriodicResult r = fit_periodic_correlation(data, tmpl);
      j["index"] = r.index;
      j["theta"] = r.theta;
      j["correlation"] = r.correlation;
      break;
    }
  }
  emit(out, f, "fit.json", j.dump(2) + "\n");
  return kExitOk;
}

int do_theory(const ExperimentConfig& cfg, const Flags& f, std::ostream& out) {
  const Template tmpl = template_from_spec(cfg.template_spec);
  const Loss loss = Loss::parse(cfg.loss);
  const NoiseModel noise = NoiseModel::parse(cfg.noise);
  const DesignModel design = DesignModel::parse(cfg.design);
  Json j;
  j["template"] = cfg.template_spec;
  j["model"] = std::string(to_string(cfg.model));
  j["loss"] = loss.name();
  j["noise"] = noise.name();
  j["design"] = design.name();
  if (cfg.model == Model::kLocationScale) {
    const LocationScaleAsymptotics a =
        location_scale_asymptotics(tmpl, design, loss, noise, cfg.truth);
    j["beta"] = cfg.truth.beta;
    j["xi"] = cfg.truth.xi;
    j["nu"] = cfg.truth.nu;
    j["beta_var"] = a.beta_var;
    j["denom"] = a.denom;
    j["xi_components"] = components_json(a.xi);
    j["nu_components"] = components_json(a.nu);
  } else if (tmpl.has_discontinuities()) {
    j["theta_star"] = cfg.theta_star;
    j["rate"] = "n";
    j["jump_constant"] = jump_constant(tmpl, design, cfg.theta_star);
    j["curvature"] = curvature_constant(loss, noise);
    j["components"] =
        components_json(shift_limit_components(tmpl, design, cfg.theta_star));
  } else {
    const AsymptoticReport r =
        asymptotic_variance_shift(tmpl, design, loss, noise, cfg.theta_star);
    j["theta_star"] = cfg.theta_star;
    j["rate"] = "sqrt_n";
    j["c_phi_loss"] = r.c_phi_loss;
    j["denom"] = r.denom;
    j["tau2"] = r.tau2;
    j["c0"] = r.c0;
    j["c1"] = r.c1;
    j["info"] = r.info;
    try {
      j["relative_efficiency"] = relative_efficiency(loss, noise);
    } catch (const Error&) {
      // Only defined against Gaussian noise; omitted otherwise.
    }
    j["predicted_mean_abs_scaled_error"] =
        std::sqrt(r.tau2) * std::sqrt(2.0 / std::numbers::pi);
  }
  emit(out, f, "theory.json", j.dump(2) + "\n");
  return kExitOk;
}

int do_limitlaw(const ExperimentConfig& cfg, const Flags& f, std::ostream& out) {
  const Template tmpl = template_from_spec(cfg.template_spec);
  const Loss loss = Loss::parse(cfg.loss);
  const NoiseModel noise = NoiseModel::parse(cfg.noise);
  const DesignModel design = DesignModel::parse(cfg.design);
  std::ostringstream csv;
  csv.precision(17);
  if (cfg.model == Model::kLocationScale) {
    const LocationScaleAsymptotics a =
        location_scale_asymptotics(tmpl, design, loss, noise, cfg.truth);
    const LocationScaleLimit s = location_scale_limit_samples(
        a, loss, noise, cfg.repeats, cfg.seed, cfg.workers);
    csv << "xi,nu\n";
    for (std::size_t k = 0; k < s.xi.size(); ++k) {
      csv << s.xi[k] << ',' << s.nu[k] << '\n';
    }
  } else {
    const MarkedProcessSpec spec =
        shift_limit_spec(tmpl, design, loss, noise, cfg.theta_star);
    const std::vector<double> mids =
        midpoint_sample(spec, cfg.repeats, cfg.seed, cfg.workers);
    csv << "midpoint\n";
    for (double m : mids) csv << m << '\n';
  }
  emit(out, f, "limitlaw.csv", csv.str());
  return kExitOk;
}

int do_experiment(const ExperimentConfig& cfg, const Flags& f,
                  std::ostream& out) {
  const ExperimentReport report = run_monte_carlo(cfg);
  if (!f.out_dir.empty()) {
    fs::create_directories(f.out_dir);
    const fs::path dir(f.out_dir);
    write_file(dir / "experiment.json", report.to_json(true).dump(2) + "\n");
    for (const auto& s : report.scenarios) {
      std::ostringstream csv;
      csv.precision(17);
      csv << "scaled_error\n";
      for (double e : s.scaled_errors) csv << e << '\n';
      write_file(dir / ("scaled_errors_n" + std::to_string(s.n) + ".csv"),
                 csv.str());
    }
  }
  out << report.to_json(false).dump(2) << '\n';
  return kExitOk;
}

struct TableFlags {
  TableSuiteConfig cfg;
  std::string n;
  std::string sweep;
  std::string bounds;
  std::string out_dir = ".";
  bool print_config = false;
};

Json table_config_json(const TableSuiteConfig& c) {
  Json j;
  j["repeats"] = c.repeats;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["sweep"] = c.ns;
  j["bounds"] = Json::array({c.search.bounds.lo, c.search.bounds.hi});
  j["grid"] = c.search.coarse_grid;
  j["tol"] = c.search.refine_tol;
  return j;
}

int do_tables(TableFlags& t, CLI::App& app, std::ostream& out) {
  if (app.get_option("--n")->count() > 0) {
    t.cfg.n = size_list(t.n, "--n").at(0).get<std::size_t>();
  }
  if (app.get_option("--sweep")->count() > 0) {
    t.cfg.ns = size_list(t.sweep, "--sweep").get<std::vector<std::size_t>>();
  }
  if (app.get_option("--bounds")->count() > 0) {
    const auto iv = interval_value(t.bounds, "--bounds");
    t.cfg.search.bounds = {iv[0].get<double>(), iv[1].get<double>()};
  }
  if (t.print_config) {
    out << table_config_json(t.cfg).dump(2) << '\n';
    return kExitOk;
  }
  const std::vector<Table> tables = run_table_suite(t.cfg);
  fs::create_directories(t.out_dir);
  for (const auto& tab : tables) {
    const fs::path path = fs::path(t.out_dir) / (tab.name + ".csv");
    write_file(path, tab.to_csv());
    out << path.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Template matching by M-estimation: fits, asymptotic theory, "
               "limit-law simulation and Monte Carlo experiments."};
  app.name(args.empty() ? "tmatch" : fs::path(args[0]).filename().string());
  app.require_subcommand(1, 1);

  const ExperimentConfig defaults;
  Flags flags;
  seed_defaults(flags, defaults);

  Command fit{app.add_subcommand("fit", "estimate from a dataset CSV (x,y)")};
  Command theory{app.add_subcommand("theory", "asymptotic constants as JSON")};
  Command limitlaw{app.add_subcommand(
      "limitlaw", "simulate midpoints of the limiting minimizer interval")};
  Command experiment{
      app.add_subcommand("experiment", "run one Monte Carlo experiment")};

  for (Command* c : {&fit, &theory, &limitlaw, &experiment}) {
    add_io(*c, flags);
    add_model_flags(*c, flags);
  }
  fit.app->add_option("--data", flags.data_path, "dataset CSV with header x,y")
      ->required();
  add_search_flags(fit, flags);
  add_search_flags(experiment, flags);
  add_sampling_flags(experiment, flags);
  bind_option(limitlaw, "--repeats", flags.repeats, "repeats", "number of draws");
  bind_option(limitlaw, "--seed", flags.seed, "seed", "master seed");
  bind_option(limitlaw, "--workers", flags.workers, "workers",
       "worker threads (0 = all cores)");

  TableFlags tflags;
  CLI::App* tables = app.add_subcommand(
      "tables", "run the full table suite and write table1..table4.csv");
  tflags.n = std::to_string(tflags.cfg.n);
  tflags.sweep = size_list_text(tflags.cfg.ns);
  tflags.bounds = interval_text(tflags.cfg.search.bounds);
  tables->add_option("--repeats", tflags.cfg.repeats, "repetitions per cell")
      ->capture_default_str();
  tables->add_option("--seed", tflags.cfg.seed, "master seed")
      ->capture_default_str();
  tables->add_option("--workers", tflags.cfg.workers,
                     "worker threads (0 = all cores)")
      ->capture_default_str();
  tables->add_option("--n", tflags.n, "sample size of the fixed-n tables")
      ->capture_default_str();
  tables->add_option("--sweep", tflags.sweep, "sample sizes of the rate tables")
      ->capture_default_str();
  tables->add_option("--bounds", tflags.bounds, "shift search range lo,hi")
      ->capture_default_str();
  tables->add_option("--grid", tflags.cfg.search.coarse_grid, "coarse grid points")
      ->capture_default_str();
  tables->add_option("--tol", tflags.cfg.search.refine_tol, "refinement tolerance")
      ->capture_default_str();
  tables->add_option("--out", tflags.out_dir, "output directory")
      ->capture_default_str();
  tables->add_flag("--print-config", tflags.print_config,
                   "print the resolved configuration as JSON and exit");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (tables->parsed()) return do_tables(tflags, *tables, out);
    for (Command* c : {&fit, &theory, &limitlaw, &experiment}) {
      if (!c->app->parsed()) continue;
      const ExperimentConfig cfg = resolve(*c, flags);
      if (flags.print_config) {
        out << cfg.to_json().dump(2) << '\n';
        return kExitOk;
      }
      if (c == &fit) return do_fit(cfg, flags, out);
      if (c == &theory) return do_theory(cfg, flags, out);
      if (c == &limitlaw) return do_limitlaw(cfg, flags, out);
      return do_experiment(cfg, flags, out);
    }
  } catch (const UsageError& e) {
    const std::string prefix = e.name + ": ";
    err << "error: "
        << (e.message.starts_with(prefix) ? e.message : prefix + e.message)
        << '\n'
        << "run '" << app.get_name() << " --help' for usage\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitUsage;
}

}  // namespace tmatch::cli
