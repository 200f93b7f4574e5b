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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmatch/dataset.hpp"
#include "tmatch/distributions.hpp"
#include "tmatch/estimator.hpp"

namespace tmatch {

enum class Scaling { kSqrtN, kN };
enum class Model { kShift, kLocationScale, kPeriodic };

Scaling parse_scaling(std::string_view text);
std::string_view to_string(Scaling s);
Model parse_model(std::string_view text);
std::string_view to_string(Model m);

struct ExperimentConfig {
  std::string template_spec = "A";
  Model model = Model::kShift;
  double theta_star = 0.0;
  // True (β*, ξ*, ν*) for the location-scale model.
  LocationScale truth;
  std::string loss = "squared";
  std::string noise = "gaussian:1";
  std::string design = "uniform:0,1";
  DesignMode mode = DesignMode::kRandom;
  std::vector<std::size_t> ns = {10000};
  std::size_t repeats = 200;
  std::uint64_t seed = 1;
  Scaling scaling = Scaling::kSqrtN;
  SearchConfig search;
  LocationScaleSearch ls_search;
  // Limit-process draws for the Poisson comparison; 0 disables it.
  std::size_t limit_reference_draws = 0;
  // Use the midpoint of a flat minimum instead of its left end.
  bool midpoint_of_flat = true;
  // Thread count; 0 means all cores. Never affects results.
  int workers = 0;
  // Overrides `noise` when set (zero-noise oracles in tests).
  std::optional<NoiseModel> noise_override;

  nlohmann::ordered_json to_json() const;
  // Fields missing from `doc` keep their value from `base`.
  static ExperimentConfig from_json(const nlohmann::json& doc,
                                    ExperimentConfig base);
  static ExperimentConfig from_json(const nlohmann::json& doc);
};

struct LocationScaleSummary {
  // √n(β̂ - β*) and n(ν̂ - ν*); n(ξ̂ - ξ*) lives in scaled_errors.
  std::vector<double> beta_errors;
  std::vector<double> nu_errors;
  double mean_abs_beta = 0.0;
  double mean_abs_xi = 0.0;
  double mean_abs_nu = 0.0;
  double corr_beta_xi = 0.0;
  double corr_beta_nu = 0.0;
  double corr_xi_nu = 0.0;
  std::optional<double> beta_var;
  std::optional<double> ks_beta_vs_normal;
  std::optional<double> ks_xi_vs_poisson;
  std::optional<double> ks_nu_vs_poisson;
};

struct ScenarioResult {
  std::size_t n = 0;
  double rate = 1.0;
  // r_n (point - θ*) per successful repeat, in repeat order.
  std::vector<double> scaled_errors;
  double mean_abs_scaled_error = 0.0;
  // mean |point - θ*|.
  double mean_abs_error = 0.0;
  std::vector<std::pair<double, double>> quantiles;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;
  std::optional<double> tau;
  std::optional<double> ks_vs_normal;
  std::optional<double> ks_vs_poisson;
  std::optional<LocationScaleSummary> location_scale;
};

struct ExperimentReport {
  ExperimentConfig config;
  // Squared loss under noise without a variance: no limit theory applies.
  bool theory_silent = false;
  std::vector<ScenarioResult> scenarios;
  std::optional<double> rate_slope;

  nlohmann::ordered_json to_json(bool include_raw = true) const;
};

// Generates and fits `repeats` datasets per sample size. Repeat r at size n
// uses make_rng(derive_seed(seed, n, r)); results are stored by repeat
// index, so the report does not depend on the worker count.
ExperimentReport run_monte_carlo(const ExperimentConfig& cfg);

struct TableSuiteConfig {
  std::size_t repeats = 200;
  std::uint64_t seed = 1;
  int workers = 0;
  std::size_t n = 10000;
  std::vector<std::size_t> ns = {100, 500, 1000, 5000, 10000};
  SearchConfig search;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

// Tables 1-4 of the simulation study: smooth templates at √n scale, the
// √n sample-size sweep, discontinuous templates at n scale, and the n-scale
// sample-size sweep.
std::vector<Table> run_table_suite(const TableSuiteConfig& cfg);

// Seed for a named scenario: derive_seed(master, FNV-1a(label)).
std::uint64_t scenario_seed(std::uint64_t master, std::string_view label);

}  // namespace tmatch
