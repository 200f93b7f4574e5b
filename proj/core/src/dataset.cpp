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

#include "tmatch/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "parse_util.hpp"
#include "tmatch/error.hpp"

namespace tmatch {
namespace {

Dataset generate(const std::function<double(double)>& signal,
                 const DesignModel& design, const NoiseModel& noise,
                 std::size_t n, DesignMode mode, Rng& rng) {
  Dataset d;
  d.xs = design.points(mode, n, rng);
  d.ys = noise.sample(rng, n);
  for (std::size_t i = 0; i < n; ++i) d.ys[i] += signal(d.xs[i]);
  d.meta.mode = mode;
  return d;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, last - first + 1);
}

}  // namespace

Dataset generate_shift(const Template& f, double theta_star,
                       const DesignModel& design, const NoiseModel& noise,
                       std::size_t n, DesignMode mode, Rng& rng) {
  Dataset d = generate([&](double x) { return f.eval(x - theta_star); },
                       design, noise, n, mode, rng);
  d.meta.model = "shift";
  d.meta.theta_star = theta_star;
  d.meta.truth = {1.0, theta_star, 1.0};
  return d;
}

Dataset generate_location_scale(const Template& f, const LocationScale& truth,
                                const DesignModel& design,
                                const NoiseModel& noise, std::size_t n,
                                DesignMode mode, Rng& rng) {
  if (!(truth.nu > 0.0)) {
    throw Error(ErrorCode::kInvalidScale, "scale parameter must be positive");
  }
  Dataset d = generate(
      [&](double x) { return truth.beta * f.eval((x - truth.xi) / truth.nu); },
      design, noise, n, mode, rng);
  d.meta.model = "location_scale";
  d.meta.theta_star = truth.xi;
  d.meta.truth = truth;
  return d;
}

Dataset generate_agnostic(const std::function<double(double)>& g,
                          const DesignModel& design, const NoiseModel& noise,
                          std::size_t n, DesignMode mode, Rng& rng) {
  Dataset d = generate(g, design, noise, n, mode, rng);
  d.meta.model = "agnostic";
  return d;
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << "x,y\n";
  char buf[96];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", data.xs[i], data.ys[i]);
    out << buf;
  }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_csv(data, out);
}

Dataset read_csv(std::istream& in) {
  Dataset d;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y") {
    throw Error(ErrorCode::kParseError, "dataset CSV must start with 'x,y'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(lineno) + ": expected 'x,y'");
    }
    const std::string ctx = "line " + std::to_string(lineno);
    d.xs.push_back(detail::parse_double(trim(line.substr(0, comma)), ctx));
    d.ys.push_back(detail::parse_double(trim(line.substr(comma + 1)), ctx));
  }
  return d;
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_csv(in);
}

}  // namespace tmatch
