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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tmatch/distributions.hpp"
#include "tmatch/random.hpp"
#include "tmatch/templates.hpp"

namespace tmatch {

struct LocationScale {
  double beta = 1.0;
  double xi = 0.0;
  double nu = 1.0;
};

struct DatasetMeta {
  // "shift", "location_scale", "agnostic" or "file".
  std::string model = "file";
  double theta_star = 0.0;
  LocationScale truth;
  std::uint64_t seed = 0;
  DesignMode mode = DesignMode::kRandom;
};

struct Dataset {
  std::vector<double> xs;
  std::vector<double> ys;
  DatasetMeta meta;

  std::size_t size() const noexcept { return xs.size(); }
  bool empty() const noexcept { return xs.empty(); }
};

// y_i = f(x_i - θ*) + z_i. Design points are drawn before the noise, so two
// calls that share a generator state produce the same design.
Dataset generate_shift(const Template& f, double theta_star,
                       const DesignModel& design, const NoiseModel& noise,
                       std::size_t n, DesignMode mode, Rng& rng);

// y_i = β* f((x_i - ξ*)/ν*) + z_i. Throws InvalidScale unless ν* > 0.
Dataset generate_location_scale(const Template& f, const LocationScale& truth,
                                const DesignModel& design,
                                const NoiseModel& noise, std::size_t n,
                                DesignMode mode, Rng& rng);

// y_i = g(x_i) + z_i for an arbitrary (caller-bounded) g.
Dataset generate_agnostic(const std::function<double(double)>& g,
                          const DesignModel& design, const NoiseModel& noise,
                          std::size_t n, DesignMode mode, Rng& rng);

// Two-column CSV with header "x,y" and 17 significant digits.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);

}  // namespace tmatch
