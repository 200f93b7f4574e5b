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

#include "tmatch/templates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "parse_util.hpp"
#include "tmatch/error.hpp"

namespace tmatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kJumpTolerance = 1e-9;

std::vector<double> poly_multiply(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

Piece constant_piece(double lo, double hi, double value) {
  return Piece{lo, hi, {value}, 0.0};
}

Template template_a() {
  return Template("A",
                  {Piece{0.25, 0.5, {-1.0, 4.0}, 0.0},
                   Piece{0.5, 0.75, {3.0, -4.0}, 0.0}},
                  {}, Smoothness::kLipschitz, 1.0, false, 4.0);
}

// max{0, (1 - (4x - 2)^2)^3}; on [0.25, 0.75] the inner factor is
// -16x^2 + 16x - 3.
Template template_b() {
  const std::vector<double> inner = {-3.0, 16.0, -16.0};
  auto coeffs = poly_multiply(poly_multiply(inner, inner), inner);
  // max |f'| = 4 * 6 u (1 - u^2)^2 at u^2 = 1/5.
  const double bound = 24.0 / std::sqrt(5.0) * 16.0 / 25.0;
  return Template("B", {Piece{0.25, 0.75, std::move(coeffs), 0.0}}, {},
                  Smoothness::kLipschitz, 1.0, false, bound);
}

Template template_c() {
  return Template("C", {constant_piece(0.25, 0.75, 1.0)},
                  {{0.25, 1.0}, {0.75, -1.0}}, Smoothness::kPiecewiseLipschitz,
                  1.0, false, 0.0);
}

Template template_d() {
  return Template(
      "D", {constant_piece(0.2, 0.4, 1.0), constant_piece(0.6, 0.8, 1.0)},
      {{0.2, 1.0}, {0.4, -1.0}, {0.6, 1.0}, {0.8, -1.0}},
      Smoothness::kPiecewiseLipschitz, 1.0, false, 0.0);
}

Template template_e() {
  return Template("E", {Piece{0.25, 0.5, {-1.0, 4.0}, 0.0}}, {{0.5, -1.0}},
                  Smoothness::kPiecewiseLipschitz, 1.0, false, 4.0);
}

Template stump(double amplitude) {
  if (amplitude == 0.0 || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::kInvalidArgument,
                "stump amplitude must be finite and non-zero");
  }
  return Template("stump:" + detail::format_double(amplitude),
                  {constant_piece(0.0, kInf, amplitude)}, {{0.0, amplitude}},
                  Smoothness::kPiecewiseLipschitz, 1.0, false, 0.0);
}

double json_number(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw Error(ErrorCode::kParseError, "expected a number, got '" + s + "'");
  }
  return v.get<double>();
}

Smoothness parse_smoothness(const std::string& s) {
  if (s == "lipschitz") return Smoothness::kLipschitz;
  if (s == "piecewise_lipschitz") return Smoothness::kPiecewiseLipschitz;
  if (s == "holder") return Smoothness::kHolder;
  throw Error(ErrorCode::kParseError, "unknown smoothness '" + s + "'");
}

}  // namespace

double Piece::value(double x) const noexcept {
  const double t = x - center;
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = acc * t + *it;
  }
  return acc;
}

double Piece::slope(double x) const noexcept {
  const double t = x - center;
  double acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 1;) {
    acc = acc * t + static_cast<double>(k) * coefficients[k];
  }
  return acc;
}

Template::Template(std::string name, std::vector<Piece> pieces,
                   std::vector<Discontinuity> discontinuities,
                   Smoothness smoothness, double holder_alpha, bool periodic,
                   std::optional<double> lipschitz_bound)
    : name_(std::move(name)),
      pieces_(std::move(pieces)),
      discontinuities_(std::move(discontinuities)),
      smoothness_(smoothness),
      holder_alpha_(holder_alpha),
      periodic_(periodic) {
  validate();
  if (lipschitz_bound) {
    lipschitz_bound_ = *lipschitz_bound;
  } else {
    double bound = 0.0;
    for (const auto& p : pieces_) {
      if (p.degree() < 1) continue;
      if (!std::isfinite(p.lo) || !std::isfinite(p.hi)) {
        bound = kInf;
        break;
      }
      constexpr int kSamples = 512;
      for (int k = 0; k <= kSamples; ++k) {
        const double x = p.lo + (p.hi - p.lo) * k / kSamples;
        bound = std::max(bound, std::abs(p.slope(x)));
      }
    }
    lipschitz_bound_ = bound;
  }
}

void Template::validate() {
  auto invalid = [this](const std::string& why) {
    throw Error(ErrorCode::kInvalidTemplate, "template '" + name_ + "': " + why);
  };
  if (pieces_.empty()) invalid("no pieces");
  if (!(holder_alpha_ > 0.0 && holder_alpha_ <= 1.0)) {
    invalid("Hölder exponent must lie in (0, 1]");
  }
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& p = pieces_[k];
    if (!(p.lo < p.hi)) invalid("piece with empty interval");
    if (p.coefficients.empty()) invalid("piece without coefficients");
    for (double c : p.coefficients) {
      if (!std::isfinite(c)) invalid("non-finite coefficient");
    }
    if ((!std::isfinite(p.lo) || !std::isfinite(p.hi)) && p.degree() > 0) {
      invalid("unbounded pieces must be constant");
    }
    if (k > 0 && pieces_[k - 1].hi > p.lo) invalid("overlapping pieces");
    if (periodic_ && (p.lo < 0.0 || p.hi > 1.0)) {
      invalid("periodic pieces must lie in [0, 1]");
    }
  }

  if (periodic_) {
    support_ = {-kInf, kInf};
  } else {
    support_ = {pieces_.front().lo, pieces_.back().hi};
  }

  // Declared jumps must agree with the pieces at every boundary.
  std::map<double, double> actual;
  for (const auto& p : pieces_) {
    for (double b : {p.lo, p.hi}) {
      if (!std::isfinite(b)) continue;
      const double at = reduce(b);
      const double jump = eval(at) - left_limit(at);
      if (std::abs(jump) > kJumpTolerance) actual[at] = jump;
    }
  }
  for (auto& d : discontinuities_) {
    d.location = reduce(d.location);
    auto it = actual.find(d.location);
    if (it == actual.end()) {
      invalid("declared discontinuity at " + detail::format_double(d.location) +
              " is not a jump of the pieces");
    }
    if (std::abs(it->second - d.jump) > kJumpTolerance) {
      invalid("declared jump at " + detail::format_double(d.location) +
              " disagrees with the pieces");
    }
  }
  if (actual.size() != discontinuities_.size()) {
    invalid("every jump of the pieces must be declared as a discontinuity");
  }
  std::sort(discontinuities_.begin(), discontinuities_.end(),
            [](const Discontinuity& a, const Discontinuity& b) {
              return a.location < b.location;
            });
  if (!discontinuities_.empty() && smoothness_ == Smoothness::kLipschitz) {
    invalid("a Lipschitz template cannot have discontinuities");
  }
}

double Template::reduce(double x) const noexcept {
  if (!periodic_) return x;
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

const Piece* Template::piece_at(double x) const noexcept {
  for (const auto& p : pieces_) {
    if (x < p.lo) return nullptr;
    if (x < p.hi) return &p;
  }
  return nullptr;
}

const Piece* Template::piece_left_of(double x) const noexcept {
  for (const auto& p : pieces_) {
    if (x <= p.lo) return nullptr;
    if (x <= p.hi) return &p;
  }
  return nullptr;
}

double Template::eval(double x) const noexcept {
  const Piece* p = piece_at(reduce(x));
  return p ? p->value(reduce(x)) : 0.0;
}

double Template::left_limit(double x) const noexcept {
  double r = x;
  if (periodic_) {
    // Reduce into (0, 1] so that the limit from the left at 0 wraps to 1.
    r = x - std::ceil(x) + 1.0;
    if (r <= 0.0) r = 1.0;
  }
  const Piece* p = piece_left_of(r);
  if (!p) return 0.0;
  return p->value(r);
}

double Template::derivative(double x) const noexcept {
  const double r = reduce(x);
  const Piece* p = piece_at(r);
  return p ? p->slope(r) : 0.0;
}

bool Template::piecewise_constant() const noexcept {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const Piece& p) { return p.degree() == 0; });
}

std::vector<double> Template::knots() const {
  std::vector<double> out;
  for (const auto& p : pieces_) {
    if (std::isfinite(p.lo)) out.push_back(p.lo);
    if (std::isfinite(p.hi)) out.push_back(p.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Template Template::as_periodic() const {
  if (periodic_) return *this;
  return Template("periodic:" + name_, pieces_, discontinuities_, smoothness_,
                  holder_alpha_, true, lipschitz_bound_);
}

Template Template::from_json(const nlohmann::json& doc) {
  try {
    std::vector<Piece> pieces;
    for (const auto& jp : doc.at("pieces")) {
      const auto& iv = jp.at("interval");
      if (!iv.is_array() || iv.size() != 2) {
        throw Error(ErrorCode::kParseError, "piece interval must be [lo, hi]");
      }
      Piece p;
      p.lo = json_number(iv[0]);
      p.hi = json_number(iv[1]);
      p.coefficients = jp.at("coefficients").get<std::vector<double>>();
      p.center = jp.value("center", 0.0);
      pieces.push_back(std::move(p));
    }
    std::vector<Discontinuity> disc;
    if (doc.contains("discontinuities")) {
      for (const auto& jd : doc.at("discontinuities")) {
        disc.push_back({jd.at("location").get<double>(),
                        jd.at("jump").get<double>()});
      }
    }
    const Smoothness smooth =
        doc.contains("smoothness")
            ? parse_smoothness(doc.at("smoothness").get<std::string>())
            : (disc.empty() ? Smoothness::kLipschitz
                            : Smoothness::kPiecewiseLipschitz);
    std::optional<double> bound;
    if (doc.contains("lipschitz_bound")) {
      bound = doc.at("lipschitz_bound").get<double>();
    }
    return Template(doc.value("name", std::string("custom")), std::move(pieces),
                    std::move(disc), smooth, doc.value("holder_alpha", 1.0),
                    doc.value("periodic", false), bound);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("bad template JSON: ") + e.what());
  }
}

Template Template::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                path.string() + ": " + std::string(e.what()));
  }
  return from_json(doc);
}

Template builtin_template(std::string_view name) {
  auto [head, arg] = detail::split_head(name);
  if (head == "periodic" && !arg.empty()) {
    return builtin_template(arg).as_periodic();
  }
  if (head == "stump") {
    return stump(arg.empty() ? 1.0 : detail::parse_double(arg, name));
  }
  if (arg.empty()) {
    if (name == "A") return template_a();
    if (name == "B") return template_b();
    if (name == "C") return template_c();
    if (name == "D") return template_d();
    if (name == "E") return template_e();
  }
  throw Error(ErrorCode::kUnknownTemplate,
              "unknown template '" + std::string(name) + "'");
}

Template template_from_spec(std::string_view spec) {
  auto [head, arg] = detail::split_head(spec);
  if (head == "json") return Template::load_json(std::string(arg));
  return builtin_template(spec);
}

std::string_view to_string(Smoothness s) {
  switch (s) {
    case Smoothness::kLipschitz: return "lipschitz";
    case Smoothness::kPiecewiseLipschitz: return "piecewise_lipschitz";
    case Smoothness::kHolder: return "holder";
  }
  return "unknown";
}

}  // namespace tmatch
