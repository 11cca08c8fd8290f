/* Copyright 2026 The semgap Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "semgap/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semgap/config_text.hpp"
#include "semgap/error.hpp"

namespace semgap {

void AttackProfile::validate() const {
  auto bad = [&](const std::string& m) {
    fail(ErrorCode::kInvalidArgument, "profile '" + name + "': " + m);
  };
  if (name.empty()) fail(ErrorCode::kInvalidArgument, "profile without a name");
  if (variants.empty()) bad("no condition variants");
  if (detection_threshold < 0 || detection_threshold > 1) bad("detection_threshold outside [0, 1]");
  std::optional<double> range;
  for (const auto& [cond, bins] : variants) {
    if (bins.empty()) bad("variant '" + cond + "' has no bins");
    double expect = 0.0;
    for (const auto& b : bins) {
      if (b.lo != expect) bad("variant '" + cond + "': bins must be contiguous from 0");
      if (!(b.hi > b.lo)) bad("variant '" + cond + "': empty bin");
      if (b.miss_prob < 0 || b.miss_prob > 1) bad("variant '" + cond + "': miss_prob outside [0, 1]");
      if (b.conf_mean < 0 || b.conf_mean > 1 || b.conf_spread < 0 || b.conf_spread > 1) {
        bad("variant '" + cond + "': confidence model outside [0, 1]");
      }
      expect = b.hi;
    }
    if (range && *range != expect) bad("variants disagree on the detection range");
    range = expect;
  }
}

bool AttackProfile::has_condition(std::string_view condition) const {
  return variants.find(std::string(condition)) != variants.end();
}

const std::vector<DistanceBin>& AttackProfile::bins(std::string_view condition) const {
  auto it = variants.find(std::string(condition));
  if (it == variants.end()) {
    fail(ErrorCode::kNotFound,
         "profile '" + name + "' has no condition variant '" + std::string(condition) + "'");
  }
  return it->second;
}

double AttackProfile::max_range() const {
  return variants.empty() ? 0.0 : variants.begin()->second.back().hi;
}

const DistanceBin* AttackProfile::find_bin(std::string_view condition, double d) const {
  const auto& b = bins(condition);
  if (!(d >= 0)) return nullptr;
  auto it = std::upper_bound(b.begin(), b.end(), d,
                             [](double x, const DistanceBin& bin) { return x < bin.hi; });
  return it == b.end() ? nullptr : &*it;
}

std::optional<PixelObservation> project_sign(const VehicleState& state,
                                             const WorldGeometry& geometry,
                                             const PipelineConfig& config) {
  const double d = geometry.sign_s - state.s;
  if (!(d > 0) || d >= config.max_range) return std::nullopt;
  const double dy = geometry.sign_lateral - state.lateral;
  const double c = std::cos(state.heading);
  const double s = std::sin(state.heading);
  const double forward = d * c + dy * s;
  const double left = -d * s + dy * c;
  if (!(forward > 0)) return std::nullopt;
  PixelObservation px;
  px.u = kImageCenterU - config.focal_length * left / forward;
  px.v = kImageCenterV - config.focal_length * geometry.sign_elevation / forward;
  px.h = config.focal_length * config.sign_height / d;
  return px;
}

Detection sample_detection(const AttackProfile& profile, std::string_view condition, double d,
                           Rng& rng, const std::optional<PixelObservation>& pixels) {
  const double miss_draw = rng.uniform();
  const double a = rng.uniform();
  const double b = rng.uniform();

  Detection det;
  const DistanceBin* bin = profile.find_bin(condition, d);
  if (bin == nullptr || !(d > 0) || miss_draw < bin->miss_prob) return det;
  det.present = true;
  det.confidence = std::clamp(bin->conf_mean + bin->conf_spread * (a + b - 1.0), 0.0, 1.0);
  if (pixels) det.pixels = *pixels;
  return det;
}

DetectionOracle::DetectionOracle(AttackProfile profile, std::string condition, std::uint64_t seed)
    : profile_(std::move(profile)), condition_(std::move(condition)), rng_(seed) {
  (void)profile_.bins(condition_);
}

Detection DetectionOracle::observe(int frame, const VehicleState& state,
                                   const WorldGeometry& geometry, const PipelineConfig& config) {
  auto pixels = project_sign(state, geometry, config);
  const double d = geometry.sign_s - state.s;
  Detection det = sample_detection(profile_, condition_, d, rng_, pixels);
  if (!pixels) det = Detection{};
  det.frame = frame;
  return det;
}

const std::vector<std::string>& builtin_lighting() {
  static const std::vector<std::string> v{"sunrise", "noon", "sunset"};
  return v;
}

const std::vector<std::string>& builtin_weather() {
  static const std::vector<std::string> v{"sunny", "cloudy", "rainy"};
  return v;
}

namespace {

struct Row {
  double hi;
  double miss;
  double conf_mean;
  double conf_spread;
};

// Condition shifts apply only to bins starting at or beyond `shift_from`;
// the close-range bins that decide the closed-loop outcome stay fixed.
AttackProfile make_profile(std::string name, double threshold, const std::vector<Row>& rows,
                           double shift_from, const std::map<std::string, double>& light_shift,
                           const std::map<std::string, double>& weather_shift) {
  AttackProfile p;
  p.name = std::move(name);
  p.detection_threshold = threshold;
  for (const auto& light : builtin_lighting()) {
    for (const auto& weather : builtin_weather()) {
      double shift = 0.0;
      if (auto it = light_shift.find(light); it != light_shift.end()) shift += it->second;
      if (auto it = weather_shift.find(weather); it != weather_shift.end()) shift += it->second;
      std::vector<DistanceBin> bins;
      double lo = 0.0;
      for (const auto& r : rows) {
        double miss = r.miss;
        if (lo >= shift_from) {
          // Rounded so exported profiles read as the intended decimals.
          miss = std::round(std::clamp(miss + shift, 0.0, 1.0) * 1e6) / 1e6;
        }
        bins.push_back({lo, r.hi, miss, r.conf_mean, r.conf_spread});
        lo = r.hi;
      }
      p.variants[condition_label(light, weather)] = std::move(bins);
    }
  }
  return p;
}

}  // namespace

// Calibrated against the closed-loop outcomes (see tools/semgap_calibrate).
// Each attack ends in a certain-miss bucket next to the stop line, preceded
// by a short bucket where the patch fails; the width of the certain-miss
// bucket is what separates a deleted track from one that survives until
// the vehicle has stopped.
std::map<std::string, AttackProfile> load_builtin_profiles() {
  std::map<std::string, AttackProfile> out;

  out["none"] = make_profile("none", 0.4, {{60.0, 0.0, 0.9, 0.05}}, 0.0, {}, {});

  out["ss-like"] = make_profile("ss-like", 0.3,
                                {{7.4, 1.0, 0.8, 0.1},
                                 {9.4, 0.0, 0.8, 0.1},
                                 {10.0, 0.9, 0.7, 0.2},
                                 {20.0, 0.6, 0.7, 0.2},
                                 {30.0, 0.4, 0.65, 0.25},
                                 {45.0, 0.25, 0.6, 0.3},
                                 {60.0, 0.2, 0.55, 0.3}},
                                10.0, {{"sunrise", -0.04}, {"sunset", 0.0}},
                                {{"cloudy", 0.01}, {"rainy", -0.02}});

  out["rp2-like"] = make_profile("rp2-like", 0.4,
                                 {{3.5, 1.0, 0.8, 0.1},
                                  {4.5, 0.0, 0.8, 0.1},
                                  {10.0, 0.45, 0.7, 0.2},
                                  {20.0, 0.3, 0.7, 0.2},
                                  {30.0, 0.35, 0.7, 0.2},
                                  {60.0, 0.3, 0.7, 0.2}},
                                 10.0, {{"sunrise", 0.05}, {"sunset", 0.04}},
                                 {{"cloudy", -0.05}, {"rainy", 0.03}});

  // Modeled attack: 94% at 5 m falling to 32% at 25 m, identical under all
  // conditions because the detector output is sampled, not rendered.
  out["sib"] = make_profile("sib", 0.4,
                            {{3.5, 1.0, 0.8, 0.1},
                             {5.0, 0.0, 0.8, 0.1},
                             {10.0, 0.86, 0.7, 0.2},
                             {15.0, 0.71, 0.7, 0.2},
                             {20.0, 0.55, 0.7, 0.2},
                             {25.0, 0.40, 0.7, 0.2},
                             {30.0, 0.32, 0.7, 0.2},
                             {60.0, 0.25, 0.7, 0.2}},
                            0.0, {}, {});
  return out;
}

std::string render_profile(const AttackProfile& p) {
  std::ostringstream out;
  out << "[profile]\n";
  out << "name = " << config::quote(p.name) << "\n";
  out << "detection_threshold = " << config::format_real(p.detection_threshold) << "\n";
  auto list = [&](const char* key, const std::vector<DistanceBin>& bins, double DistanceBin::*m) {
    out << key << " = [";
    for (size_t i = 0; i < bins.size(); ++i) {
      out << (i ? ", " : "") << config::format_real(bins[i].*m);
    }
    out << "]\n";
  };
  for (const auto& [cond, bins] : p.variants) {
    out << "\n[variant." << cond << "]\n";
    list("lo", bins, &DistanceBin::lo);
    list("hi", bins, &DistanceBin::hi);
    list("miss_prob", bins, &DistanceBin::miss_prob);
    list("conf_mean", bins, &DistanceBin::conf_mean);
    list("conf_spread", bins, &DistanceBin::conf_spread);
  }
  return out.str();
}

AttackProfile parse_profile(std::string_view text) {
  auto doc = config::parse(text);
  const auto* head = doc.find("profile");
  if (head == nullptr) fail(ErrorCode::kParse, "missing section: [profile]");
  AttackProfile p;
  p.name = head->get_string("name");
  p.detection_threshold = head->get_real("detection_threshold", p.detection_threshold);
  for (const auto* sec : doc.with_prefix("variant")) {
    if (sec->name.size() <= 8) fail(ErrorCode::kParse, "variant section needs a condition name");
    std::string cond = sec->name.substr(8);
    auto lo = sec->get_reals("lo");
    auto hi = sec->get_reals("hi");
    auto miss = sec->get_reals("miss_prob");
    auto mean = sec->get_reals("conf_mean");
    auto spread = sec->get_reals("conf_spread");
    const size_t n = lo.size();
    if (hi.size() != n || miss.size() != n || mean.size() != n || spread.size() != n) {
      fail(ErrorCode::kParse, "variant '" + cond + "': bin lists differ in length");
    }
    std::vector<DistanceBin> bins;
    for (size_t i = 0; i < n; ++i) bins.push_back({lo[i], hi[i], miss[i], mean[i], spread[i]});
    p.variants[cond] = std::move(bins);
  }
  p.validate();
  return p;
}

AttackProfile load_profile_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_profile(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

ProfileRegistry::ProfileRegistry() {
  for (auto& [name, p] : load_builtin_profiles()) profiles_.emplace(name, std::move(p));
}

void ProfileRegistry::add(AttackProfile profile) {
  profile.validate();
  std::string name = profile.name;
  profiles_.insert_or_assign(std::move(name), std::move(profile));
}

const AttackProfile& ProfileRegistry::get(std::string_view name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) {
    std::string known;
    for (const auto& [n, _] : profiles_) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorCode::kNotFound, "unknown attack profile '" + std::string(name) + "' (known: " + known + ")");
  }
  return it->second;
}

bool ProfileRegistry::contains(std::string_view name) const {
  return profiles_.find(name) != profiles_.end();
}

std::vector<std::string> ProfileRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, _] : profiles_) out.push_back(n);
  return out;
}

void ProfileRegistry::load_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::kIo, "not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".profile") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) add(load_profile_file(f.string()));
}

}  // namespace semgap
