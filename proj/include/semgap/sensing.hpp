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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semgap/rng.hpp"
#include "semgap/scenario.hpp"
#include "semgap/world.hpp"

namespace semgap {

inline constexpr double kImageCenterU = 960.0;
inline constexpr double kImageCenterV = 540.0;

// Half-open distance bucket [lo, hi) with a per-frame miss probability and
// a confidence model for the frames that are detected.
struct DistanceBin {
  double lo = 0.0;
  double hi = 0.0;
  double miss_prob = 0.0;
  double conf_mean = 0.9;
  double conf_spread = 0.05;

  bool operator==(const DistanceBin&) const = default;
};

struct AttackProfile {
  std::string name;
  double detection_threshold = 0.4;
  std::map<std::string, std::vector<DistanceBin>> variants;

  // Throws kInvalidArgument unless every variant's bins are sorted, disjoint,
  // start at 0 and share one max range.
  void validate() const;

  bool has_condition(std::string_view condition) const;
  const std::vector<DistanceBin>& bins(std::string_view condition) const;
  double max_range() const;

  // Bin containing d, or nullptr when d < 0 or d >= max range.
  const DistanceBin* find_bin(std::string_view condition, double d) const;

  bool operator==(const AttackProfile&) const = default;
};

struct PixelObservation {
  double u = 0.0;
  double v = 0.0;
  double h = 0.0;  // sign height in pixels

  bool operator==(const PixelObservation&) const = default;
};

struct Detection {
  int frame = 0;
  bool present = false;
  double confidence = 0.0;
  PixelObservation pixels;

  bool operator==(const Detection&) const = default;
};

// Forward pinhole model. h = f * H / d with d the along-road distance to the
// sign; u, v come from the sign's offset in the camera frame.
std::optional<PixelObservation> project_sign(const VehicleState& state,
                                             const WorldGeometry& geometry,
                                             const PipelineConfig& config);

// One oracle draw. Always consumes exactly three uniforms from `rng` so the
// stream stays aligned regardless of outcome.
Detection sample_detection(const AttackProfile& profile, std::string_view condition, double d,
                           Rng& rng, const std::optional<PixelObservation>& pixels = {});

// Per-run oracle: owns its generator and the bound profile.
class DetectionOracle {
 public:
  DetectionOracle(AttackProfile profile, std::string condition, std::uint64_t seed);

  Detection observe(int frame, const VehicleState& state, const WorldGeometry& geometry,
                    const PipelineConfig& config);

  const AttackProfile& profile() const { return profile_; }
  const std::string& condition() const { return condition_; }

 private:
  AttackProfile profile_;
  std::string condition_;
  Rng rng_;
};

// Lighting and weather axes of the builtin condition variants.
const std::vector<std::string>& builtin_lighting();
const std::vector<std::string>& builtin_weather();

std::map<std::string, AttackProfile> load_builtin_profiles();

std::string render_profile(const AttackProfile& p);
AttackProfile parse_profile(std::string_view text);
AttackProfile load_profile_file(const std::string& path);

// Builtins plus any *.profile files added at runtime; lookups throw
// kNotFound with the known names listed.
class ProfileRegistry {
 public:
  ProfileRegistry();

  void add(AttackProfile profile);
  const AttackProfile& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  // Loads every *.profile file in `dir` (non-recursive).
  void load_directory(const std::string& dir);

 private:
  std::map<std::string, AttackProfile, std::less<>> profiles_;
};

}  // namespace semgap
