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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semgap {

inline constexpr double kMetersPerSecondPerMph = 0.44704;

constexpr double mph_to_mps(double mph) { return mph * kMetersPerSecondPerMph; }
constexpr double mps_to_mph(double mps) { return mps / kMetersPerSecondPerMph; }

enum class PipelineVariant { kMap, kPinhole, kFusion };

std::string_view to_string(PipelineVariant v);
PipelineVariant parse_pipeline_variant(std::string_view s);

// How the attacker reaches the AD stack: a patched object in the scene, a
// hook on a bridge channel, or a replaced pipeline stage.
struct AttackSpec {
  enum class Kind { kNone, kPhysicalPatch, kSensorHook, kCyberSwap };

  Kind kind = Kind::kNone;
  std::string profile;                   // kPhysicalPatch
  std::string hook;                      // kSensorHook
  std::map<std::string, double> params;  // kSensorHook
  std::string component;                 // kCyberSwap
  std::string replacement;               // kCyberSwap

  // Profile that drives the detection oracle; benign unless a patch is placed.
  std::string detection_profile() const;

  bool operator==(const AttackSpec&) const = default;
};

// Grammar:
//   none
//   physical:<profile>
//   sensor:<hook>[/<param>=<real>]...
//   cyber:<component>=<replacement>
AttackSpec parse_attack(std::string_view text);
std::string render_attack(const AttackSpec& a);

struct PipelineConfig {
  double perception_hz = 20.0;
  double control_hz = 100.0;
  // Empty means "take the attack profile's threshold".
  std::optional<double> detection_threshold;

  int track_create_frames = 4;
  int track_delete_frames = 40;
  bool create_requires_consecutive = true;
  double gate_px = 50.0;
  double measurement_sigma_px = 2.0;
  double process_sigma_px = 1.0;  // white-acceleration noise, px/frame^2

  double decel_limit = 3.4;
  double accel_limit = 2.0;
  double max_steer = 0.5;
  double wheelbase = 2.7;
  double brake_margin = 1.2;
  double stop_zone = 3.0;
  double stop_speed_eps = 0.1;
  double post_stop_hold = 1.0;

  double stanley_k = 1.0;
  double stanley_v_floor = 0.5;
  double pid_kp = 1.0;
  double pid_ki = 0.1;
  double pid_kd = 0.0;
  double pid_integral_limit = 2.0;

  double sign_height = 0.75;
  double focal_length = 1000.0;
  double max_range = 60.0;

  // Run termination.
  double overrun = 5.0;
  double max_time = 120.0;

  int ticks_per_frame() const;
  double control_dt() const { return 1.0 / control_hz; }
  double perception_dt() const { return 1.0 / perception_hz; }

  // Throws kInvalidArgument when the scheduling or limits are inconsistent.
  void validate() const;

  bool operator==(const PipelineConfig&) const = default;
};

struct Scenario {
  double road_length = 120.0;
  double stop_line_offset = 0.0;
  double desired_speed = 0.0;
  PipelineVariant pipeline = PipelineVariant::kMap;
  AttackSpec attack;
  std::string condition = "noon-sunny";
  std::uint64_t seed = 1;
  int runs = 1;
  std::string defense;  // empty, or "consistency-checker"
  PipelineConfig config;

  bool operator==(const Scenario&) const = default;
};

// Parses a scenario file ([scenario] and optional [pipeline] sections).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string render_scenario(const Scenario& s);

// Checks the invariants that need no profile lookup (speed, stopping room,
// runs). Condition/profile consistency is checked by the profile registry.
void validate_scenario(const Scenario& s);

struct MatrixBlock {
  std::string name;
  std::vector<double> speeds_mph;
  std::vector<std::string> lighting;
  std::vector<std::string> weather;
  std::vector<std::string> attacks;
  std::vector<PipelineVariant> pipelines;

  std::size_t size() const {
    return speeds_mph.size() * lighting.size() * weather.size() * attacks.size() *
           pipelines.size();
  }
};

// A union of Cartesian blocks sharing one base scenario. Combination
// indices run over the blocks in file order.
struct MatrixSpec {
  Scenario base;
  std::vector<MatrixBlock> blocks;
};

MatrixSpec parse_matrix(std::string_view text);
MatrixSpec load_matrix(const std::string& path);

// One Scenario per combination, seeds from combination_seed(base, index).
std::vector<Scenario> expand_matrix(const MatrixSpec& spec);

std::string condition_label(std::string_view lighting, std::string_view weather);

}  // namespace semgap
