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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semgap/bridge.hpp"
#include "semgap/metrics.hpp"
#include "semgap/pipeline.hpp"
#include "semgap/scenario.hpp"
#include "semgap/sensing.hpp"

namespace semgap {

// Everything the pipeline saw and decided on one perception frame.
struct FrameRecord {
  int frame = 0;
  double t = 0.0;
  VehicleState state;
  ControlCommand command;
  double sign_distance = 0.0;  // ground truth
  double line_distance = 0.0;  // ground truth
  bool in_range = false;
  bool detected = false;  // present and at or above the detection threshold
  double confidence = 0.0;
  std::optional<double> distance_estimate;
  bool tracked = false;
  std::optional<TrackStatus> track_status;  // best active track, if any
  bool stop_commitment = false;
  bool stop_fulfilled = false;
  bool alarm = false;
};

struct RunReport {
  Scenario scenario;
  int run_index = 0;
  std::uint64_t seed = 0;
  double detection_threshold = 0.0;
  std::vector<FrameRecord> frames;
  std::vector<TrajectoryRow> trajectory;  // one row per control tick
  ComponentMetrics component;
  SystemMetrics system;
  int alarms = 0;
  std::optional<int> first_alarm_frame;
  bool complete = false;
  std::vector<std::string> warnings;
  double wall_time_ms = 0.0;

  RunOutcome outcome() const { return {component, system, alarms}; }
};

// One closed-loop episode. Attacks and defenses are registered before
// run(); run() may be called once.
class Simulation {
 public:
  Simulation(Scenario scenario, std::uint64_t seed, const ProfileRegistry& profiles);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  Bridge& bridge() { return bridge_; }

  // Places a patch: the oracle samples from `profile`. A second call
  // replaces the first and records a warning.
  void register_physical_attack(std::string_view profile);

  template <Channel C>
  void register_sensor_attack(Hook<C> hook) {
    bridge_.add_hook<C>(std::move(hook));
  }

  // Replaces one pipeline stage. Throws kNotFound for unknown stages or
  // replacements.
  void swap_component(std::string_view stage, std::string_view replacement);

  // Only "consistency-checker" exists; it needs an HD map, so it is
  // rejected for the Pinhole variant.
  void register_defense(std::string_view name);

  // Applies the scenario's own attack spec and defense.
  void apply_scenario_attack();

  RunReport run();

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Scenario scenario_;
  std::uint64_t seed_;
  const ProfileRegistry& profiles_;
  Bridge bridge_;
  std::string profile_name_ = "none";
  bool physical_set_ = false;
  std::string detector_ = "default";
  std::string tracker_ = "default";
  std::string planner_ = "default";
  std::string controller_ = "default";
  bool defense_ = false;
  bool ran_ = false;
  std::vector<std::string> warnings_;
};

// Seed of run `run_index` of a scenario.
std::uint64_t scenario_run_seed(const Scenario& s, int run_index);

// Builds a Simulation from the scenario (attack and defense included) and
// runs it.
RunReport run_closed_loop(const Scenario& scenario, int run_index,
                          const ProfileRegistry& profiles);

}  // namespace semgap
