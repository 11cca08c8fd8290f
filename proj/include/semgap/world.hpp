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

#include "semgap/scenario.hpp"

namespace semgap {

// Ego pose on a straight road. `s` grows along the travel direction from
// the start point; lateral is positive to the left of the lane center.
struct VehicleState {
  double s = 0.0;
  double lateral = 0.0;
  double heading = 0.0;
  double speed = 0.0;

  bool operator==(const VehicleState&) const = default;
};

struct ControlCommand {
  double steering = 0.0;  // rad, positive turns left
  double accel = 0.0;     // m/s^2

  bool operator==(const ControlCommand&) const = default;
};

struct VehicleLimits {
  double wheelbase = 2.7;
  double max_steer = 0.5;
  double accel_limit = 2.0;
  double decel_limit = 3.4;

  static VehicleLimits from(const PipelineConfig& cfg) {
    return {cfg.wheelbase, cfg.max_steer, cfg.accel_limit, cfg.decel_limit};
  }
};

struct WorldGeometry {
  double stop_line_s = 0.0;
  double sign_s = 0.0;
  double lane_center = 0.0;
  // Sign face center relative to the camera: right of the lane, above the
  // lens.
  double sign_lateral = -2.5;
  double sign_elevation = 0.8;

  static WorldGeometry from(const Scenario& s);

  double sign_distance(const VehicleState& v) const;
};

// Clamps the command to the actuator limits. Exposed so controllers and
// logs agree on what was actually applied.
ControlCommand clamp_command(const ControlCommand& cmd, const VehicleLimits& limits);

// One explicit-Euler step of the kinematic bicycle. Throws kNumeric on
// non-finite input or dt <= 0.
VehicleState step_vehicle(const VehicleState& state, const ControlCommand& cmd, double dt,
                          const VehicleLimits& limits);

double distance_to_stop_line(const VehicleState& state, const WorldGeometry& geometry);

}  // namespace semgap
