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
#include "semgap/tracker.hpp"
#include "semgap/world.hpp"

namespace semgap {

struct PlanDecision {
  double target_speed = 0.0;
  double target_accel = 0.0;
  bool stop_commitment = false;
  bool stop_fulfilled = false;
  double fulfilled_time = 0.0;
  double time = 0.0;  // when the decision was made

  bool operator==(const PlanDecision&) const = default;
};

// v^2 / (2 * decel_limit) + brake_margin.
double braking_distance(double v, const PipelineConfig& config);

// Lane-following STOP-sign planner, called once per perception frame.
//
// Priority: a latched stop holds for post_stop_hold then cruises; a tracked
// sign within braking distance (or an existing commitment while the sign is
// still tracked) brakes at -decel_limit; otherwise the planner returns to
// the desired speed.
PlanDecision plan(const FusedSignEstimate& estimate, double speed, const PlanDecision& prev,
                  double now, double desired_speed, const PipelineConfig& config);

// Stanley lateral law: heading_error + atan(k * cross_error / max(v, v_floor)),
// clamped to +-max_steer. Errors are path minus vehicle.
double stanley_steer(double cross_error, double heading_error, double v,
                     const PipelineConfig& config);

struct ControllerState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;

  bool operator==(const ControllerState&) const = default;
};

struct PidResult {
  double accel = 0.0;
  ControllerState state;
};

// PID on speed error plus optional feedforward, clamped to
// [-decel_limit, accel_limit]. The integral only accumulates while the
// output is unsaturated and stays within +-pid_integral_limit.
PidResult pid_accel(double target_speed, double speed, const ControllerState& state, double dt,
                    const PipelineConfig& config, double feedforward = 0.0);

// Speed reference the longitudinal loop tracks between planner updates.
double speed_reference(const PlanDecision& plan, double now);

}  // namespace semgap
