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

#include "semgap/planner.hpp"

#include <algorithm>
#include <cmath>

namespace semgap {

double braking_distance(double v, const PipelineConfig& config) {
  return v * v / (2.0 * config.decel_limit) + config.brake_margin;
}

PlanDecision plan(const FusedSignEstimate& estimate, double speed, const PlanDecision& prev,
                  double now, double desired_speed, const PipelineConfig& config) {
  PlanDecision d;
  d.time = now;
  d.stop_fulfilled = prev.stop_fulfilled;
  d.fulfilled_time = prev.fulfilled_time;

  if (!d.stop_fulfilled && speed <= config.stop_speed_eps && estimate.tracked &&
      estimate.distance && *estimate.distance <= config.stop_zone) {
    d.stop_fulfilled = true;
    d.fulfilled_time = now;
  }

  if (d.stop_fulfilled) {
    if (now - d.fulfilled_time < config.post_stop_hold) {
      d.target_speed = 0.0;
      d.target_accel = -config.decel_limit;
    } else {
      d.target_speed = desired_speed;
      d.target_accel = std::clamp(desired_speed - speed, 0.0, config.accel_limit);
    }
    return d;
  }

  const bool within = estimate.tracked && estimate.distance &&
                      *estimate.distance <= braking_distance(speed, config);
  if (estimate.tracked && (within || prev.stop_commitment)) {
    d.stop_commitment = true;
    d.target_speed = speed;
    d.target_accel = -config.decel_limit;
    return d;
  }

  d.target_speed = desired_speed;
  if (!estimate.tracked && speed < desired_speed) {
    d.target_accel = std::clamp(desired_speed - speed, 0.0, config.accel_limit);
  }
  return d;
}

double stanley_steer(double cross_error, double heading_error, double v,
                     const PipelineConfig& config) {
  const double speed = std::max(v, config.stanley_v_floor);
  const double steer = heading_error + std::atan(config.stanley_k * cross_error / speed);
  return std::clamp(steer, -config.max_steer, config.max_steer);
}

PidResult pid_accel(double target_speed, double speed, const ControllerState& state, double dt,
                    const PipelineConfig& config, double feedforward) {
  const double error = target_speed - speed;
  const double derivative = state.has_prev ? (error - state.prev_error) / dt : 0.0;

  const double candidate =
      std::clamp(state.integral + error * dt, -config.pid_integral_limit, config.pid_integral_limit);
  const double raw = feedforward + config.pid_kp * error + config.pid_ki * candidate +
                     config.pid_kd * derivative;
  const double out = std::clamp(raw, -config.decel_limit, config.accel_limit);

  PidResult r;
  r.accel = out;
  r.state.prev_error = error;
  r.state.has_prev = true;
  // Conditional integration: freeze the integral while saturated.
  r.state.integral = raw == out ? candidate : state.integral;
  return r;
}

double speed_reference(const PlanDecision& plan, double now) {
  if (plan.target_accel < 0) {
    return std::max(0.0, plan.target_speed + plan.target_accel * (now - plan.time));
  }
  return plan.target_speed;
}

}  // namespace semgap
