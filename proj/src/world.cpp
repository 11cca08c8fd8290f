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

#include "semgap/world.hpp"

#include <algorithm>
#include <cmath>

#include "semgap/error.hpp"

namespace semgap {

WorldGeometry WorldGeometry::from(const Scenario& s) {
  WorldGeometry g;
  g.stop_line_s = s.road_length;
  g.sign_s = s.road_length - s.stop_line_offset;
  return g;
}

double WorldGeometry::sign_distance(const VehicleState& v) const {
  return std::max(sign_s - v.s, 0.0);
}

ControlCommand clamp_command(const ControlCommand& cmd, const VehicleLimits& limits) {
  return {std::clamp(cmd.steering, -limits.max_steer, limits.max_steer),
          std::clamp(cmd.accel, -limits.decel_limit, limits.accel_limit)};
}

VehicleState step_vehicle(const VehicleState& state, const ControlCommand& cmd, double dt,
                          const VehicleLimits& limits) {
  const bool finite = std::isfinite(state.s) && std::isfinite(state.lateral) &&
                      std::isfinite(state.heading) && std::isfinite(state.speed) &&
                      std::isfinite(cmd.steering) && std::isfinite(cmd.accel) && std::isfinite(dt);
  if (!finite) fail(ErrorCode::kNumeric, "step_vehicle: non-finite input");
  if (!(dt > 0)) fail(ErrorCode::kNumeric, "step_vehicle: dt must be positive");

  const ControlCommand u = clamp_command(cmd, limits);
  VehicleState next;
  next.speed = std::max(0.0, state.speed + u.accel * dt);
  next.s = state.s + state.speed * std::cos(state.heading) * dt;
  next.lateral = state.lateral + state.speed * std::sin(state.heading) * dt;
  next.heading = state.heading + state.speed / limits.wheelbase * std::tan(u.steering) * dt;
  return next;
}

double distance_to_stop_line(const VehicleState& state, const WorldGeometry& geometry) {
  return geometry.stop_line_s - state.s;
}

}  // namespace semgap
