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

#include "semgap/bridge.hpp"

namespace semgap {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::kCameraFrame: return "CameraFrame";
    case Channel::kGpsPose: return "GpsPose";
    case Channel::kPlanDecision: return "PlanDecision";
    case Channel::kControlCmd: return "ControlCmd";
    case Channel::kTrajectoryLog: return "TrajectoryLog";
  }
  return "?";
}

std::size_t Bridge::hook_count() const {
  return std::apply([](const auto&... slot) { return (slot.hooks.size() + ...); }, slots_);
}

Hook<Channel::kGpsPose> make_gps_offset_hook(double offset_m, int order) {
  return {"gps-offset", order, [offset_m](const GpsPose& p) {
            GpsPose out = p;
            out.s += offset_m;
            return out;
          }};
}

Hook<Channel::kGpsPose> make_sensor_hook(const AttackSpec& spec) {
  if (spec.hook == "gps-offset") {
    auto it = spec.params.find("offset_m");
    double offset = it == spec.params.end() ? 0.0 : it->second;
    auto order = spec.params.find("order");
    return make_gps_offset_hook(offset, order == spec.params.end() ? 0 : static_cast<int>(order->second));
  }
  fail(ErrorCode::kNotFound, "unknown sensor hook '" + spec.hook + "' (known: gps-offset)");
}

}  // namespace semgap
