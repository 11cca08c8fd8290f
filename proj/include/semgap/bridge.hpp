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

// In-process message channel between the plant and the AD stack. Every
// payload crossing it goes through the hooks registered on its channel, in
// ascending (order, registration index), before subscribers see it. This is
// where sensor-layer attacks attach.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "semgap/error.hpp"
#include "semgap/planner.hpp"
#include "semgap/sensing.hpp"
#include "semgap/tracker.hpp"
#include "semgap/world.hpp"

namespace semgap {

enum class Channel { kCameraFrame, kGpsPose, kPlanDecision, kControlCmd, kTrajectoryLog };

std::string_view to_string(Channel c);

struct TrajectoryRow {
  double t = 0.0;
  double s = 0.0;
  double lateral = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double accel_cmd = 0.0;
  double steering_cmd = 0.0;

  bool operator==(const TrajectoryRow&) const = default;
};

template <Channel C>
struct ChannelPayload;
template <>
struct ChannelPayload<Channel::kCameraFrame> { using type = Detection; };
template <>
struct ChannelPayload<Channel::kGpsPose> { using type = GpsPose; };
template <>
struct ChannelPayload<Channel::kPlanDecision> { using type = PlanDecision; };
template <>
struct ChannelPayload<Channel::kControlCmd> { using type = ControlCommand; };
template <>
struct ChannelPayload<Channel::kTrajectoryLog> { using type = TrajectoryRow; };

template <Channel C>
using payload_t = typename ChannelPayload<C>::type;

template <Channel C>
struct Hook {
  std::string name;
  int order = 0;
  std::function<payload_t<C>(const payload_t<C>&)> transform;
};

class Bridge {
 public:
  template <Channel C>
  using Subscriber = std::function<void(const payload_t<C>&, std::int64_t tick)>;

  template <Channel C>
  void add_hook(Hook<C> hook) {
    auto& slot = std::get<Slot<C>>(slots_);
    Entry<C> e{std::move(hook), slot.registered++};
    auto pos = std::upper_bound(slot.hooks.begin(), slot.hooks.end(), e,
                                [](const Entry<C>& a, const Entry<C>& b) {
                                  return std::tie(a.hook.order, a.index) <
                                         std::tie(b.hook.order, b.index);
                                });
    slot.hooks.insert(pos, std::move(e));
  }

  template <Channel C>
  void subscribe(Subscriber<C> fn) {
    std::get<Slot<C>>(slots_).subscribers.push_back(std::move(fn));
  }

  // Runs the hooks, delivers to subscribers synchronously and returns the
  // delivered payload. Ticks must not decrease per channel.
  template <Channel C>
  payload_t<C> publish(const payload_t<C>& payload, std::int64_t tick) {
    auto& slot = std::get<Slot<C>>(slots_);
    if (tick < slot.last_tick) {
      fail(ErrorCode::kInvalidArgument,
           "bridge: tick went backwards on channel " + std::string(to_string(C)));
    }
    slot.last_tick = tick;
    payload_t<C> out = payload;
    for (const auto& e : slot.hooks) out = e.hook.transform(out);
    for (const auto& s : slot.subscribers) s(out, tick);
    return out;
  }

  template <Channel C>
  std::vector<std::string> hook_names() const {
    std::vector<std::string> names;
    for (const auto& e : std::get<Slot<C>>(slots_).hooks) names.push_back(e.hook.name);
    return names;
  }

  std::size_t hook_count() const;

 private:
  template <Channel C>
  struct Entry {
    Hook<C> hook;
    std::size_t index = 0;
  };
  template <Channel C>
  struct Slot {
    std::vector<Entry<C>> hooks;
    std::vector<Subscriber<C>> subscribers;
    std::size_t registered = 0;
    std::int64_t last_tick = std::numeric_limits<std::int64_t>::min();
  };

  std::tuple<Slot<Channel::kCameraFrame>, Slot<Channel::kGpsPose>, Slot<Channel::kPlanDecision>,
             Slot<Channel::kControlCmd>, Slot<Channel::kTrajectoryLog>>
      slots_;
};

// Demonstration sensor attack: shifts the reported GPS position forward
// along the road by `offset_m` (positive = vehicle appears closer to the
// intersection).
Hook<Channel::kGpsPose> make_gps_offset_hook(double offset_m, int order = 0);

// Builds the hook for a sensor attack spec ("gps-offset" with parameter
// offset_m). Throws kNotFound for unknown hook names.
Hook<Channel::kGpsPose> make_sensor_hook(const AttackSpec& spec);

}  // namespace semgap
