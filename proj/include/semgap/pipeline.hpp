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

// Swappable stages of the modular AD pipeline. The closed loop talks to
// each stage only through these interfaces, which is what lets a cyber
// attack replace one without touching the rest.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semgap/bridge.hpp"
#include "semgap/planner.hpp"
#include "semgap/tracker.hpp"

namespace semgap {

struct FrameContext {
  int frame = 0;
  double t = 0.0;
  double speed = 0.0;
  double desired_speed = 0.0;
  GpsPose gps;
};

class DetectorFrontEnd {
 public:
  virtual ~DetectorFrontEnd() = default;
  // Camera frame -> measurements handed to the tracker.
  virtual std::vector<Measurement> process(const Detection& frame) = 0;
};

class TrackerStage {
 public:
  virtual ~TrackerStage() = default;
  virtual void update(std::span<const Measurement> measurements, double dt) = 0;
  virtual const Tracker& tracker() const = 0;
};

class PlannerStage {
 public:
  virtual ~PlannerStage() = default;
  virtual PlanDecision plan(const FusedSignEstimate& estimate, const FrameContext& ctx,
                            const PlanDecision& prev) = 0;
};

class ControllerStage {
 public:
  virtual ~ControllerStage() = default;
  virtual ControlCommand control(const PlanDecision& plan, const GpsPose& gps, double speed,
                                 double now, double dt) = 0;
};

// Stage names accepted by swap_component.
inline constexpr std::string_view kStageDetector = "detector-front-end";
inline constexpr std::string_view kStageTracker = "tracker";
inline constexpr std::string_view kStagePlanner = "planner";
inline constexpr std::string_view kStageController = "controller";

std::vector<std::string> stage_names();
// Replacement names available for `stage` ("default" is always one).
std::vector<std::string> replacement_names(std::string_view stage);

std::unique_ptr<DetectorFrontEnd> make_detector(std::string_view name);
std::unique_ptr<TrackerStage> make_tracker(std::string_view name, const TrackerParams& params);
std::unique_ptr<PlannerStage> make_planner(std::string_view name, const PipelineConfig& config);
std::unique_ptr<ControllerStage> make_controller(std::string_view name,
                                                 const PipelineConfig& config);

// Demonstration defense: alarms when the HD map places the sign within
// detection range but vision produced fewer than create_frames hits over the
// last delete_frames in-range frames.
class ConsistencyChecker {
 public:
  ConsistencyChecker(int window, int min_hits);

  // Returns true when this frame raises an alarm.
  bool observe(bool map_in_range, bool vision_hit);

  int alarms() const { return alarms_; }

 private:
  int window_;
  int min_hits_;
  std::vector<bool> history_;
  int alarms_ = 0;
};

}  // namespace semgap
