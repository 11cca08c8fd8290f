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

#include "semgap/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "semgap/error.hpp"

namespace semgap {
namespace {

class CameraFrontEnd final : public DetectorFrontEnd {
 public:
  std::vector<Measurement> process(const Detection& frame) override {
    if (!frame.present) return {};
    return {Measurement{frame.pixels, frame.confidence, MeasurementSource::kVision}};
  }
};

// Stub that never reports the sign.
class ConstantMissFrontEnd final : public DetectorFrontEnd {
 public:
  std::vector<Measurement> process(const Detection&) override { return {}; }
};

class KalmanTrackerStage final : public TrackerStage {
 public:
  explicit KalmanTrackerStage(const TrackerParams& p) : tracker_(p) {}
  void update(std::span<const Measurement> m, double dt) override { tracker_.update(m, dt); }
  const Tracker& tracker() const override { return tracker_; }

 private:
  Tracker tracker_;
};

class StopSignPlanner final : public PlannerStage {
 public:
  explicit StopSignPlanner(const PipelineConfig& c) : config_(c) {}
  PlanDecision plan(const FusedSignEstimate& est, const FrameContext& ctx,
                    const PlanDecision& prev) override {
    return semgap::plan(est, ctx.speed, prev, ctx.t, ctx.desired_speed, config_);
  }

 private:
  PipelineConfig config_;
};

// Ignores every sign and holds the desired speed.
class AlwaysCruisePlanner final : public PlannerStage {
 public:
  PlanDecision plan(const FusedSignEstimate&, const FrameContext& ctx,
                    const PlanDecision&) override {
    PlanDecision d;
    d.time = ctx.t;
    d.target_speed = ctx.desired_speed;
    return d;
  }
};

class StanleyPidController final : public ControllerStage {
 public:
  explicit StanleyPidController(const PipelineConfig& c) : config_(c) {}

  ControlCommand control(const PlanDecision& plan, const GpsPose& gps, double speed, double now,
                         double dt) override {
    ControlCommand cmd;
    cmd.steering = stanley_steer(0.0 - gps.lateral, 0.0 - gps.heading, speed, config_);
    auto r = pid_accel(speed_reference(plan, now), speed, state_, dt, config_, plan.target_accel);
    state_ = r.state;
    cmd.accel = r.accel;
    return cmd;
  }

 private:
  PipelineConfig config_;
  ControllerState state_;
};

[[noreturn]] void unknown_replacement(std::string_view stage, std::string_view name) {
  std::string known;
  for (const auto& n : replacement_names(stage)) known += (known.empty() ? "" : ", ") + n;
  fail(ErrorCode::kNotFound, "unknown replacement '" + std::string(name) + "' for stage '" +
                                 std::string(stage) + "' (known: " + known + ")");
}

}  // namespace

std::vector<std::string> stage_names() {
  return {std::string(kStageDetector), std::string(kStageTracker), std::string(kStagePlanner),
          std::string(kStageController)};
}

std::vector<std::string> replacement_names(std::string_view stage) {
  if (stage == kStageDetector) return {"default", "constant-miss"};
  if (stage == kStageTracker) return {"default"};
  if (stage == kStagePlanner) return {"default", "always-cruise"};
  if (stage == kStageController) return {"default"};
  std::string known;
  for (const auto& n : stage_names()) known += (known.empty() ? "" : ", ") + n;
  fail(ErrorCode::kNotFound,
       "unknown pipeline stage '" + std::string(stage) + "' (known: " + known + ")");
}

std::unique_ptr<DetectorFrontEnd> make_detector(std::string_view name) {
  if (name == "default") return std::make_unique<CameraFrontEnd>();
  if (name == "constant-miss") return std::make_unique<ConstantMissFrontEnd>();
  unknown_replacement(kStageDetector, name);
}

std::unique_ptr<TrackerStage> make_tracker(std::string_view name, const TrackerParams& params) {
  if (name == "default") return std::make_unique<KalmanTrackerStage>(params);
  unknown_replacement(kStageTracker, name);
}

std::unique_ptr<PlannerStage> make_planner(std::string_view name, const PipelineConfig& config) {
  if (name == "default") return std::make_unique<StopSignPlanner>(config);
  if (name == "always-cruise") return std::make_unique<AlwaysCruisePlanner>();
  unknown_replacement(kStagePlanner, name);
}

std::unique_ptr<ControllerStage> make_controller(std::string_view name,
                                                 const PipelineConfig& config) {
  if (name == "default") return std::make_unique<StanleyPidController>(config);
  unknown_replacement(kStageController, name);
}

ConsistencyChecker::ConsistencyChecker(int window, int min_hits)
    : window_(window), min_hits_(min_hits) {}

bool ConsistencyChecker::observe(bool map_in_range, bool vision_hit) {
  if (!map_in_range) {
    history_.clear();
    return false;
  }
  history_.push_back(vision_hit);
  if (static_cast<int>(history_.size()) > window_) history_.erase(history_.begin());
  if (static_cast<int>(history_.size()) < window_) return false;
  const int hits = static_cast<int>(std::count(history_.begin(), history_.end(), true));
  if (hits < min_hits_) {
    ++alarms_;
    return true;
  }
  return false;
}

}  // namespace semgap
