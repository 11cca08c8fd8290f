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

#include "semgap/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "semgap/error.hpp"
#include "semgap/rng.hpp"

namespace semgap {

Simulation::Simulation(Scenario scenario, std::uint64_t seed, const ProfileRegistry& profiles)
    : scenario_(std::move(scenario)), seed_(seed), profiles_(profiles) {
  validate_scenario(scenario_);
}

Simulation::~Simulation() = default;

void Simulation::register_physical_attack(std::string_view profile) {
  profiles_.get(profile);  // throws for unknown names
  if (physical_set_) {
    warnings_.push_back("physical attack '" + std::string(profile) + "' replaces '" +
                        profile_name_ + "'");
  }
  profile_name_ = std::string(profile);
  physical_set_ = true;
}

void Simulation::swap_component(std::string_view stage, std::string_view replacement) {
  const auto names = replacement_names(stage);
  if (std::find(names.begin(), names.end(), replacement) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorCode::kNotFound, "unknown replacement '" + std::string(replacement) +
                                   "' for stage '" + std::string(stage) + "' (known: " + known +
                                   ")");
  }
  if (stage == kStageDetector) detector_ = replacement;
  if (stage == kStageTracker) tracker_ = replacement;
  if (stage == kStagePlanner) planner_ = replacement;
  if (stage == kStageController) controller_ = replacement;
}

void Simulation::register_defense(std::string_view name) {
  if (name != "consistency-checker") {
    fail(ErrorCode::kNotFound,
         "unknown defense '" + std::string(name) + "' (known: consistency-checker)");
  }
  if (scenario_.pipeline == PipelineVariant::kPinhole) {
    fail(ErrorCode::kInvalidArgument,
         "consistency-checker needs an HD map; the Pinhole pipeline has none");
  }
  defense_ = true;
}

void Simulation::apply_scenario_attack() {
  const AttackSpec& a = scenario_.attack;
  switch (a.kind) {
    case AttackSpec::Kind::kNone: break;
    case AttackSpec::Kind::kPhysicalPatch: register_physical_attack(a.profile); break;
    case AttackSpec::Kind::kSensorHook: register_sensor_attack(make_sensor_hook(a)); break;
    case AttackSpec::Kind::kCyberSwap: swap_component(a.component, a.replacement); break;
  }
  if (!scenario_.defense.empty()) register_defense(scenario_.defense);
}

RunReport Simulation::run() {
  if (ran_) fail(ErrorCode::kInvalidArgument, "a simulation can only run once");
  ran_ = true;
  const auto wall_start = std::chrono::steady_clock::now();

  const PipelineConfig& cfg = scenario_.config;
  cfg.validate();
  const AttackProfile& profile = profiles_.get(profile_name_);
  if (!profile.has_condition(scenario_.condition)) {
    fail(ErrorCode::kInvalidArgument, "profile '" + profile.name + "' has no variant for '" +
                                          scenario_.condition + "'");
  }
  const double threshold = cfg.detection_threshold.value_or(profile.detection_threshold);
  const WorldGeometry geom = WorldGeometry::from(scenario_);
  const VehicleLimits limits = VehicleLimits::from(cfg);

  DetectionOracle oracle(profile, scenario_.condition, seed_);
  auto detector = make_detector(detector_);
  auto tracker = make_tracker(tracker_, TrackerParams::from(cfg, threshold));
  auto planner = make_planner(planner_, cfg);
  auto controller = make_controller(controller_, cfg);
  std::optional<ConsistencyChecker> checker;
  if (defense_) checker.emplace(cfg.track_delete_frames, cfg.track_create_frames);

  RunReport rep;
  rep.scenario = scenario_;
  rep.seed = seed_;
  rep.detection_threshold = threshold;

  VehicleState state{0.0, geom.lane_center, 0.0, scenario_.desired_speed};
  GpsPose gps{state.s, state.lateral, state.heading};
  PlanDecision decision;
  decision.target_speed = scenario_.desired_speed;
  std::vector<FrameSample> samples;

  const int tpf = cfg.ticks_per_frame();
  const double dt = cfg.control_dt();
  const auto max_ticks = static_cast<std::int64_t>(std::ceil(cfg.max_time / dt - 1e-9));
  const double sign_to_line = geom.stop_line_s - geom.sign_s;

  for (std::int64_t tick = 0;; ++tick) {
    if (tick >= max_ticks) {
      rep.complete = false;
      break;
    }
    const double t = static_cast<double>(tick) * dt;
    FrameRecord* record = nullptr;

    if (tick % tpf == 0) {
      const int frame = static_cast<int>(tick / tpf);
      Detection det = oracle.observe(frame, state, geom, cfg);
      det = bridge_.publish<Channel::kCameraFrame>(det, tick);
      gps = bridge_.publish<Channel::kGpsPose>(GpsPose{state.s, state.lateral, state.heading},
                                               tick);

      std::vector<Measurement> meas = detector->process(det);
      if (scenario_.pipeline == PipelineVariant::kFusion) {
        if (auto m = map_sign_measurement(gps, geom, cfg)) meas.push_back(*m);
      }
      tracker->update(meas, cfg.perception_dt());

      std::optional<double> map_distance;
      if (scenario_.pipeline != PipelineVariant::kPinhole) {
        map_distance = estimate_distance_map(gps, geom);
      }
      const FusedSignEstimate est =
          fuse(tracker->tracker(), map_distance, scenario_.pipeline, cfg, sign_to_line);

      FrameRecord fr;
      fr.frame = frame;
      fr.t = t;
      fr.state = state;
      fr.sign_distance = geom.sign_distance(state);
      fr.line_distance = distance_to_stop_line(state, geom);
      fr.in_range = fr.sign_distance > 0 && fr.sign_distance < cfg.max_range;
      fr.detected = det.present && det.confidence >= threshold;
      fr.confidence = det.present ? det.confidence : 0.0;
      fr.distance_estimate = est.distance;
      fr.tracked = est.tracked;
      for (const auto& tr : tracker->tracker().tracks()) {
        if (!fr.track_status || tr.status == TrackStatus::kConfirmed) fr.track_status = tr.status;
      }
      if (fr.in_range) samples.push_back({fr.sign_distance, fr.detected});

      if (checker) {
        const double map_sign = gps.s <= geom.sign_s ? geom.sign_s - gps.s : -1.0;
        const bool map_in_range = map_sign > 0 && map_sign < cfg.max_range;
        fr.alarm = checker->observe(map_in_range, fr.detected);
        if (fr.alarm && !rep.first_alarm_frame) rep.first_alarm_frame = frame;
      }

      FrameContext ctx{frame, t, state.speed, scenario_.desired_speed, gps};
      decision = planner->plan(est, ctx, decision);
      decision = bridge_.publish<Channel::kPlanDecision>(decision, tick);
      fr.stop_commitment = decision.stop_commitment;
      fr.stop_fulfilled = decision.stop_fulfilled;
      rep.frames.push_back(fr);
      record = &rep.frames.back();
    }

    ControlCommand cmd = controller->control(decision, gps, state.speed, t, dt);
    cmd = bridge_.publish<Channel::kControlCmd>(cmd, tick);
    cmd = clamp_command(cmd, limits);
    if (record != nullptr) record->command = cmd;

    TrajectoryRow row{t, state.s, state.lateral, state.heading, state.speed, cmd.accel,
                      cmd.steering};
    rep.trajectory.push_back(bridge_.publish<Channel::kTrajectoryLog>(row, tick));

    state = step_vehicle(state, cmd, dt, limits);
    if (state.s > geom.stop_line_s + cfg.overrun) {
      rep.complete = true;
      break;
    }
  }

  rep.component = component_metrics(samples);
  rep.system = system_metrics(rep.trajectory, geom, cfg, rep.complete);
  rep.alarms = checker ? checker->alarms() : 0;
  rep.warnings = warnings_;
  rep.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - wall_start)
                         .count();
  return rep;
}

std::uint64_t scenario_run_seed(const Scenario& s, int run_index) {
  return run_seed(s.seed, static_cast<std::uint64_t>(run_index));
}

RunReport run_closed_loop(const Scenario& scenario, int run_index,
                          const ProfileRegistry& profiles) {
  Simulation sim(scenario, scenario_run_seed(scenario, run_index), profiles);
  sim.apply_scenario_attack();
  RunReport rep = sim.run();
  rep.run_index = run_index;
  return rep;
}

}  // namespace semgap
