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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semgap/bridge.hpp"
#include "semgap/scenario.hpp"
#include "semgap/world.hpp"

namespace semgap {

// ---- component level -------------------------------------------------------

struct FrameSample {
  double distance = 0.0;  // ground-truth sign distance
  bool detected = false;
};

// For each cutoff c: misdetected / total over frames with distance < c.
// Cutoffs with no frames are left out of the map.
std::map<double, double> frame_success_rates(std::span<const FrameSample> log,
                                             std::span<const double> cutoffs);

// Highest miss fraction over all length-n windows. Throws kInvalidArgument
// when the log is shorter than n (or n < 1).
double best_window_rate(std::span<const bool> detected, int n);

struct ComponentMetrics {
  std::map<double, double> f_succ;
  std::optional<double> f_max;  // absent when the run had fewer than n frames
  int n = 50;
  int frames = 0;
  double miss_rate = 0.0;
};

ComponentMetrics component_metrics(std::span<const FrameSample> log, int n = 50);

inline constexpr double kDefaultCutoffs[] = {10.0, 20.0, 30.0};

// ---- system level ----------------------------------------------------------

struct SystemMetrics {
  bool stopped = false;
  bool violated = false;
  // Present iff violated; +inf when the vehicle never came to a full stop.
  std::optional<double> violation_distance;
  std::optional<double> stop_position;  // line distance at the first full stop
  std::optional<double> trip_time;      // start to line crossing
  bool complete = true;
};

// A full stop is the first control tick with speed <= stop_speed_eps while
// at most stop_zone before the line (or past it). Violation: the line is
// crossed before that stop.
SystemMetrics system_metrics(std::span<const TrajectoryRow> trajectory,
                             const WorldGeometry& geometry, const PipelineConfig& config,
                             bool complete = true);

// ---- aggregation -----------------------------------------------------------

struct RunOutcome {
  ComponentMetrics component;
  SystemMetrics system;
  int alarms = 0;
};

struct AggregateMetrics {
  int runs = 0;
  int complete_runs = 0;
  double stop_rate = 0.0;
  double violation_rate = 0.0;
  // Mean over violated runs; +inf if any violated run never stopped.
  std::optional<double> violation_distance;
  int infinite_violations = 0;
  std::map<double, double> f_succ;  // mean over runs where defined
  std::optional<double> f_max;
  std::optional<double> trip_time;
  double mean_alarms = 0.0;
};

// Throws kInvalidArgument when no run is complete; incomplete runs are
// counted but excluded from every rate.
AggregateMetrics aggregate(std::span<const RunOutcome> runs);

// ---- fidelity --------------------------------------------------------------

struct TimedSample {
  double t = 0.0;
  double value = 0.0;
};

// Linear interpolation onto t0 + k / target_hz for every grid point inside
// [t0, t_end]. Requires >= 2 samples with strictly increasing t.
std::vector<double> align_traces(std::span<const TimedSample> samples, double target_hz);

// Two traces on a shared grid over their overlapping time span.
struct AlignedPair {
  std::vector<double> a;
  std::vector<double> b;
  double start = 0.0;
};
AlignedPair align_pair(std::span<const TimedSample> a, std::span<const TimedSample> b,
                       double target_hz);

struct FidelityReport {
  double r = 0.0;
  double p = 1.0;
  int n_points = 0;
  std::string p_method;  // "t-approx" or "exact-permutation"
};

// Product-moment correlation with a two-tailed p-value from the t statistic
// (n - 2 degrees of freedom). For n <= kExactPermutationMaxN the p-value is
// an exact permutation test instead.
FidelityReport pearson(std::span<const double> a, std::span<const double> b);

inline constexpr int kExactPermutationMaxN = 7;

// Exact two-tailed permutation p-value (fraction of permutations of b with
// |r| >= |r_observed|). Only sensible for small n.
double pearson_permutation_p(std::span<const double> a, std::span<const double> b);

}  // namespace semgap
