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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semgap/metrics.hpp"
#include "semgap/sim.hpp"

namespace semgap {

inline constexpr std::string_view kVersion = "0.1.0";

// 16 hex digits of FNV-1a over the rendered scenario and the run index.
std::string run_id(const Scenario& scenario, int run_index);

// Per-frame log. Lines starting with '#' carry the tool version and the
// resolved configuration; the first other line is the header:
//   frame,t,s,lateral,heading,speed,accel_cmd,steering_cmd,distance_true,
//   line_distance,in_range,detected,confidence,distance_est,tracked,
//   track_status,stop_commitment,stop_fulfilled,alarm
// Empty cells mean "absent".
std::string frame_csv(const RunReport& report);
extern const std::vector<std::string> kFrameCsvColumns;

// Summary record. Infinite violation distances are the string "inf".
std::string run_json(const RunReport& report);

// ---- matrices ----------------------------------------------------------

struct MatrixRow {
  Scenario scenario;
  std::vector<std::string> run_ids;
  std::vector<RunOutcome> outcomes;
  std::optional<AggregateMetrics> aggregate;  // absent when no run completed
  // Trip time minus that of the benign row with the same pipeline, speed and
  // condition, when the matrix contains one.
  std::optional<double> trip_delay;
};

struct MatrixResult {
  std::vector<MatrixRow> rows;
  int incomplete_runs = 0;
};

// Called once per finished run, possibly from several threads at once.
using RunSink = std::function<void(const RunReport&, const std::string& id)>;

// Runs every scenario's runs on `jobs` threads. Rows come back in input
// order and do not depend on `jobs`.
MatrixResult run_scenarios(const std::vector<Scenario>& scenarios, int jobs,
                           const ProfileRegistry& profiles, const RunSink& sink = {});

// Both carry the tool version and the configuration shared by all
// rows. CSV columns:
//   attack,pipeline,speed_mph,condition,seed,runs,complete_runs,f_succ_10,
//   f_succ_20,f_succ_30,f_max_50,stop_rate,violation_rate,
//   violation_distance,infinite_violations,trip_time,trip_delay,mean_alarms
std::string matrix_csv(const MatrixResult& result);
std::string matrix_markdown(const MatrixResult& result);

// Writes out_dir/{matrix.csv, matrix.md} (runs are written by the sink).
void write_matrix_outputs(const std::string& out_dir, const MatrixResult& result);

// Writes out_dir/runs/<id>.csv and <id>.json.
void write_run_files(const std::string& out_dir, const RunReport& report, const std::string& id);

// ---- fidelity ----------------------------------------------------------

// Reads (t, confidence) samples. Accepts a plain two-column file (with or
// without a "t,confidence" header) or a run CSV, whose t and confidence
// columns are used. '#' lines are skipped.
std::vector<TimedSample> parse_trace(std::string_view text);
std::vector<TimedSample> load_trace(const std::string& path);

struct TraceCorrelation {
  std::string path;
  std::optional<FidelityReport> report;
  std::string error;  // set when the trace could not be used
};

struct FidelitySummary {
  std::vector<TraceCorrelation> traces;
  std::optional<double> mean_r;
  std::optional<double> min_r;
  std::optional<double> max_r;
};

// Correlates the simulation trace with each physical trace after aligning
// both onto a target_hz grid over their overlap. A bad physical trace is
// reported and skipped; a bad simulation trace throws.
FidelitySummary fidelity(const std::string& sim_path, const std::vector<std::string>& phys_paths,
                         double target_hz);
std::string fidelity_json(const FidelitySummary& summary);

}  // namespace semgap
