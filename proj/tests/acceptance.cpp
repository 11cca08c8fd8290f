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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: semgap_acceptance [source-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "semgap/metrics.hpp"
#include "semgap/planner.hpp"
#include "semgap/report.hpp"
#include "semgap/rng.hpp"
#include "semgap/scenario.hpp"
#include "semgap/sim.hpp"
#include "semgap/tracker.hpp"
#include "semgap/world.hpp"

using namespace semgap;

namespace {

// Pinned tolerances.
constexpr double kCriterion1Seconds = 5.0;
constexpr double kCriterion9Seconds = 60.0;
constexpr double kBrakingTol = 1e-3;
constexpr double kPidBand = 0.02;
constexpr double kPidSteadyTol = 1e-5;
constexpr double kPsdTol = -1e-9;
constexpr double kPearsonTol = 1e-9;
constexpr int kRuns = 10;

std::string source_dir = SEMGAP_SOURCE_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string label(const Scenario& s) {
  return render_attack(s.attack) + "/" + std::string(to_string(s.pipeline)) + "/" +
         fmt("%g", mps_to_mph(s.desired_speed)) + "mph/" + s.condition;
}

const ProfileRegistry& registry() {
  static const ProfileRegistry reg;
  return reg;
}

// The shipped evaluation table, run once and shared by criteria 2, 4 and 5.
const MatrixResult& evaluation() {
  static const MatrixResult m = [] {
    const auto spec = load_matrix(source_dir + "/matrices/evaluation.cfg");
    return run_scenarios(expand_matrix(spec), jobs(), registry());
  }();
  return m;
}

std::vector<const MatrixRow*> rows_where(const MatrixResult& m,
                                         const std::function<bool(const Scenario&)>& pred) {
  std::vector<const MatrixRow*> out;
  for (const auto& r : m.rows) {
    if (pred(r.scenario)) out.push_back(&r);
  }
  return out;
}

bool is_physical(const Scenario& s, const std::string& profile) {
  return s.attack.kind == AttackSpec::Kind::kPhysicalPatch && s.attack.profile == profile;
}

// ---- 1 -----------------------------------------------------------------

Verdict criterion1() {
  Verdict v;
  auto spec = load_matrix(source_dir + "/matrices/evaluation.cfg");
  std::vector<Scenario> picked;
  for (const auto& s : expand_matrix(spec)) {
    if (is_physical(s, "ss-like") && s.pipeline == PipelineVariant::kMap &&
        s.condition == "noon-sunny") {
      picked.push_back(s);
    }
  }
  v.require(picked.size() == 5, "expected 5 ss-like/Map rows");
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = run_scenarios(picked, jobs(), registry());
  const double secs = seconds_since(t0);
  for (const auto& row : m.rows) {
    const auto& a = *row.aggregate;
    v.require(a.runs == kRuns && a.complete_runs == kRuns, label(row.scenario) + ": incomplete");
    if (row.scenario.desired_speed == mph_to_mps(10)) {
      v.require(a.stop_rate == 0.0 && a.violation_rate == 1.0 && a.violation_distance &&
                    std::isinf(*a.violation_distance),
                label(row.scenario) + ": expected 0% stop, 100% violation, inf");
    } else {
      v.require(a.stop_rate == 1.0 && a.violation_rate == 0.0,
                label(row.scenario) + ": expected 100% stop, 0% violation");
    }
  }
  v.require(secs < kCriterion1Seconds, fmt("took %.2f s", secs));
  if (v.pass) v.detail = fmt("10 mph: 0%% stop, 100%% violation, inf; 15-30 mph: 100%% stop; %.2f s", secs);
  return v;
}

// ---- 2 -----------------------------------------------------------------

Verdict criterion2() {
  Verdict v;
  for (const std::string profile : {"rp2-like", "sib"}) {
    const auto rows = rows_where(evaluation(), [&](const Scenario& s) {
      return is_physical(s, profile) && s.pipeline == PipelineVariant::kMap &&
             s.desired_speed == mph_to_mps(10);
    });
    v.require(rows.size() == 1, profile + ": row missing");
    if (rows.size() != 1) continue;
    const auto& row = *rows[0];
    bool full_window = false;
    for (const auto& o : row.outcomes) full_window = full_window || o.component.f_max == 1.0;
    v.require(full_window, profile + ": no run with f_max(50) = 100%");
    v.require(row.aggregate->violation_rate == 0.0, profile + ": violations present");
  }
  if (v.pass) v.detail = "rp2-like and sib: f_max(50) = 100% on some run, 0% violation";
  return v;
}

// ---- 3 -----------------------------------------------------------------

Verdict criterion3() {
  Verdict v;
  std::string attacks;
  for (const auto& name : registry().names()) {
    attacks += (attacks.empty() ? "" : ", ") + (name == "none" ? name : "physical:" + name);
  }
  const auto spec = parse_matrix("[matrix]\nseed = 2026\nruns = 10\nattacks = [" + attacks +
                                 "]\npipelines = [Fusion]\nspeeds_mph = [10, 15, 20, 25, 30]\n"
                                 "lighting = [noon]\nweather = [sunny]\n");
  const auto m = run_scenarios(expand_matrix(spec), jobs(), registry());
  for (const auto& row : m.rows) {
    v.require(row.aggregate && row.aggregate->complete_runs == kRuns,
              label(row.scenario) + ": incomplete");
    v.require(row.aggregate && row.aggregate->violation_rate == 0.0,
              label(row.scenario) + ": violation rate " +
                  fmt("%.1f%%", 100.0 * row.aggregate->violation_rate));
  }
  if (v.pass) v.detail = std::to_string(m.rows.size()) + " Fusion rows, 0% violation";
  return v;
}

// ---- 4 -----------------------------------------------------------------

Verdict criterion4() {
  Verdict v;
  for (const std::string cond : {"sunrise-sunny", "sunset-sunny", "noon-cloudy", "noon-rainy"}) {
    const auto rows = rows_where(evaluation(), [&](const Scenario& s) {
      return is_physical(s, "ss-like") && s.pipeline == PipelineVariant::kMap &&
             s.desired_speed == mph_to_mps(25) && s.condition == cond;
    });
    v.require(rows.size() == 1, cond + ": row missing");
    if (rows.size() != 1) continue;
    const auto& a = *rows[0]->aggregate;
    v.require(a.complete_runs == kRuns && a.stop_rate == 1.0 && a.violation_rate == 0.0,
              cond + ": expected 100% stop, 0% violation");
  }
  if (v.pass) v.detail = "sunrise, sunset, cloudy, rainy: 100% stop, 0% violation";
  return v;
}

// ---- 5 -----------------------------------------------------------------

Verdict criterion5() {
  Verdict v;
  const auto rows = rows_where(evaluation(), [](const Scenario& s) {
    return s.attack.kind == AttackSpec::Kind::kNone;
  });
  v.require(rows.size() == 15, "expected 15 benign rows");
  double worst = 0.0;
  for (const auto* row : rows) {
    const auto& a = *row->aggregate;
    v.require(a.complete_runs == kRuns && a.stop_rate == 1.0 && a.violation_rate == 0.0,
              label(row->scenario) + ": expected 100% stop, 0% violation");
    for (const auto& o : row->outcomes) {
      const auto pos = o.system.stop_position;
      const bool inside = pos && *pos >= 0.0 && *pos <= row->scenario.config.stop_zone;
      v.require(inside, label(row->scenario) + ": stop outside [0, stop_zone]");
      if (pos) worst = std::max(worst, *pos);
    }
  }
  if (v.pass) v.detail = fmt("15 rows stopped, farthest stop %.3f m before the line", worst);
  return v;
}

// ---- 6 -----------------------------------------------------------------

double window_oracle(const std::vector<bool>& detected, int n) {
  double best = 0.0;
  for (std::size_t i = 0; i + n <= detected.size(); ++i) {
    int misses = 0;
    for (int k = 0; k < n; ++k) misses += detected[i + k] ? 0 : 1;
    best = std::max(best, static_cast<double>(misses) / n);
  }
  return best;
}

double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

Verdict criterion6() {
  Verdict v;
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng.uniform() * 300);
    const double p_miss = rng.uniform();
    std::vector<bool> log(len);
    for (int i = 0; i < len; ++i) log[i] = rng.uniform() >= p_miss;
    const int n = 1 + static_cast<int>(rng.uniform() * len);
    std::vector<char> bytes(log.begin(), log.end());
    const std::span<const bool> view(reinterpret_cast<const bool*>(bytes.data()), bytes.size());
    v.require(best_window_rate(view, n) == window_oracle(log, n), "window rate mismatch");
  }

  const std::vector<FrameSample> fixture{{5, false}, {15, true}, {25, false}, {35, true}};
  const auto f = frame_success_rates(fixture, kDefaultCutoffs);
  v.require(f.at(10.0) == 1.0 && f.at(20.0) == 0.5 && std::abs(f.at(30.0) - 2.0 / 3.0) < 1e-15,
            "frame_success_rates fixture");
  const std::vector<FrameSample> far{{12, false}, {25, false}};
  v.require(frame_success_rates(far, kDefaultCutoffs).count(10.0) == 0, "empty cutoff present");

  Rng prng(22);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a, b;
    const int n = 3 + static_cast<int>(prng.uniform() * 200);
    for (int i = 0; i < n; ++i) {
      a.push_back(prng.normal());
      b.push_back(0.5 * a.back() + prng.normal());
    }
    worst = std::max(worst, std::abs(pearson(a, b).r - pearson_oracle(a, b)));
  }
  v.require(worst <= kPearsonTol, fmt("pearson deviates by %.3g", worst));
  v.require(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}).r == -1.0,
            "pearson([1,2,3],[3,2,1]) != -1");
  if (v.pass) v.detail = fmt("1000 window logs exact, pearson within %.1e", worst);
  return v;
}

// ---- 7 -----------------------------------------------------------------

enum class Ref { kNone, kTentative, kConfirmed };

Verdict criterion7() {
  Verdict v;
  const auto params = TrackerParams::from(PipelineConfig{}, 0.4);
  const Measurement m{{1000, 500, 40}, 0.9, MeasurementSource::kVision};
  Rng rng(2024);
  for (int seq = 0; seq < 10000 && v.pass; ++seq) {
    Tracker t(params);
    Ref ref = Ref::kNone;
    int hits = 0, misses = 0;
    bool h = rng.uniform() < 0.5;
    int frames = 0;
    while (frames < 160 && v.pass) {
      const int len = 1 + static_cast<int>(rng.uniform() * (h ? 6 : 45));
      for (int i = 0; i < len; ++i, ++frames) {
        if (h) {
          const Measurement one[] = {m};
          t.update(one, 0.05);
          if (ref == Ref::kNone) {
            ref = Ref::kTentative;
            hits = 0;
          }
          ++hits;
          misses = 0;
          if (ref == Ref::kTentative && hits >= 4) ref = Ref::kConfirmed;
        } else {
          t.update({}, 0.05);
          if (ref != Ref::kNone) {
            hits = 0;
            if (++misses >= 40) ref = Ref::kNone;
          }
        }
        Ref seen = Ref::kNone;
        if (t.tracks().size() == 1) {
          seen = t.tracks()[0].status == TrackStatus::kConfirmed ? Ref::kConfirmed : Ref::kTentative;
        }
        v.require(t.tracks().size() <= 1 && seen == ref,
                  "sequence " + std::to_string(seq) + " frame " + std::to_string(frames));
      }
      h = !h;
    }
  }
  if (v.pass) v.detail = "10000 sequences match the reference automaton";
  return v;
}

// ---- 8 -----------------------------------------------------------------

Verdict criterion8() {
  Verdict v;
  PipelineConfig no_margin;
  no_margin.brake_margin = 0.0;
  const double bd = braking_distance(4.4704, no_margin);
  v.require(std::abs(bd - 2.939) <= kBrakingTol, fmt("braking_distance = %.6f", bd));

  PipelineConfig c;
  const auto limits = VehicleLimits::from(c);
  VehicleState veh;
  ControllerState st;
  bool settled = true;
  for (int i = 0; i < 20000; ++i) {
    const auto r = pid_accel(5.0, veh.speed, st, 0.01, c);
    st = r.state;
    veh = step_vehicle(veh, {0.0, r.accel}, 0.01, limits);
    if (i >= 2000) settled = settled && std::abs(veh.speed - 5.0) <= kPidBand * 5.0;
  }
  v.require(settled, "PID left the 2% band after 20 s");
  v.require(std::abs(veh.speed - 5.0) < kPidSteadyTol, fmt("PID final error %.3g", veh.speed - 5.0));

  Tracker t(TrackerParams::from(c, 0.4));
  Rng rng(10);
  double worst = 1.0;
  for (int k = 0; k < 10000; ++k) {
    if (rng.uniform() < 0.7) {
      const Measurement one[] = {
          {{960 + 100 * std::sin(k * 0.01) + rng.normal(), 500 + rng.normal(), 40 + rng.normal()},
           0.9,
           MeasurementSource::kVision}};
      t.update(one, 0.05);
    } else {
      t.update({}, 0.05);
    }
    for (const auto& tr : t.tracks()) worst = std::min(worst, min_eigenvalue(tr.covariance));
  }
  v.require(worst > kPsdTol, fmt("min eigenvalue %.3g", worst));

  Rng srng(4);
  for (int i = 0; i < 10000; ++i) {
    const double e = (srng.uniform() - 0.5) * 4.0;
    const double h = (srng.uniform() - 0.5) * 0.6;
    const double speed = srng.uniform() * 15.0;
    v.require(stanley_steer(-e, -h, speed, c) == -stanley_steer(e, h, speed, c),
              "stanley odd symmetry");
  }
  if (v.pass) {
    v.detail = fmt("braking %.4f m, PID settled, ", bd) + fmt("min eigenvalue %.3g, ", worst) +
               "stanley odd";
  }
  return v;
}

// ---- 9 -----------------------------------------------------------------

Verdict criterion9() {
  Verdict v;
  for (const std::string attack : {"physical:ss-like", "physical:sib", "none"}) {
    for (auto pipeline : {PipelineVariant::kMap, PipelineVariant::kPinhole, PipelineVariant::kFusion}) {
      Scenario s;
      s.desired_speed = mph_to_mps(20);
      s.attack = parse_attack(attack);
      s.pipeline = pipeline;
      s.seed = 99;
      const auto a = frame_csv(run_closed_loop(s, 0, registry()));
      const auto b = frame_csv(run_closed_loop(s, 0, registry()));
      v.require(a == b, label(s) + ": frame logs differ");
    }
  }
  const auto scenarios = expand_matrix(load_matrix(source_dir + "/matrices/main45.cfg"));
  v.require(scenarios.size() == 45, "main45 does not expand to 45 rows");
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = run_scenarios(scenarios, jobs(), registry());
  const double secs = seconds_since(t0);
  v.require(m.incomplete_runs == 0, "incomplete runs in main45");
  v.require(secs < kCriterion9Seconds, fmt("main45 took %.1f s", secs));
  if (v.pass) {
    v.detail = "byte-identical logs; 45 x 10 runs in " + fmt("%.2f s", secs) + " on " +
               std::to_string(jobs()) + " thread(s)";
  }
  return v;
}

// ---- 10 ----------------------------------------------------------------

Verdict criterion10() {
  Verdict v;
  const std::vector<TimedSample> two{{0.0, 0.0}, {0.1, 1.0}};
  v.require(align_traces(two, 20.0) == std::vector<double>{0.0, 0.5, 1.0}, "align fixture");
  std::vector<TimedSample> trace;
  Rng rng(5);
  for (int k = 0; k < 200; ++k) trace.push_back({k / 20.0, rng.uniform()});
  const auto pair = align_pair(trace, trace, 20.0);
  v.require(pearson(pair.a, pair.b).r == 1.0, "self correlation != 1");
  if (v.pass) {
    v.detail =
        "align fixture exact, self r = 1.0; the physical-trace headline correlation needs "
        "physical data and is not reproduced here (covered by oracle and synthetic-noise tests)";
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) source_dir = argv[1];
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"ss-like/Map speed pattern", criterion1},
      {"rp2-like/sib component vs system gap", criterion2},
      {"Fusion immunity", criterion3},
      {"ss-like condition variants at 25 mph", criterion4},
      {"benign baseline", criterion5},
      {"metric oracles", criterion6},
      {"track lifecycle automaton", criterion7},
      {"numerical control checks", criterion8},
      {"determinism and scale", criterion9},
      {"fidelity tooling", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2zu %s: %s (%s)\n", i + 1, v.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
