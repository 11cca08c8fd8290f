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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "semgap/error.hpp"
#include "semgap/metrics.hpp"
#include "semgap/rng.hpp"

using namespace semgap;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Direct enumeration of every window, independent of the sliding sum.
double window_oracle(const std::vector<bool>& detected, int n) {
  int best = 0;
  for (std::size_t start = 0; start + n <= detected.size(); ++start) {
    int misses = 0;
    for (int k = 0; k < n; ++k) misses += detected[start + k] ? 0 : 1;
    best = std::max(best, misses);
  }
  return static_cast<double>(best) / n;
}

double window_rate(const std::vector<bool>& detected, int n) {
  auto flags = std::make_unique<bool[]>(detected.size());
  std::copy(detected.begin(), detected.end(), flags.get());
  return best_window_rate(std::span<const bool>(flags.get(), detected.size()), n);
}

double pearson_direct(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double va = saa / n - (sa / n) * (sa / n);
  const double vb = sbb / n - (sb / n) * (sb / n);
  return cov / std::sqrt(va * vb);
}

std::vector<TrajectoryRow> trajectory(std::initializer_list<std::pair<double, double>> s_speed) {
  std::vector<TrajectoryRow> out;
  double t = 0.0;
  for (const auto& [s, v] : s_speed) {
    TrajectoryRow r;
    r.t = t;
    r.s = s;
    r.speed = v;
    out.push_back(r);
    t += 0.01;
  }
  return out;
}

RunOutcome outcome(bool violated, double distance = 0.0) {
  RunOutcome o;
  o.system.violated = violated;
  o.system.stopped = !violated || std::isfinite(distance);
  if (violated) o.system.violation_distance = distance;
  return o;
}

}  // namespace

TEST_CASE("best_window_rate fixtures") {
  CHECK(window_rate({false, true, false, false}, 2) == 1.0);
  CHECK(window_rate({true, true, true, true}, 2) == 0.0);
  CHECK(window_rate({false, true, true}, 3) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(window_rate({true}, 2), Error);
  CHECK_THROWS_AS(window_rate({true}, 0), Error);
}

TEST_CASE("property: best_window_rate equals window enumeration on 1000 random logs") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng.uniform() * 300);
    const double p_miss = rng.uniform();
    std::vector<bool> log;
    for (int i = 0; i < len; ++i) log.push_back(rng.uniform() >= p_miss);
    const int n = 1 + static_cast<int>(rng.uniform() * len);
    REQUIRE(window_rate(log, n) == window_oracle(log, n));
    if (len >= 50) REQUIRE(window_rate(log, 50) == window_oracle(log, 50));
  }
}

TEST_CASE("frame_success_rates fixtures") {
  const std::vector<FrameSample> log{{5, false}, {15, true}, {25, false}, {35, true}};
  const auto r = frame_success_rates(log, kDefaultCutoffs);
  CHECK(r.at(10.0) == 1.0);
  CHECK(r.at(20.0) == 0.5);
  CHECK(r.at(30.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const std::vector<FrameSample> far{{12, false}, {25, false}};
  const auto f = frame_success_rates(far, kDefaultCutoffs);
  CHECK(f.count(10.0) == 0);
  CHECK(f.at(20.0) == 1.0);
  CHECK(f.at(30.0) == 1.0);
}

TEST_CASE("property: an extra all-miss frame below the smallest cutoff cannot lower f(<10)") {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FrameSample> log;
    const int len = 1 + static_cast<int>(rng.uniform() * 60);
    for (int i = 0; i < len; ++i) log.push_back({rng.uniform() * 40.0, rng.uniform() < 0.5});
    const auto before = frame_success_rates(log, kDefaultCutoffs);
    log.push_back({rng.uniform() * 9.99, false});
    const auto after = frame_success_rates(log, kDefaultCutoffs);
    for (double c : kDefaultCutoffs) {
      if (before.count(c)) REQUIRE(after.at(c) >= before.at(c));
    }
  }
}

TEST_CASE("component metrics") {
  std::vector<FrameSample> all_missed;
  for (int i = 0; i < 60; ++i) all_missed.push_back({40.0 - i * 0.5, false});
  const auto m = component_metrics(all_missed);
  for (const auto& [c, v] : m.f_succ) CHECK(v == 1.0);
  CHECK(*m.f_max == 1.0);
  const auto short_run = component_metrics(std::span(all_missed).first(10));
  CHECK_FALSE(short_run.f_max);
}

TEST_CASE("pearson: direct formula on 100 random pairs") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8 + static_cast<int>(rng.uniform() * 200);
    const double rho = rng.uniform() * 2.0 - 1.0;
    std::vector<double> a, b;
    for (int i = 0; i < n; ++i) {
      const double x = rng.normal();
      a.push_back(x);
      b.push_back(rho * x + std::sqrt(1 - rho * rho) * rng.normal());
    }
    CHECK(std::abs(pearson(a, b).r - pearson_direct(a, b)) <= 1e-9);
  }
}

TEST_CASE("pearson: exact fixtures") {
  const std::vector<double> up{1, 2, 3};
  const std::vector<double> down{3, 2, 1};
  CHECK(pearson(up, down).r == -1.0);
  Rng rng(24);
  std::vector<double> a;
  for (int i = 0; i < 50; ++i) a.push_back(rng.uniform());
  CHECK(pearson(a, a).r == 1.0);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, up), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(pearson(up, std::vector<double>{1, 2}), Error);
}

TEST_CASE("property: pearson affine invariance and sign flip") {
  Rng rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 40; ++i) {
      a.push_back(rng.normal());
      b.push_back(0.5 * a.back() + rng.normal());
    }
    const double r = pearson(a, b).r;
    const double scale = 0.1 + rng.uniform() * 10.0;
    const double shift = (rng.uniform() - 0.5) * 100.0;
    std::vector<double> a2, neg;
    for (double x : a) a2.push_back(scale * x + shift);
    for (double x : b) neg.push_back(-x);
    CHECK(pearson(a2, b).r == doctest::Approx(r).epsilon(1e-12));
    CHECK(pearson(a, neg).r == doctest::Approx(-r).epsilon(1e-12));
  }
}

TEST_CASE("pearson: p-values") {
  std::vector<double> a, b;
  Rng rng(26);
  for (int i = 0; i < 200; ++i) {
    a.push_back(rng.normal());
    b.push_back(a.back() + rng.normal());
  }
  const auto strong = pearson(a, b);
  CHECK(strong.p_method == "t-approx");
  CHECK(strong.p < 1e-6);
  // n = 4: 24 permutations, of which the identity and the reversal reach |r| = 1.
  const auto tiny = pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 4, 6, 8});
  CHECK(tiny.p_method == "exact-permutation");
  CHECK(tiny.p == doctest::Approx(2.0 / 24.0));
}

TEST_CASE("align_traces") {
  const std::vector<TimedSample> two{{0.0, 0.0}, {0.1, 1.0}};
  CHECK(align_traces(two, 20.0) == std::vector<double>{0.0, 0.5, 1.0});

  std::vector<TimedSample> uniform;
  for (int k = 0; k < 40; ++k) uniform.push_back({k / 20.0, std::sin(k * 0.3)});
  const auto same = align_traces(uniform, 20.0);
  REQUIRE(same.size() == uniform.size());
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(same[i] == uniform[i].value);

  const std::vector<TimedSample> backwards{{0.0, 0.0}, {0.2, 1.0}, {0.1, 2.0}};
  CHECK_THROWS_AS(align_traces(backwards, 20.0), Error);
  CHECK_THROWS_AS(align_traces(std::vector<TimedSample>{{0.0, 1.0}}, 20.0), Error);
}

TEST_CASE("align_pair uses the overlap") {
  const std::vector<TimedSample> a{{0.0, 0.0}, {1.0, 1.0}};
  const std::vector<TimedSample> b{{0.5, 5.0}, {2.0, 5.0}};
  const auto p = align_pair(a, b, 10.0);
  CHECK(p.start == 0.5);
  CHECK(p.a.size() == 6);
  CHECK(p.b.size() == 6);
  CHECK(p.a.front() == doctest::Approx(0.5));
}

TEST_CASE("system metrics fixtures") {
  WorldGeometry g;
  g.stop_line_s = 100.0;
  PipelineConfig cfg;

  // Stops 0.5 m before the line, then proceeds.
  const auto ok = system_metrics(trajectory({{90, 5}, {99.5, 0.05}, {99.5, 0.0}, {101, 3}}), g, cfg);
  CHECK(ok.stopped);
  CHECK_FALSE(ok.violated);
  CHECK(*ok.stop_position == doctest::Approx(0.5));
  CHECK(*ok.trip_time == doctest::Approx(0.03));

  const auto through = system_metrics(trajectory({{98, 3}, {99.9, 3}, {100.2, 3}, {103, 3}}), g, cfg);
  CHECK_FALSE(through.stopped);
  CHECK(through.violated);
  CHECK(*through.violation_distance == kInf);

  const auto late = system_metrics(trajectory({{99, 2}, {100.1, 1}, {100.3, 0.0}, {104, 3}}), g, cfg);
  CHECK(late.stopped);
  CHECK(late.violated);
  CHECK(*late.violation_distance == doctest::Approx(0.3));

  // A stop far before the line is not a full stop at the line.
  const auto early = system_metrics(trajectory({{80, 0.0}, {100.5, 3}}), g, cfg);
  CHECK_FALSE(early.stopped);
  CHECK(early.violated);
}

TEST_CASE("aggregate rates") {
  std::vector<RunOutcome> all(10, outcome(true, kInf));
  auto a = aggregate(all);
  CHECK(a.violation_rate == 1.0);
  CHECK(a.infinite_violations == 10);
  CHECK(*a.violation_distance == kInf);

  std::vector<RunOutcome> none(10, outcome(false));
  a = aggregate(none);
  CHECK(a.violation_rate == 0.0);
  CHECK(a.stop_rate == 1.0);
  CHECK_FALSE(a.violation_distance);

  std::vector<RunOutcome> mixed(10, outcome(false));
  mixed[1] = outcome(true, 0.2);
  mixed[4] = outcome(true, 0.4);
  mixed[7] = outcome(true, 0.6);
  a = aggregate(mixed);
  CHECK(a.violation_rate == doctest::Approx(0.3));
  CHECK(*a.violation_distance == doctest::Approx(0.4));

  std::vector<RunOutcome> partial(4, outcome(false));
  partial[0].system.complete = false;
  partial[1] = outcome(true, kInf);
  a = aggregate(partial);
  CHECK(a.runs == 4);
  CHECK(a.complete_runs == 3);
  CHECK(a.violation_rate == doctest::Approx(1.0 / 3.0));

  std::vector<RunOutcome> dead(2, outcome(false));
  for (auto& r : dead) r.system.complete = false;
  CHECK_THROWS_AS(aggregate(dead), Error);
}

TEST_CASE("property: aggregate does not depend on run order") {
  Rng rng(27);
  std::vector<RunOutcome> runs;
  for (int i = 0; i < 30; ++i) {
    RunOutcome o = outcome(rng.uniform() < 0.4, rng.uniform());
    o.component.f_succ[10.0] = rng.uniform();
    o.component.f_max = rng.uniform();
    o.alarms = static_cast<int>(rng.uniform() * 5);
    runs.push_back(o);
  }
  const auto a = aggregate(runs);
  std::reverse(runs.begin(), runs.end());
  const auto b = aggregate(runs);
  CHECK(a.violation_rate == b.violation_rate);
  CHECK(*a.violation_distance == doctest::Approx(*b.violation_distance).epsilon(1e-14));
  CHECK(*a.f_max == doctest::Approx(*b.f_max).epsilon(1e-14));
  CHECK(a.mean_alarms == b.mean_alarms);
}
