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

#include "semgap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "semgap/error.hpp"

namespace semgap {

std::map<double, double> frame_success_rates(std::span<const FrameSample> log,
                                             std::span<const double> cutoffs) {
  std::map<double, double> out;
  for (double c : cutoffs) {
    int total = 0;
    int missed = 0;
    for (const auto& f : log) {
      if (f.distance < c) {
        ++total;
        missed += f.detected ? 0 : 1;
      }
    }
    if (total > 0) out[c] = static_cast<double>(missed) / total;
  }
  return out;
}

double best_window_rate(std::span<const bool> detected, int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "window length must be >= 1");
  if (detected.size() < static_cast<size_t>(n)) {
    fail(ErrorCode::kInvalidArgument, "log has " + std::to_string(detected.size()) +
                                          " frames, fewer than the window length " +
                                          std::to_string(n));
  }
  int misses = 0;
  for (int i = 0; i < n; ++i) misses += detected[i] ? 0 : 1;
  int best = misses;
  for (size_t i = static_cast<size_t>(n); i < detected.size(); ++i) {
    misses += detected[i] ? 0 : 1;
    misses -= detected[i - n] ? 0 : 1;
    best = std::max(best, misses);
  }
  return static_cast<double>(best) / n;
}

ComponentMetrics component_metrics(std::span<const FrameSample> log, int n) {
  ComponentMetrics m;
  m.n = n;
  m.frames = static_cast<int>(log.size());
  m.f_succ = frame_success_rates(log, kDefaultCutoffs);
  int misses = 0;
  for (const auto& f : log) misses += f.detected ? 0 : 1;
  if (!log.empty()) m.miss_rate = static_cast<double>(misses) / log.size();
  if (log.size() >= static_cast<size_t>(n)) {
    // std::vector<bool> is not contiguous, so spell the flags out.
    auto flags = std::make_unique<bool[]>(log.size());
    for (size_t i = 0; i < log.size(); ++i) flags[i] = log[i].detected;
    m.f_max = best_window_rate(std::span<const bool>(flags.get(), log.size()), n);
  }
  return m;
}

SystemMetrics system_metrics(std::span<const TrajectoryRow> trajectory,
                             const WorldGeometry& geometry, const PipelineConfig& config,
                             bool complete) {
  SystemMetrics m;
  m.complete = complete;
  std::optional<size_t> stop_at;
  std::optional<size_t> cross_at;
  for (size_t i = 0; i < trajectory.size(); ++i) {
    const double line = geometry.stop_line_s - trajectory[i].s;
    if (!cross_at && line < 0) cross_at = i;
    if (!stop_at && trajectory[i].speed <= config.stop_speed_eps && line <= config.stop_zone) {
      stop_at = i;
    }
    if (stop_at && cross_at) break;
  }
  m.stopped = stop_at.has_value();
  if (stop_at) m.stop_position = geometry.stop_line_s - trajectory[*stop_at].s;
  if (cross_at) m.trip_time = trajectory[*cross_at].t;
  m.violated = cross_at && (!stop_at || *cross_at <= *stop_at);
  if (m.violated) {
    m.violation_distance =
        stop_at ? -*m.stop_position : std::numeric_limits<double>::infinity();
  }
  return m;
}

AggregateMetrics aggregate(std::span<const RunOutcome> runs) {
  AggregateMetrics a;
  a.runs = static_cast<int>(runs.size());
  std::vector<const RunOutcome*> ok;
  for (const auto& r : runs) {
    if (r.system.complete) ok.push_back(&r);
  }
  a.complete_runs = static_cast<int>(ok.size());
  if (ok.empty()) fail(ErrorCode::kInvalidArgument, "aggregate needs at least one complete run");

  int stopped = 0;
  int violated = 0;
  double dist_sum = 0.0;
  std::map<double, std::pair<double, int>> f_succ;
  double fmax_sum = 0.0;
  int fmax_n = 0;
  double trip_sum = 0.0;
  int trip_n = 0;
  double alarms = 0.0;
  for (const auto* r : ok) {
    stopped += r->system.stopped;
    if (r->system.violated) {
      ++violated;
      double d = *r->system.violation_distance;
      if (std::isinf(d)) {
        ++a.infinite_violations;
      } else {
        dist_sum += d;
      }
    }
    for (const auto& [c, v] : r->component.f_succ) {
      f_succ[c].first += v;
      f_succ[c].second += 1;
    }
    if (r->component.f_max) {
      fmax_sum += *r->component.f_max;
      ++fmax_n;
    }
    if (r->system.trip_time) {
      trip_sum += *r->system.trip_time;
      ++trip_n;
    }
    alarms += r->alarms;
  }
  const double n = static_cast<double>(ok.size());
  a.stop_rate = stopped / n;
  a.violation_rate = violated / n;
  if (violated > 0) {
    a.violation_distance = a.infinite_violations > 0
                               ? std::numeric_limits<double>::infinity()
                               : dist_sum / violated;
  }
  for (const auto& [c, sum] : f_succ) a.f_succ[c] = sum.first / sum.second;
  if (fmax_n > 0) a.f_max = fmax_sum / fmax_n;
  if (trip_n > 0) a.trip_time = trip_sum / trip_n;
  a.mean_alarms = alarms / n;
  return a;
}

namespace {

void check_trace(std::span<const TimedSample> samples) {
  if (samples.size() < 2) fail(ErrorCode::kInvalidArgument, "trace needs at least 2 samples");
  for (size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      fail(ErrorCode::kInvalidArgument, "trace timestamps must be strictly increasing");
    }
  }
}

double interpolate(std::span<const TimedSample> s, double t) {
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const TimedSample& a, double x) { return a.t < x; });
  if (it == s.begin()) return s.front().value;
  if (it == s.end()) return s.back().value;
  if (it->t == t) return it->value;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return lo.value + w * (hi.value - lo.value);
}

std::vector<double> resample(std::span<const TimedSample> s, double start, double end, double hz) {
  std::vector<double> out;
  // Grid points are computed as start + k / hz; the epsilon admits the end
  // point when it lies on the grid up to rounding.
  const double span = (end - start) * hz;
  const auto count = static_cast<long>(std::floor(span + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) out.push_back(interpolate(s, start + k / hz));
  return out;
}

}  // namespace

std::vector<double> align_traces(std::span<const TimedSample> samples, double target_hz) {
  check_trace(samples);
  if (!(target_hz > 0)) fail(ErrorCode::kInvalidArgument, "target_hz must be positive");
  return resample(samples, samples.front().t, samples.back().t, target_hz);
}

AlignedPair align_pair(std::span<const TimedSample> a, std::span<const TimedSample> b,
                       double target_hz) {
  check_trace(a);
  check_trace(b);
  if (!(target_hz > 0)) fail(ErrorCode::kInvalidArgument, "target_hz must be positive");
  const double start = std::max(a.front().t, b.front().t);
  const double end = std::min(a.back().t, b.back().t);
  if (!(end > start)) fail(ErrorCode::kInvalidArgument, "traces do not overlap in time");
  return {resample(a, start, end, target_hz), resample(b, start, end, target_hz), start};
}

namespace {

double correlation(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    fail(ErrorCode::kInvalidArgument, "pearson: a series has zero variance");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInvalidArgument, "pearson: length mismatch");
  if (a.size() < 3) fail(ErrorCode::kInvalidArgument, "pearson: need at least 3 points");
}

}  // namespace

double pearson_permutation_p(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const double observed = std::abs(correlation(a, b));
  std::vector<size_t> idx(b.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> perm(b.size());
  long total = 0;
  long extreme = 0;
  do {
    for (size_t i = 0; i < idx.size(); ++i) perm[i] = b[idx[i]];
    ++total;
    if (std::abs(correlation(a, perm)) >= observed - 1e-12) ++extreme;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return static_cast<double>(extreme) / total;
}

FidelityReport pearson(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  FidelityReport rep;
  rep.n_points = static_cast<int>(a.size());
  rep.r = correlation(a, b);
  if (rep.n_points <= kExactPermutationMaxN) {
    rep.p = pearson_permutation_p(a, b);
    rep.p_method = "exact-permutation";
    return rep;
  }
  rep.p_method = "t-approx";
  const double df = rep.n_points - 2.0;
  const double denom = 1.0 - rep.r * rep.r;
  if (denom <= 0.0) {
    rep.p = 0.0;
    return rep;
  }
  const double t = rep.r * std::sqrt(df / denom);
  boost::math::students_t dist(df);
  rep.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return rep;
}

}  // namespace semgap
