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

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "semgap/bridge.hpp"
#include "semgap/error.hpp"
#include "semgap/rng.hpp"
#include "semgap/tracker.hpp"

using namespace semgap;

namespace {

constexpr double kDt = 0.05;

TrackerParams default_params() { return TrackerParams::from(PipelineConfig{}, 0.4); }

Measurement at(double u, double v, double h, double confidence = 0.9) {
  return Measurement{{u, v, h}, confidence, MeasurementSource::kVision};
}

void hit(Tracker& t, const Measurement& m) {
  const Measurement one[] = {m};
  t.update(one, kDt);
}

void miss(Tracker& t) { t.update({}, kDt); }

// Independent single-target lifecycle: what the status of the (only) track
// should be after each frame of a hit/miss sequence.
enum class Ref { kNone, kTentative, kConfirmed };

struct RefAutomaton {
  int create = 4;
  int remove = 40;
  Ref status = Ref::kNone;
  int hits = 0;
  int misses = 0;
  int deletions = 0;

  void step(bool h) {
    if (h) {
      if (status == Ref::kNone) {
        status = Ref::kTentative;
        hits = 0;
      }
      ++hits;
      misses = 0;
      if (status == Ref::kTentative && hits >= create) status = Ref::kConfirmed;
      return;
    }
    if (status == Ref::kNone) return;
    hits = 0;
    if (++misses >= remove) {
      status = Ref::kNone;
      ++deletions;
    }
  }
};

Ref observed(const Tracker& t) {
  if (t.tracks().empty()) return Ref::kNone;
  REQUIRE(t.tracks().size() == 1);
  return t.tracks()[0].status == TrackStatus::kConfirmed ? Ref::kConfirmed : Ref::kTentative;
}

}  // namespace

TEST_CASE("tracker: 4 consecutive detections confirm") {
  Tracker t(default_params());
  for (int i = 0; i < 3; ++i) {
    hit(t, at(1000, 500, 40));
    CHECK(t.tracks()[0].status == TrackStatus::kTentative);
  }
  hit(t, at(1000, 500, 40));
  CHECK(t.tracks()[0].status == TrackStatus::kConfirmed);
}

TEST_CASE("tracker: 39 misses then a hit keeps the track; 40 misses delete it") {
  Tracker t(default_params());
  for (int i = 0; i < 4; ++i) hit(t, at(1000, 500, 40));
  for (int i = 0; i < 39; ++i) miss(t);
  REQUIRE(t.tracks().size() == 1);
  CHECK(t.tracks()[0].consecutive_misses == 39);
  hit(t, at(1000, 500, 40));
  REQUIRE(t.tracks().size() == 1);
  CHECK(t.tracks()[0].status == TrackStatus::kConfirmed);
  CHECK(t.tracks()[0].consecutive_misses == 0);
  for (int i = 0; i < 39; ++i) miss(t);
  CHECK(t.tracks().size() == 1);
  miss(t);
  CHECK(t.tracks().empty());
  CHECK(t.deleted_count() == 1);
}

TEST_CASE("tracker: a frame without detections adds exactly one miss to every track") {
  Tracker t(default_params());
  const Measurement two[] = {at(300, 500, 40), at(1500, 500, 40)};
  t.update(two, kDt);
  hit(t, at(300, 500, 40));
  std::vector<int> before;
  for (const auto& tr : t.tracks()) before.push_back(tr.consecutive_misses);
  miss(t);
  REQUIRE(t.tracks().size() == before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(t.tracks()[i].consecutive_misses == before[i] + 1);
  }
}

TEST_CASE("tracker: detections below the threshold are ignored") {
  Tracker t(default_params());
  hit(t, at(1000, 500, 40, 0.39));
  CHECK(t.tracks().empty());
  hit(t, at(1000, 500, 40, 0.4));
  CHECK(t.tracks().size() == 1);
}

TEST_CASE("property: lifecycle equals the reference automaton on 10000 sequences") {
  Rng rng(2024);
  for (int seq = 0; seq < 10000; ++seq) {
    Tracker t(default_params());
    RefAutomaton ref;
    // Runs of hits and misses with lengths that straddle both thresholds.
    int frames = 0;
    bool h = rng.uniform() < 0.5;
    while (frames < 160) {
      const int len = 1 + static_cast<int>(rng.uniform() * (h ? 6 : 45));
      for (int i = 0; i < len; ++i, ++frames) {
        if (h) {
          hit(t, at(1000, 500, 40));
        } else {
          miss(t);
        }
        ref.step(h);
        REQUIRE(observed(t) == ref.status);
        if (ref.status != Ref::kNone) {
          REQUIRE(t.tracks()[0].consecutive_misses == ref.misses);
        }
      }
      h = !h;
    }
    REQUIRE(t.deleted_count() == ref.deletions);
  }
}

TEST_CASE("property: 50 misses on a confirmed track delete it at the 40th") {
  Tracker t(default_params());
  for (int i = 0; i < 10; ++i) hit(t, at(1000, 500, 40));
  for (int i = 1; i <= 50; ++i) {
    miss(t);
    CHECK(t.has_confirmed() == (i < 40));
  }
  CHECK(t.deleted_count() == 1);
}

TEST_CASE("tracker: stationary target velocity converges") {
  Tracker t(default_params());
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    hit(t, at(1000 + 2.0 * rng.normal(), 500 + 2.0 * rng.normal(), 40 + 2.0 * rng.normal()));
  }
  const auto& s = t.tracks()[0].state;
  CHECK(std::abs(s(3)) < 0.5);
  CHECK(std::abs(s(4)) < 0.5);
  CHECK(std::abs(s(5)) < 0.5);
}

// Per-axis RMS after convergence. Single frames can exceed 2 px: the
// measurement noise alone is 2 px per axis.
TEST_CASE("tracker: constant-velocity target is followed within 2 px RMS") {
  double se_u = 0.0;
  double se_v = 0.0;
  double bias_u = 0.0;
  int n = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Tracker t(default_params());
    Rng rng(seed);
    for (int k = 0; k < 120; ++k) {
      const double u = 600 + 3.0 * k;
      const double v = 500 - 1.0 * k;
      hit(t, at(u + 2.0 * rng.normal(), v + 2.0 * rng.normal(), 40 + 0.5 * k));
      if (k < 40) continue;
      const auto& tr = t.tracks()[0];
      REQUIRE(t.tracks().size() == 1);
      se_u += (tr.u() - u) * (tr.u() - u);
      se_v += (tr.v() - v) * (tr.v() - v);
      bias_u += tr.u() - u;
      ++n;
    }
  }
  CHECK(std::sqrt(se_u / n) < 2.0);
  CHECK(std::sqrt(se_v / n) < 2.0);
  CHECK(std::abs(bias_u / n) < 0.5);
}

TEST_CASE("property: covariance stays PSD over 10^4 steps") {
  Tracker t(default_params());
  Rng rng(10);
  double worst = 1.0;
  for (int k = 0; k < 10000; ++k) {
    if (rng.uniform() < 0.7) {
      hit(t, at(960 + 100 * std::sin(k * 0.01) + rng.normal(), 500 + rng.normal(), 40 + rng.normal()));
    } else {
      miss(t);
    }
    for (const auto& tr : t.tracks()) {
      const double e = min_eigenvalue(tr.covariance);
      worst = std::min(worst, e);
      REQUIRE(e > -1e-9);
      REQUIRE((tr.covariance - tr.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  CHECK(worst > -1e-9);
}

TEST_CASE("enforce_psd rejects indefinite matrices") {
  TrackCovariance p = TrackCovariance::Identity();
  p(0, 0) = -1.0;
  CHECK_THROWS_AS(enforce_psd(p), Error);
  TrackCovariance q = TrackCovariance::Identity();
  q(0, 1) = 0.25;
  enforce_psd(q);
  CHECK(q(1, 0) == doctest::Approx(0.125));
}

TEST_CASE("distance estimators") {
  WorldGeometry g;
  g.stop_line_s = 80.0;
  GpsPose gps{60.0, 0.0, 0.0};
  CHECK(estimate_distance_map(gps, g) == 20.0);
  const auto hook = make_gps_offset_hook(5.0);
  CHECK(estimate_distance_map(hook.transform(gps), g) == 15.0);

  PipelineConfig cfg;
  CHECK(estimate_distance_pinhole(50.0, cfg) == doctest::Approx(15.0).epsilon(1e-15));
  CHECK_THROWS_AS(estimate_distance_pinhole(0.0, cfg), Error);
  CHECK_THROWS_AS(estimate_distance_pinhole(-3.0, cfg), Error);
}

TEST_CASE("fuse: variant semantics") {
  PipelineConfig cfg;
  Tracker none(default_params());
  for (auto v : {PipelineVariant::kMap, PipelineVariant::kPinhole, PipelineVariant::kFusion}) {
    const auto est = fuse(none, 20.0, v, cfg);
    CHECK_FALSE(est.tracked);
    CHECK_FALSE(est.distance);
  }

  Tracker live(default_params());
  for (int i = 0; i < 4; ++i) hit(live, at(1000, 500, 50));
  const auto map = fuse(live, 20.0, PipelineVariant::kMap, cfg);
  CHECK(map.tracked);
  CHECK(*map.distance == 20.0);
  CHECK(map.source == DistanceSource::kMap);

  const auto pin = fuse(live, 20.0, PipelineVariant::kPinhole, cfg, 1.5);
  CHECK(pin.tracked);
  CHECK(*pin.distance == doctest::Approx(16.5).epsilon(1e-3));
  CHECK(pin.source == DistanceSource::kVisionPinhole);

  const auto fused = fuse(live, 20.0, PipelineVariant::kFusion, cfg);
  CHECK(*fused.distance == 20.0);
  const auto fallback = fuse(live, std::nullopt, PipelineVariant::kFusion, cfg);
  CHECK(fallback.tracked);
  CHECK(*fallback.distance == doctest::Approx(15.0).epsilon(1e-3));

  // Map variant with the vision track deleted: the map still knows the
  // distance, but the sign is not tracked.
  for (int i = 0; i < 40; ++i) miss(live);
  const auto lost = fuse(live, 20.0, PipelineVariant::kMap, cfg);
  CHECK_FALSE(lost.tracked);
}

TEST_CASE("map sign measurement follows the reported pose") {
  PipelineConfig cfg;
  WorldGeometry g;
  g.stop_line_s = g.sign_s = 100.0;
  const auto m = map_sign_measurement({85.0, 0, 0}, g, cfg);
  REQUIRE(m);
  CHECK(m->source == MeasurementSource::kMap);
  CHECK(m->pixels.h == doctest::Approx(50.0));
  CHECK_FALSE(map_sign_measurement({30.0, 0, 0}, g, cfg));
}
