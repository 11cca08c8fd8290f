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

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "semgap/scenario.hpp"
#include "semgap/sensing.hpp"
#include "semgap/world.hpp"

namespace semgap {

enum class TrackStatus { kTentative, kConfirmed, kDeleted };

std::string_view to_string(TrackStatus s);

enum class MeasurementSource { kVision, kMap };

struct Measurement {
  PixelObservation pixels;
  double confidence = 1.0;
  MeasurementSource source = MeasurementSource::kVision;
};

using TrackState = Eigen::Matrix<double, 6, 1>;       // u, v, h, du, dv, dh (px, px/frame)
using TrackCovariance = Eigen::Matrix<double, 6, 6>;

struct Track {
  int id = 0;
  TrackState state = TrackState::Zero();
  TrackCovariance covariance = TrackCovariance::Identity();
  int consecutive_hits = 0;
  int consecutive_misses = 0;
  int total_hits = 0;
  TrackStatus status = TrackStatus::kTentative;
  bool vision_hit = false;  // updated by a camera measurement this frame

  double u() const { return state(0); }
  double v() const { return state(1); }
  double h() const { return state(2); }
};

struct TrackerParams {
  double perception_hz = 20.0;
  double detection_threshold = 0.4;
  double gate_px = 50.0;
  double measurement_sigma_px = 2.0;
  double process_sigma_px = 1.0;
  double initial_velocity_sigma = 10.0;
  int create_frames = 4;
  int delete_frames = 40;
  bool create_requires_consecutive = true;

  static TrackerParams from(const PipelineConfig& cfg, double threshold);
};

// Constant-velocity Kalman tracker in image space with nearest-neighbor
// association. kf_step and manage_tracks are split so the lifecycle can be
// tested on its own; update() runs both.
class Tracker {
 public:
  explicit Tracker(TrackerParams params);

  // Predict, associate (Euclidean u/v distance within the gate, greedy by
  // distance), update, count misses and spawn tentative tracks from
  // unmatched detections at or above the threshold. `dt` is in seconds.
  void kf_step(std::span<const Measurement> detections, double dt);

  // Tentative -> Confirmed at create_frames hits; any -> Deleted at
  // delete_frames consecutive misses. Deleted tracks leave the active set.
  void manage_tracks();

  void update(std::span<const Measurement> detections, double dt) {
    kf_step(detections, dt);
    manage_tracks();
  }

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerParams& params() const { return params_; }
  int deleted_count() const { return deleted_; }

  bool has_confirmed() const;
  // The confirmed track with the freshest update (fewest consecutive misses,
  // then lowest id); nullptr when none is confirmed.
  const Track* best_confirmed() const;

 private:
  TrackerParams params_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  int deleted_ = 0;
};

// Symmetrizes `p` and throws kNumeric if its smallest eigenvalue is below
// -1e-9.
void enforce_psd(TrackCovariance& p);
double min_eigenvalue(const TrackCovariance& p);

struct GpsPose {
  double s = 0.0;
  double lateral = 0.0;
  double heading = 0.0;

  bool operator==(const GpsPose&) const = default;
};

enum class DistanceSource { kVisionPinhole, kMap, kFused };

std::string_view to_string(DistanceSource s);

struct FusedSignEstimate {
  bool tracked = false;
  std::optional<double> distance;
  DistanceSource source = DistanceSource::kMap;
};

// Stop-line distance from the (possibly spoofed) GPS position.
double estimate_distance_map(const GpsPose& gps, const WorldGeometry& geometry);

// d = f * H / h. Throws kInvalidArgument when h_px <= 0.
double estimate_distance_pinhole(double h_px, const PipelineConfig& config);

// Map: liveness from the vision track, distance from the map.
// Pinhole: both from the vision track.
// Fusion: the map's static sign is already injected into the tracker as a
// measurement, so liveness comes from the fused track and distance from the
// map. Vision distances are to the sign; `sign_to_line` converts them to the
// stop line.
FusedSignEstimate fuse(const Tracker& tracker, std::optional<double> map_distance,
                       PipelineVariant variant, const PipelineConfig& config,
                       double sign_to_line = 0.0);

// Synthetic measurement the HD map contributes for the Fusion variant:
// the sign projected from the reported pose, or nothing when out of range.
std::optional<Measurement> map_sign_measurement(const GpsPose& gps, const WorldGeometry& geometry,
                                                const PipelineConfig& config);

}  // namespace semgap
