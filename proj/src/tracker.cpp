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

#include "semgap/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "semgap/error.hpp"

namespace semgap {

std::string_view to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::kTentative: return "tentative";
    case TrackStatus::kConfirmed: return "confirmed";
    case TrackStatus::kDeleted: return "deleted";
  }
  return "?";
}

std::string_view to_string(DistanceSource s) {
  switch (s) {
    case DistanceSource::kVisionPinhole: return "vision-pinhole";
    case DistanceSource::kMap: return "map";
    case DistanceSource::kFused: return "fused";
  }
  return "?";
}

TrackerParams TrackerParams::from(const PipelineConfig& cfg, double threshold) {
  TrackerParams p;
  p.perception_hz = cfg.perception_hz;
  p.detection_threshold = threshold;
  p.gate_px = cfg.gate_px;
  p.measurement_sigma_px = cfg.measurement_sigma_px;
  p.process_sigma_px = cfg.process_sigma_px;
  p.create_frames = cfg.track_create_frames;
  p.delete_frames = cfg.track_delete_frames;
  p.create_requires_consecutive = cfg.create_requires_consecutive;
  return p;
}

double min_eigenvalue(const TrackCovariance& p) {
  Eigen::SelfAdjointEigenSolver<TrackCovariance> solver(p, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void enforce_psd(TrackCovariance& p) {
  p = 0.5 * (p + p.transpose());
  if (!p.allFinite() || min_eigenvalue(p) < -1e-9) {
    fail(ErrorCode::kNumeric, "track covariance lost positive semi-definiteness");
  }
}

Tracker::Tracker(TrackerParams params) : params_(params) {}

void Tracker::kf_step(std::span<const Measurement> detections, double dt) {
  const double frames = dt * params_.perception_hz;
  using Mat6 = TrackCovariance;
  Mat6 F = Mat6::Identity();
  F.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity() * frames;

  // White-acceleration process noise, per axis.
  const double q = params_.process_sigma_px * params_.process_sigma_px;
  const double t2 = frames * frames;
  Mat6 Q = Mat6::Zero();
  Q.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity() * (t2 * t2 / 4.0 * q);
  Q.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity() * (t2 * frames / 2.0 * q);
  Q.block<3, 3>(3, 0) = Eigen::Matrix3d::Identity() * (t2 * frames / 2.0 * q);
  Q.block<3, 3>(3, 3) = Eigen::Matrix3d::Identity() * (t2 * q);

  for (auto& t : tracks_) {
    t.state = F * t.state;
    t.covariance = F * t.covariance * F.transpose() + Q;
    t.vision_hit = false;
  }

  std::vector<size_t> usable;
  for (size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].confidence >= params_.detection_threshold) usable.push_back(i);
  }

  // Greedy nearest-neighbor: all gated pairs by ascending distance, ties by
  // track then detection index.
  std::vector<std::tuple<double, size_t, size_t>> pairs;
  for (size_t ti = 0; ti < tracks_.size(); ++ti) {
    for (size_t di : usable) {
      const auto& px = detections[di].pixels;
      double du = px.u - tracks_[ti].u();
      double dv = px.v - tracks_[ti].v();
      double dist = std::hypot(du, dv);
      if (dist <= params_.gate_px) pairs.emplace_back(dist, ti, di);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> track_match(tracks_.size(), -1);
  std::vector<bool> det_used(detections.size(), false);
  for (const auto& [dist, ti, di] : pairs) {
    if (track_match[ti] >= 0 || det_used[di]) continue;
    track_match[ti] = static_cast<int>(di);
    det_used[di] = true;
  }

  Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
  H.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
  const double r = params_.measurement_sigma_px * params_.measurement_sigma_px;
  const Eigen::Matrix3d R = Eigen::Matrix3d::Identity() * r;

  for (size_t ti = 0; ti < tracks_.size(); ++ti) {
    Track& t = tracks_[ti];
    if (track_match[ti] < 0) {
      ++t.consecutive_misses;
      if (params_.create_requires_consecutive) t.consecutive_hits = 0;
      continue;
    }
    const Measurement& m = detections[static_cast<size_t>(track_match[ti])];
    Eigen::Vector3d z(m.pixels.u, m.pixels.v, m.pixels.h);
    Eigen::Vector3d y = z - H * t.state;
    Eigen::Matrix3d S = H * t.covariance * H.transpose() + R;
    Eigen::Matrix<double, 6, 3> K = t.covariance * H.transpose() * S.inverse();
    t.state += K * y;
    // Joseph form keeps the update symmetric positive semi-definite.
    Mat6 I_KH = Mat6::Identity() - K * H;
    t.covariance = I_KH * t.covariance * I_KH.transpose() + K * R * K.transpose();
    enforce_psd(t.covariance);
    ++t.consecutive_hits;
    ++t.total_hits;
    t.consecutive_misses = 0;
    t.vision_hit = m.source == MeasurementSource::kVision;
  }

  for (size_t di : usable) {
    if (det_used[di]) continue;
    const Measurement& m = detections[di];
    Track t;
    t.id = next_id_++;
    t.state << m.pixels.u, m.pixels.v, m.pixels.h, 0.0, 0.0, 0.0;
    t.covariance = TrackCovariance::Zero();
    t.covariance.diagonal() << r, r, r, 0.0, 0.0, 0.0;
    const double vs = params_.initial_velocity_sigma * params_.initial_velocity_sigma;
    t.covariance(3, 3) = t.covariance(4, 4) = t.covariance(5, 5) = vs;
    t.consecutive_hits = 1;
    t.total_hits = 1;
    t.vision_hit = m.source == MeasurementSource::kVision;
    tracks_.push_back(t);
  }
}

void Tracker::manage_tracks() {
  for (auto& t : tracks_) {
    const int hits = params_.create_requires_consecutive ? t.consecutive_hits : t.total_hits;
    if (t.status == TrackStatus::kTentative && hits >= params_.create_frames) {
      t.status = TrackStatus::kConfirmed;
    }
    if (t.consecutive_misses >= params_.delete_frames) t.status = TrackStatus::kDeleted;
  }
  auto dead = std::remove_if(tracks_.begin(), tracks_.end(),
                             [](const Track& t) { return t.status == TrackStatus::kDeleted; });
  deleted_ += static_cast<int>(std::distance(dead, tracks_.end()));
  tracks_.erase(dead, tracks_.end());
}

bool Tracker::has_confirmed() const {
  return std::any_of(tracks_.begin(), tracks_.end(),
                     [](const Track& t) { return t.status == TrackStatus::kConfirmed; });
}

const Track* Tracker::best_confirmed() const {
  const Track* best = nullptr;
  for (const auto& t : tracks_) {
    if (t.status != TrackStatus::kConfirmed) continue;
    if (best == nullptr || t.consecutive_misses < best->consecutive_misses) best = &t;
  }
  return best;
}

double estimate_distance_map(const GpsPose& gps, const WorldGeometry& geometry) {
  return geometry.stop_line_s - gps.s;
}

double estimate_distance_pinhole(double h_px, const PipelineConfig& config) {
  if (!(h_px > 0)) {
    fail(ErrorCode::kInvalidArgument, "pinhole distance needs a positive pixel height");
  }
  return config.focal_length * config.sign_height / h_px;
}

FusedSignEstimate fuse(const Tracker& tracker, std::optional<double> map_distance,
                       PipelineVariant variant, const PipelineConfig& config,
                       double sign_to_line) {
  FusedSignEstimate est;
  const Track* best = tracker.best_confirmed();
  if (best == nullptr) {
    est.source = variant == PipelineVariant::kPinhole ? DistanceSource::kVisionPinhole
                 : variant == PipelineVariant::kMap   ? DistanceSource::kMap
                                                      : DistanceSource::kFused;
    return est;
  }
  switch (variant) {
    case PipelineVariant::kMap:
      est.source = DistanceSource::kMap;
      est.tracked = map_distance.has_value();
      est.distance = map_distance;
      break;
    case PipelineVariant::kPinhole:
      est.source = DistanceSource::kVisionPinhole;
      // A coasting track can extrapolate to a non-physical size.
      if (best->h() > 0) {
        est.tracked = true;
        est.distance = estimate_distance_pinhole(best->h(), config) + sign_to_line;
      }
      break;
    case PipelineVariant::kFusion:
      est.source = DistanceSource::kFused;
      if (map_distance) {
        est.tracked = true;
        est.distance = map_distance;
      } else if (best->h() > 0) {
        est.tracked = true;
        est.distance = estimate_distance_pinhole(best->h(), config) + sign_to_line;
      }
      break;
  }
  return est;
}

std::optional<Measurement> map_sign_measurement(const GpsPose& gps, const WorldGeometry& geometry,
                                                const PipelineConfig& config) {
  VehicleState reported{gps.s, gps.lateral, gps.heading, 0.0};
  auto px = project_sign(reported, geometry, config);
  if (!px) return std::nullopt;
  return Measurement{*px, 1.0, MeasurementSource::kMap};
}

}  // namespace semgap
