// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <vector>

#include "sparsecue/motion.hpp"

namespace sparsecue {

/// Per-frame pinhole cameras. Orientation maps camera axes to world axes;
/// the camera looks down its +z axis with +x right and +y up. Image
/// coordinates are normalized with the principal point at the origin.
struct CameraTrack {
  double fps = 0.0;
  double focal = 1.0;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Quaterniond> orientations;

  int num_frames() const { return static_cast<int>(positions.size()); }
  /// Throws ValidationError on a non-unit quaternion, focal <= 0 or a length mismatch.
  void validate() const;
  Eigen::Vector3d to_camera(int frame, const Eigen::Vector3d& world) const;
};

struct CameraRanges {
  std::array<double, 2> azimuth_deg{0.0, 360.0};
  std::array<double, 2> elevation_deg{-10.0, 30.0};
  std::array<double, 2> distance{2.0, 6.0};
  double drift_speed = 0.5;  // m/s
  double focal = 1.0;

  void validate() const;
};

/// Random viewpoint on a sphere around `centroid`, drifting along the sphere
/// at a constant random speed in [0, drift_speed], always aimed at the centroid.
CameraTrack sample_camera(int num_frames, double fps, std::uint64_t seed,
                          const CameraRanges& ranges = {},
                          const Eigen::Vector3d& centroid = Eigen::Vector3d::Zero());

/// Mean position over all joints and frames.
Eigen::Vector3d motion_centroid(const MotionSequence& motion);

/// Image-plane coordinates (u, v) = f * (x, y) / z of every cue slot, N x 10.
/// Throws ValidationError naming the frame and slot of any joint at z <= 0.
std::vector<std::array<Eigen::Vector2d, kNumSlots>> project_slots(const MotionSequence& motion,
                                                                  const CameraTrack& cam);

/// Projected, root-anchored and globally normalized 2D cues.
SparseCue2D project(const MotionSequence& motion, const CameraTrack& cam);

struct AugmentConfig {
  std::array<double, 2> limb_scale_range{0.7, 1.3};
  std::array<double, 2> rotation_range_deg{-20.0, 20.0};
  double noise_sigma = 0.01;
  bool enable_scale = true;
  bool enable_rotate = true;
  bool enable_noise = true;

  static AugmentConfig disabled();
  bool any_enabled() const { return enable_scale || enable_rotate || enable_noise; }
  void validate() const;
};

/// Symmetric limb scaling, then in-plane rotation, then Gaussian noise, then
/// re-normalization. Invalid slots stay zero.
SparseCue2D augment(const SparseCue2D& cues, const AugmentConfig& cfg, std::uint64_t seed);

}  // namespace sparsecue
