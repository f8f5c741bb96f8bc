// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/projection.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sparsecue/error.hpp"
#include "sparsecue/rng.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::Quaterniond look_at(const Vector3d& eye, const Vector3d& target) {
  const Vector3d forward = (target - eye).normalized();
  Vector3d up = Vector3d::UnitY();
  if (up.cross(forward).norm() < 1e-6) up = Vector3d::UnitZ();
  const Vector3d right = up.cross(forward).normalized();
  const Vector3d cam_up = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = cam_up;
  r.col(2) = forward;
  return Eigen::Quaterniond(r).normalized();
}

void check_range(const std::array<double, 2>& r, const char* what) {
  if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || r[0] > r[1]) {
    throw ValidationError(std::string("camera ranges: ") + what + " must satisfy lo <= hi");
  }
}

double draw(Engine& eng, const std::array<double, 2>& r) {
  return std::uniform_real_distribution<double>(r[0], r[1])(eng);
}

constexpr std::array<int, 4> kArmSlots = {slot_index(CueSlot::kLeftElbow), slot_index(CueSlot::kRightElbow),
                                          slot_index(CueSlot::kLeftHand), slot_index(CueSlot::kRightHand)};
constexpr std::array<int, 4> kLegSlots = {slot_index(CueSlot::kLeftKnee), slot_index(CueSlot::kRightKnee),
                                          slot_index(CueSlot::kLeftFoot), slot_index(CueSlot::kRightFoot)};

}  // namespace

void CameraTrack::validate() const {
  if (!(focal > 0.0)) throw ValidationError("camera: focal must be positive");
  if (!(fps > 0.0)) throw ValidationError("camera: fps must be positive");
  if (positions.size() != orientations.size()) {
    throw ValidationError("camera: positions and orientations differ in length");
  }
  for (std::size_t i = 0; i < orientations.size(); ++i) {
    if (std::abs(orientations[i].norm() - 1.0) > 1e-9) {
      throw ValidationError("camera: orientation at frame " + std::to_string(i) + " is not unit length");
    }
    if (!positions[i].allFinite()) {
      throw ValidationError("camera: non-finite position at frame " + std::to_string(i));
    }
  }
}

Vector3d CameraTrack::to_camera(int frame, const Vector3d& world) const {
  return orientations[frame].toRotationMatrix().transpose() * (world - positions[frame]);
}

void CameraRanges::validate() const {
  check_range(azimuth_deg, "azimuth");
  check_range(elevation_deg, "elevation");
  check_range(distance, "distance");
  if (!(distance[0] > 0.0)) throw ValidationError("camera ranges: distance must be positive");
  if (elevation_deg[0] < -89.0 || elevation_deg[1] > 89.0) {
    throw ValidationError("camera ranges: elevation must lie within [-89, 89] degrees");
  }
  if (!(drift_speed >= 0.0)) throw ValidationError("camera ranges: drift speed must be non-negative");
  if (!(focal > 0.0)) throw ValidationError("camera ranges: focal must be positive");
}

CameraTrack sample_camera(int num_frames, double fps, std::uint64_t seed, const CameraRanges& ranges,
                          const Vector3d& centroid) {
  if (num_frames < 2) throw ValidationError("sample_camera: need at least 2 frames");
  if (!(fps > 0.0)) throw ValidationError("sample_camera: fps must be positive");
  ranges.validate();

  Engine eng = make_engine(seed, "camera");
  const double az = draw(eng, ranges.azimuth_deg) * kDeg;
  const double el = draw(eng, ranges.elevation_deg) * kDeg;
  const double radius = draw(eng, ranges.distance);
  const double speed = std::uniform_real_distribution<double>(0.0, ranges.drift_speed)(eng);
  const double heading = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(eng);

  Vector3d dir(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
  // Tangent basis at the start point; the drift keeps a fixed heading in it.
  Vector3d east = Vector3d::UnitY().cross(dir);
  if (east.norm() < 1e-9) east = Vector3d::UnitX();
  east.normalize();
  const Vector3d north = dir.cross(east);
  Vector3d velocity = speed * (std::cos(heading) * east + std::sin(heading) * north);

  CameraTrack track;
  track.fps = fps;
  track.focal = ranges.focal;
  track.positions.reserve(num_frames);
  track.orientations.reserve(num_frames);
  for (int n = 0; n < num_frames; ++n) {
    const Vector3d pos = centroid + radius * dir;
    track.positions.push_back(pos);
    track.orientations.push_back(look_at(pos, centroid));
    if (speed > 0.0) {
      // Tangent step then radial projection back onto the sphere; the
      // projection never lengthens the step.
      velocity -= velocity.dot(dir) * dir;
      if (velocity.norm() > 0.0) velocity *= speed / velocity.norm();
      dir = (radius * dir + velocity / fps).normalized();
    }
  }
  return track;
}

Vector3d motion_centroid(const MotionSequence& motion) {
  Vector3d sum = Vector3d::Zero();
  for (int n = 0; n < motion.num_frames(); ++n) {
    for (int j = 0; j < motion.num_joints(); ++j) sum += motion.joint(n, j);
  }
  return sum / (static_cast<double>(motion.num_frames()) * motion.num_joints());
}

std::vector<std::array<Vector2d, kNumSlots>> project_slots(const MotionSequence& motion,
                                                           const CameraTrack& cam) {
  cam.validate();
  if (cam.num_frames() != motion.num_frames()) {
    throw ValidationError("project: camera has " + std::to_string(cam.num_frames()) +
                          " frames, motion has " + std::to_string(motion.num_frames()));
  }
  const auto& slots = motion.skeleton().cue_slots();
  std::vector<std::array<Vector2d, kNumSlots>> out(motion.num_frames());
  for (int n = 0; n < motion.num_frames(); ++n) {
    const Eigen::Matrix3d world_to_cam = cam.orientations[n].toRotationMatrix().transpose();
    for (int s = 0; s < kNumSlots; ++s) {
      const Vector3d pc = world_to_cam * (motion.joint(n, slots[s]) - cam.positions[n]);
      if (!(pc.z() > 0.0)) {
        throw ValidationError("project: cue slot '" + std::string(slot_names()[s]) +
                              "' is behind the camera at frame " + std::to_string(n));
      }
      out[n][s] = cam.focal * Vector2d(pc.x() / pc.z(), pc.y() / pc.z());
    }
  }
  return out;
}

SparseCue2D project(const MotionSequence& motion, const CameraTrack& cam) {
  const auto image = project_slots(motion, cam);
  SparseCue2D cues(motion.fps(), motion.num_frames());
  for (int n = 0; n < motion.num_frames(); ++n) {
    for (int s = 0; s < kNumSlots; ++s) {
      cues.set(n, s, image[n][s] - image[n][0]);
      cues.set_valid(n, s, true);
    }
  }
  normalize_global(cues);
  return cues;
}

AugmentConfig AugmentConfig::disabled() {
  AugmentConfig c;
  c.enable_scale = c.enable_rotate = c.enable_noise = false;
  return c;
}

void AugmentConfig::validate() const {
  if (!(limb_scale_range[0] > 0.0) || !(limb_scale_range[0] <= limb_scale_range[1])) {
    throw ValidationError("augment: limb scale range must satisfy 0 < lo <= hi");
  }
  if (!std::isfinite(rotation_range_deg[0]) || !std::isfinite(rotation_range_deg[1]) ||
      rotation_range_deg[0] > rotation_range_deg[1]) {
    throw ValidationError("augment: rotation range must satisfy lo <= hi");
  }
  if (!(noise_sigma >= 0.0)) throw ValidationError("augment: noise sigma must be non-negative");
}

SparseCue2D augment(const SparseCue2D& cues, const AugmentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (!cfg.any_enabled()) return cues;

  Engine eng = make_engine(seed, "augment");
  // Draw every scalar up front so toggling one augmentation leaves the others' draws unchanged.
  const double arm_scale = draw(eng, cfg.limb_scale_range);
  const double leg_scale = draw(eng, cfg.limb_scale_range);
  const double angle = draw(eng, cfg.rotation_range_deg) * kDeg;

  SparseCue2D out = cues;
  const int frames = out.num_frames();
  if (cfg.enable_scale) {
    for (int n = 0; n < frames; ++n) {
      for (int s : kArmSlots) out.set(n, s, out.at(n, s) * arm_scale);
      for (int s : kLegSlots) out.set(n, s, out.at(n, s) * leg_scale);
    }
  }
  if (cfg.enable_rotate) {
    const Eigen::Rotation2Dd rot(angle);
    for (int n = 0; n < frames; ++n) {
      for (int s = 1; s < kNumSlots; ++s) out.set(n, s, rot * out.at(n, s));
    }
  }
  if (cfg.enable_noise && cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (int n = 0; n < frames; ++n) {
      for (int s = 1; s < kNumSlots; ++s) {
        if (!out.valid(n, s)) continue;
        const double dx = noise(eng);
        const double dy = noise(eng);
        out.set(n, s, out.at(n, s) + Vector2d(dx, dy));
      }
    }
  }
  normalize_global(out);
  return out;
}

}  // namespace sparsecue
