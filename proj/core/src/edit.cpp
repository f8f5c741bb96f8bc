// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/edit.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparsecue/error.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector3d;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

struct ArmChain {
  int shoulder;
  int elbow;
  int hand;
};

ArmChain arm_chain(const Skeleton& sk, Side side) {
  const int elbow = sk.slot_joint(side == Side::kLeft ? CueSlot::kLeftElbow : CueSlot::kRightElbow);
  const int hand = sk.slot_joint(side == Side::kLeft ? CueSlot::kLeftHand : CueSlot::kRightHand);
  const int shoulder = sk.parents()[elbow];
  if (shoulder < 0) throw ValidationError("arm edit: elbow joint has no parent");
  return {shoulder, elbow, hand};
}

// Horizontal body forward, from the hips' left-right axis crossed with up.
Vector3d forward_axis(const MotionSequence& m, int frame) {
  const Skeleton& sk = m.skeleton();
  const int lhip = sk.parents()[sk.slot_joint(CueSlot::kLeftKnee)];
  const int rhip = sk.parents()[sk.slot_joint(CueSlot::kRightKnee)];
  Vector3d across = m.joint(frame, lhip) - m.joint(frame, rhip);
  across.y() = 0.0;
  if (across.norm() < 1e-12) return Vector3d::UnitZ();
  return across.normalized().cross(Vector3d::UnitY());
}

Vector3d lateral_axis(const Vector3d& forward, Side side) {
  const Vector3d left = Vector3d::UnitY().cross(forward);
  return side == Side::kLeft ? left : Vector3d(-left);
}

}  // namespace

MotionSequence edit_root_vertical(const MotionSequence& motion, double scale) {
  if (!(scale > 0.0)) throw ValidationError("edit_root_vertical: scale must be positive");
  const int root = motion.skeleton().root();
  const int joints = motion.num_joints();
  double floor_y = std::numeric_limits<double>::infinity();
  for (int n = 0; n < motion.num_frames(); ++n) floor_y = std::min(floor_y, motion.joint(n, root).y());

  std::vector<double> out(motion.data().begin(), motion.data().end());
  for (int n = 0; n < motion.num_frames(); ++n) {
    const double offset = motion.joint(n, root).y() - floor_y;
    const double shift = (scale - 1.0) * offset;
    for (int j = 0; j < joints; ++j) out[(static_cast<std::size_t>(n) * joints + j) * 3 + 1] += shift;
  }
  return MotionSequence(motion.skeleton(), motion.fps(), std::move(out));
}

double arm_forward_angle(const MotionSequence& motion, int frame, Side side) {
  const ArmChain arm = arm_chain(motion.skeleton(), side);
  const Vector3d fwd = forward_axis(motion, frame);
  Vector3d dir = motion.joint(frame, arm.hand) - motion.joint(frame, arm.shoulder);
  dir.y() = 0.0;
  if (dir.norm() < 1e-9) return std::numeric_limits<double>::quiet_NaN();
  return std::atan2(dir.dot(lateral_axis(fwd, side)), dir.dot(fwd)) * kRadToDeg;
}

MotionSequence edit_arm_spread(const MotionSequence& motion, double angle_deg) {
  if (!(std::abs(angle_deg) <= 180.0)) {
    throw ValidationError("edit_arm_spread: |angle| must be at most 180 degrees");
  }
  const int joints = motion.num_joints();
  std::vector<double> out(motion.data().begin(), motion.data().end());
  for (Side side : {Side::kLeft, Side::kRight}) {
    const ArmChain arm = arm_chain(motion.skeleton(), side);
    const double sign = side == Side::kLeft ? 1.0 : -1.0;
    for (int n = 0; n < motion.num_frames(); ++n) {
      const double current = arm_forward_angle(motion, n, side);
      if (std::isnan(current)) continue;
      const double delta = (angle_deg - current) / kRadToDeg;
      const Eigen::Matrix3d rot = Eigen::AngleAxisd(sign * delta, Vector3d::UnitY()).toRotationMatrix();
      const Vector3d pivot = motion.joint(n, arm.shoulder);
      for (int j : {arm.elbow, arm.hand}) {
        const Vector3d p = pivot + rot * (motion.joint(n, j) - pivot);
        double* dst = &out[(static_cast<std::size_t>(n) * joints + j) * 3];
        dst[0] = p.x();
        dst[1] = p.y();
        dst[2] = p.z();
      }
    }
  }
  return MotionSequence(motion.skeleton(), motion.fps(), std::move(out));
}

}  // namespace sparsecue
