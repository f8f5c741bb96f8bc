// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sparsecue/motion.hpp"

namespace sparsecue {

enum class Side { kLeft, kRight };

/// Multiplies the per-frame root height above the clip's lowest root height
/// by `scale`; every joint follows its root rigidly.
MotionSequence edit_root_vertical(const MotionSequence& motion, double scale);

/// Horizontal angle in degrees between the shoulder-to-hand direction and the
/// body forward axis, positive toward the arm's own side. Returns NaN when
/// the arm points straight up or down.
double arm_forward_angle(const MotionSequence& motion, int frame, Side side);

/// Rotates elbow and hand of both arms about the vertical axis through the
/// shoulder so that arm_forward_angle equals `angle_deg` in every frame.
MotionSequence edit_arm_spread(const MotionSequence& motion, double angle_deg);

}  // namespace sparsecue
