// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparsecue/error.hpp"
#include "sparsecue/rng.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector3d;
using std::numbers::pi;

constexpr double kDeg = pi / 180.0;

// Humanoid22 joint indices.
enum J : int {
  kPelvis = 0, kLHip, kRHip, kSpine1, kLKnee, kRKnee, kSpine2, kLAnkle, kRAnkle, kSpine3,
  kLFoot, kRFoot, kNeck, kLCollar, kRCollar, kHead, kLShoulder, kRShoulder, kLElbow,
  kRElbow, kLWrist, kRWrist, kJointCount
};

// Walk swing: the foot lifts in place, travels during [kCarryBegin, kCarryEnd]
// of the swing, then lowers in place. Keeps horizontal speed at zero whenever
// the toe is low enough to count as ground contact.
constexpr double kStanceFraction = 0.6;
constexpr double kCarryBegin = 0.3;
constexpr double kCarryEnd = 0.7;
constexpr double kWalkLift = 0.12;

struct ArmPose {
  double flex = 0.0;  // forward swing, radians
  double abd = 0.0;   // outward swing, radians
  double bend = 0.0;  // elbow flexion, radians
};

struct Body {
  double s = 1.0;  // uniform proportion scale
  double thigh() const { return 0.42 * s; }
  double shin() const { return 0.42 * s; }
  double ankle_height() const { return 0.08 * s; }
  double hip_drop() const { return 0.08 * s; }
  double reach() const { return 0.97 * (thigh() + shin()); }
  Vector3d toe_offset() const { return {0.0, -0.06 * s, 0.13 * s}; }
  double toe_rest_height() const { return ankle_height() + toe_offset().y(); }
};

Vector3d solve_knee(const Vector3d& hip, const Vector3d& ankle, double l1, double l2) {
  Vector3d axis = ankle - hip;
  const double d = std::clamp(axis.norm(), 1e-9, l1 + l2 - 1e-9);
  axis.normalize();
  const double along = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, l1 * l1 - along * along));
  Vector3d bend = Vector3d::UnitZ() - Vector3d::UnitZ().dot(axis) * axis;
  if (bend.norm() < 1e-9) bend = Vector3d::UnitY();
  bend.normalize();
  return hip + along * axis + h * bend;
}

// Places all 22 joints for one frame.
void build_frame(const Body& body, const Vector3d& pelvis, double lean, const ArmPose& left,
                 const ArmPose& right, Vector3d left_ankle, Vector3d right_ankle, double* out) {
  const double s = body.s;
  std::array<Vector3d, kJointCount> p;
  const Eigen::Matrix3d upper = Eigen::AngleAxisd(lean, Vector3d::UnitZ()).toRotationMatrix();
  auto up = [&](double x, double y, double z) -> Vector3d { return pelvis + upper * Vector3d(x, y, z) * s; };

  p[kPelvis] = pelvis;
  p[kSpine1] = up(0, 0.10, 0);
  p[kSpine2] = up(0, 0.22, 0);
  p[kSpine3] = up(0, 0.34, 0);
  p[kNeck] = up(0, 0.50, 0);
  p[kHead] = up(0, 0.62, 0.02);
  p[kLCollar] = up(0.05, 0.46, 0);
  p[kRCollar] = up(-0.05, 0.46, 0);
  p[kLShoulder] = up(0.18, 0.45, 0);
  p[kRShoulder] = up(-0.18, 0.45, 0);

  auto place_arm = [&](const ArmPose& a, double side, int shoulder, int elbow, int wrist) {
    const Eigen::Matrix3d r_upper = upper *
                                    Eigen::AngleAxisd(side * a.abd, Vector3d::UnitZ()).toRotationMatrix() *
                                    Eigen::AngleAxisd(-a.flex, Vector3d::UnitX()).toRotationMatrix();
    const Eigen::Matrix3d r_fore = r_upper * Eigen::AngleAxisd(-a.bend, Vector3d::UnitX()).toRotationMatrix();
    p[elbow] = p[shoulder] + r_upper * Vector3d(0, -0.27 * s, 0);
    p[wrist] = p[elbow] + r_fore * Vector3d(0, -0.25 * s, 0);
  };
  place_arm(left, 1.0, kLShoulder, kLElbow, kLWrist);
  place_arm(right, -1.0, kRShoulder, kRElbow, kRWrist);

  p[kLHip] = pelvis + Vector3d(0.09 * s, -body.hip_drop(), 0);
  p[kRHip] = pelvis + Vector3d(-0.09 * s, -body.hip_drop(), 0);
  auto place_leg = [&](int hip, int knee, int ankle, int foot, Vector3d target) {
    const Vector3d d = target - p[hip];
    const double max_len = body.thigh() + body.shin() - 1e-9;
    if (d.norm() > max_len) target = p[hip] + d.normalized() * max_len;
    p[ankle] = target;
    p[knee] = solve_knee(p[hip], target, body.thigh(), body.shin());
    p[foot] = target + body.toe_offset();
  };
  place_leg(kLHip, kLKnee, kLAnkle, kLFoot, left_ankle);
  place_leg(kRHip, kRKnee, kRAnkle, kRFoot, right_ankle);

  for (int j = 0; j < kJointCount; ++j) {
    out[3 * j + 0] = p[j].x();
    out[3 * j + 1] = p[j].y();
    out[3 * j + 2] = p[j].z();
  }
}

int frame_count(const SynthParams& params) {
  if (!(params.period > 0.0)) throw ValidationError("synth: period must be positive");
  if (!(params.duration > 0.0)) throw ValidationError("synth: duration must be positive");
  if (!(params.fps > 0.0)) throw ValidationError("synth: fps must be positive");
  if (params.amplitude && !(*params.amplitude >= 0.0)) {
    throw ValidationError("synth: amplitude must be non-negative");
  }
  const long n = std::lround(params.duration * params.fps);
  if (n < 2) throw ValidationError("synth: duration * fps must give at least 2 frames");
  return static_cast<int>(n);
}

struct WalkFoot {
  Vector3d ankle;
  FootPhase phase;
};

// One foot of the walk cycle. `offset` shifts the cycle phase in [0, 1).
WalkFoot walk_foot(double t, double period, double speed, double offset, double side_x,
                   const Body& body) {
  const double stride = speed * period;
  const double u = t / period + offset;
  const double k = std::floor(u);
  const double phi = u - k;
  const double stance_start = (k - offset) * period;
  const double planted = speed * stance_start + 0.5 * kStanceFraction * stride;
  WalkFoot f{{side_x, body.ankle_height(), planted}, FootPhase::kStance};
  if (phi < kStanceFraction) return f;
  const double sw = (phi - kStanceFraction) / (1.0 - kStanceFraction);
  const double carry = std::clamp((sw - kCarryBegin) / (kCarryEnd - kCarryBegin), 0.0, 1.0);
  const double eased = carry * carry * (3.0 - 2.0 * carry);
  f.ankle.z() = planted + stride * eased;
  f.ankle.y() = body.ankle_height() + kWalkLift * body.s * std::sin(pi * sw);
  f.phase = (sw >= kCarryBegin && sw <= kCarryEnd) ? FootPhase::kFlight : FootPhase::kTransition;
  return f;
}

struct Variation {
  Body body;
  double phase = 0.0;
  double arm_amp = 0.0;
};

Variation draw_variation(MotionPattern pattern, std::uint64_t seed) {
  Engine eng = make_engine(seed, "synth", static_cast<std::uint64_t>(pattern));
  std::uniform_real_distribution<double> scale(0.92, 1.08);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> arm(10.0, 30.0);
  Variation v;
  v.body.s = scale(eng);
  v.phase = unit(eng);
  v.arm_amp = arm(eng) * kDeg;
  return v;
}

struct Generated {
  std::vector<double> frames;
  std::vector<std::array<FootPhase, 2>> schedule;
};

Generated generate(MotionPattern pattern, const SynthParams& params, std::uint64_t seed) {
  const int n = frame_count(params);
  const double amp = params.amplitude.value_or(default_amplitude(pattern));
  const double period = params.period;
  const Variation var = draw_variation(pattern, seed);
  const Body& body = var.body;
  const double s = body.s;

  Generated g;
  g.frames.resize(static_cast<std::size_t>(n) * kJointCount * 3);
  g.schedule.resize(n);
  double* out = g.frames.data();
  const double standing = body.hip_drop() + body.ankle_height() + 0.95 * (body.thigh() + body.shin());

  switch (pattern) {
    case MotionPattern::kWalk: {
      const double speed = 2.0 * amp / period;
      // Lowest pelvis height that keeps every ankle target within reach.
      double height = standing;
      for (int i = 0; i < 2000; ++i) {
        const double t = period * i / 2000.0;
        const WalkFoot f = walk_foot(t, period, speed, 0.0, 0.0, body);
        const double rel = f.ankle.z() - speed * t;
        const double vertical = std::sqrt(std::max(0.0, body.reach() * body.reach() - rel * rel));
        height = std::min(height, f.ankle.y() + body.hip_drop() + vertical);
      }
      for (int k = 0; k < n; ++k) {
        const double t = k / params.fps;
        const WalkFoot lf = walk_foot(t, period, speed, var.phase, 0.09 * s, body);
        const WalkFoot rf = walk_foot(t, period, speed, std::fmod(var.phase + 0.5, 1.0), -0.09 * s, body);
        const double swing = std::sin(2.0 * pi * (t / period + var.phase));
        const ArmPose la{-var.arm_amp * swing, 8 * kDeg, 15 * kDeg};
        const ArmPose ra{var.arm_amp * swing, 8 * kDeg, 15 * kDeg};
        build_frame(body, {0.0, height, speed * t}, 0.0, la, ra, lf.ankle, rf.ankle,
                    out + static_cast<std::size_t>(k) * kJointCount * 3);
        g.schedule[k] = {lf.phase, rf.phase};
      }
      break;
    }
    case MotionPattern::kJump: {
      const double rest = standing - 0.05 * s;
      for (int k = 0; k < n; ++k) {
        const double t = k / params.fps;
        const double c = 0.5 * (1.0 - std::cos(2.0 * pi * t / period));
        const double lift = 1.2 * amp * c;
        const ArmPose arm{(10.0 * kDeg + var.arm_amp) + 2.0 * var.arm_amp * c, 12 * kDeg,
                          20 * kDeg + 30 * kDeg * c};
        build_frame(body, {0.0, rest + amp * c, 0.0}, 0.0, arm, arm,
                    {0.1 * s, body.ankle_height() + lift, 0.0},
                    {-0.1 * s, body.ankle_height() + lift, 0.0},
                    out + static_cast<std::size_t>(k) * kJointCount * 3);
        const bool grounded = body.toe_rest_height() + lift < 0.05;
        const FootPhase ph = grounded ? FootPhase::kStance : FootPhase::kFlight;
        g.schedule[k] = {ph, ph};
      }
      break;
    }
    case MotionPattern::kSway: {
      const double lateral = amp + 0.06 * s;
      const double height = body.hip_drop() + body.ankle_height() +
                            std::sqrt(std::max(0.0, body.reach() * body.reach() - lateral * lateral));
      for (int k = 0; k < n; ++k) {
        const double t = k / params.fps;
        const double w = std::sin(2.0 * pi * (t / period + var.phase));
        const ArmPose la{10 * kDeg, 25 * kDeg + var.arm_amp * w, 20 * kDeg};
        const ArmPose ra{10 * kDeg, 25 * kDeg - var.arm_amp * w, 20 * kDeg};
        build_frame(body, {amp * w, height, 0.0}, -10.0 * kDeg * w, la, ra,
                    {0.15 * s, body.ankle_height(), 0.0}, {-0.15 * s, body.ankle_height(), 0.0},
                    out + static_cast<std::size_t>(k) * kJointCount * 3);
        g.schedule[k] = {FootPhase::kStance, FootPhase::kStance};
      }
      break;
    }
    case MotionPattern::kStatic: {
      const ArmPose arm{5 * kDeg, 8 * kDeg, 10 * kDeg};
      for (int k = 0; k < n; ++k) {
        build_frame(body, {0.0, standing - 0.02 * s, 0.0}, 0.0, arm, arm,
                    {0.1 * s, body.ankle_height(), 0.0}, {-0.1 * s, body.ankle_height(), 0.0},
                    out + static_cast<std::size_t>(k) * kJointCount * 3);
        g.schedule[k] = {FootPhase::kStance, FootPhase::kStance};
      }
      break;
    }
  }
  return g;
}

}  // namespace

std::string_view pattern_name(MotionPattern p) {
  switch (p) {
    case MotionPattern::kWalk: return "walk";
    case MotionPattern::kJump: return "jump";
    case MotionPattern::kSway: return "sway";
    case MotionPattern::kStatic: return "static";
  }
  return "unknown";
}

std::optional<MotionPattern> parse_pattern(std::string_view name) {
  for (auto p : {MotionPattern::kWalk, MotionPattern::kJump, MotionPattern::kSway, MotionPattern::kStatic}) {
    if (pattern_name(p) == name) return p;
  }
  return std::nullopt;
}

double default_amplitude(MotionPattern p) {
  switch (p) {
    case MotionPattern::kWalk: return 0.5;
    case MotionPattern::kJump: return 0.3;
    case MotionPattern::kSway: return 0.1;
    case MotionPattern::kStatic: return 0.0;
  }
  return 0.0;
}

MotionSequence synth_motion(MotionPattern pattern, const SynthParams& params, std::uint64_t seed) {
  Generated g = generate(pattern, params, seed);
  return MotionSequence(Skeleton::humanoid22(), params.fps, std::move(g.frames));
}

std::vector<std::array<FootPhase, 2>> synth_foot_schedule(MotionPattern pattern,
                                                          const SynthParams& params,
                                                          std::uint64_t seed) {
  return generate(pattern, params, seed).schedule;
}

}  // namespace sparsecue
