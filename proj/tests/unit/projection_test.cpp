// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "sparsecue/error.hpp"
#include "sparsecue/motion_io.hpp"
#include "sparsecue/projection.hpp"
#include "sparsecue/synth.hpp"
#include "test_support.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;
using testing::make_motion;
using testing::rest_pose;

// Camera at the origin looking down +Z with identity orientation.
CameraTrack fixed_camera(int frames, double focal = 1.0) {
  CameraTrack cam;
  cam.fps = 20.0;
  cam.focal = focal;
  cam.positions.assign(frames, Vector3d::Zero());
  cam.orientations.assign(frames, Eigen::Quaterniond::Identity());
  return cam;
}

TEST(Camera, ZeroDriftIsStatic) {
  CameraRanges r;
  r.drift_speed = 0.0;
  const CameraTrack cam = sample_camera(30, 20.0, 3, r);
  for (int n = 1; n < cam.num_frames(); ++n) {
    EXPECT_EQ(cam.positions[n], cam.positions[0]);
    EXPECT_TRUE(cam.orientations[n].coeffs() == cam.orientations[0].coeffs());
  }
}

TEST(Camera, DegenerateDistanceAndLookAt) {
  CameraRanges r;
  r.distance = {2.0, 2.0};
  const Vector3d centroid(0.3, 0.9, -0.2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CameraTrack cam = sample_camera(25, 20.0, seed, r, centroid);
    for (int n = 0; n < cam.num_frames(); ++n) {
      EXPECT_NEAR((cam.positions[n] - centroid).norm(), 2.0, 1e-12);
      EXPECT_NEAR(cam.orientations[n].norm(), 1.0, 1e-9);
      // Centroid sits on the optical axis.
      const Vector3d c = cam.to_camera(n, centroid);
      EXPECT_NEAR(c.x(), 0.0, 1e-9);
      EXPECT_NEAR(c.y(), 0.0, 1e-9);
      EXPECT_GT(c.z(), 0.0);
    }
  }
}

TEST(Camera, DriftIsBoundedAndDeterministic) {
  CameraRanges r;
  r.drift_speed = 0.5;
  const CameraTrack a = sample_camera(40, 20.0, 17, r);
  const CameraTrack b = sample_camera(40, 20.0, 17, r);
  for (int n = 0; n < a.num_frames(); ++n) {
    EXPECT_EQ(a.positions[n], b.positions[n]);
    EXPECT_TRUE(a.orientations[n].coeffs() == b.orientations[n].coeffs());
    if (n > 0) EXPECT_LE((a.positions[n] - a.positions[n - 1]).norm(), 0.5 / 20.0 + 1e-12);
  }
}

TEST(Camera, RejectsBadRanges) {
  CameraRanges r;
  r.distance = {3.0, 2.0};
  EXPECT_THROW(sample_camera(10, 20.0, 0, r), ValidationError);
  EXPECT_THROW(sample_camera(1, 20.0, 0), ValidationError);
}

TEST(Project, PinholeArithmetic) {
  const int head = Skeleton::humanoid22().slot_joint(CueSlot::kHead);
  // Root on the axis at depth 1, head at camera-frame (1, 0, 2).
  const auto m = make_motion(2, 20.0, [head](int, int j) {
    return j == head ? Vector3d(1, 0, 2) : Vector3d(0, 0, 1);
  });
  const auto raw = project_slots(m, fixed_camera(2));
  EXPECT_EQ(raw[0][0], Vector2d(0, 0));
  EXPECT_EQ(raw[0][slot_index(CueSlot::kHead)], Vector2d(0.5, 0));
  const auto raw2 = project_slots(m, fixed_camera(2, 2.0));
  EXPECT_EQ(raw2[0][slot_index(CueSlot::kHead)], Vector2d(1.0, 0));
}

TEST(Project, PlanarMotionMatches3dCues) {
  const MotionSequence walk = synth_motion(MotionPattern::kSway, {}, 4);
  // Flatten onto the plane z = 3 in front of the fixed camera.
  const auto planar = make_motion(walk.num_frames(), walk.fps(), [&](int f, int j) {
    const Vector3d p = walk.joint(f, j);
    return Vector3d(p.x(), p.y(), 3.0);
  });
  const SparseCue2D c2 = project(planar, fixed_camera(planar.num_frames(), 1.3));
  const SparseCue3D c3 = extract_cues_3d(planar);
  for (int f = 0; f < c2.num_frames(); ++f) {
    for (int s = 0; s < kNumSlots; ++s) {
      EXPECT_NEAR(c2.at(f, s).x(), c3.at(f, s).x(), 1e-12);
      EXPECT_NEAR(c2.at(f, s).y(), c3.at(f, s).y(), 1e-12);
    }
  }
}

TEST(Project, BehindCameraNamesFrameAndSlot) {
  const auto m = make_motion(3, 20.0, [](int f, int j) {
    return (f == 2 && j == 15) ? Vector3d(0, 0, -1) : Vector3d(0.1 * j, 0, 2);
  });
  try {
    project(m, fixed_camera(3));
    FAIL() << "expected a depth error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("head"), std::string::npos) << msg;
    EXPECT_NE(msg.find('2'), std::string::npos) << msg;
  }
}

TEST(Project, NormalizationInvariantsOverSeeds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pattern = static_cast<MotionPattern>(seed % 4);
    const MotionSequence m = synth_motion(pattern, {}, seed);
    const CameraTrack cam = sample_camera(m.num_frames(), m.fps(), seed, {}, motion_centroid(m));
    const SparseCue2D c = project(m, cam);
    for (int f = 0; f < c.num_frames(); ++f) EXPECT_EQ(c.at(f, 0), Vector2d::Zero());
    EXPECT_NEAR(testing::brute_norm(c), 1.0, 1e-9);
  }
}

SparseCue2D sample_cues(std::uint64_t seed, double duration = 2.0) {
  SynthParams p;
  p.duration = duration;
  const MotionSequence m = synth_motion(MotionPattern::kWalk, p, seed);
  return project(m, sample_camera(m.num_frames(), m.fps(), seed, {}, motion_centroid(m)));
}

TEST(Augment, DisabledIsIdentity) {
  const SparseCue2D c = sample_cues(1);
  EXPECT_EQ(augment(c, AugmentConfig::disabled(), 9), c);
}

TEST(Augment, FixedRotationIsIsometry) {
  const SparseCue2D c = sample_cues(2);
  AugmentConfig cfg = AugmentConfig::disabled();
  cfg.enable_rotate = true;
  cfg.rotation_range_deg = {90.0, 90.0};
  const SparseCue2D r = augment(c, cfg, 5);
  for (int f = 0; f < c.num_frames(); ++f) {
    for (int s = 1; s < kNumSlots; ++s) {
      const Vector2d v = c.at(f, s);
      EXPECT_LT((r.at(f, s) - Vector2d(-v.y(), v.x())).norm(), 1e-9);
      for (int t = s + 1; t < kNumSlots; ++t) {
        EXPECT_NEAR((r.at(f, s) - r.at(f, t)).norm(), (c.at(f, s) - c.at(f, t)).norm(), 1e-9);
      }
    }
  }
  EXPECT_NEAR(testing::brute_norm(r), 1.0, 1e-9);
}

TEST(Augment, SymmetricLimbScaling) {
  const SparseCue2D c = sample_cues(3);
  AugmentConfig cfg = AugmentConfig::disabled();
  cfg.enable_scale = true;
  cfg.limb_scale_range = {2.0, 2.0};
  const SparseCue2D s = augment(c, cfg, 1);
  const std::array<std::pair<CueSlot, CueSlot>, 4> pairs{{{CueSlot::kLeftElbow, CueSlot::kRightElbow},
                                                          {CueSlot::kLeftHand, CueSlot::kRightHand},
                                                          {CueSlot::kLeftKnee, CueSlot::kRightKnee},
                                                          {CueSlot::kLeftFoot, CueSlot::kRightFoot}}};
  for (int f = 0; f < c.num_frames(); ++f) {
    for (auto [l, r] : pairs) {
      const double left = s.at(f, slot_index(l)).norm() / c.at(f, slot_index(l)).norm();
      const double right = s.at(f, slot_index(r)).norm() / c.at(f, slot_index(r)).norm();
      EXPECT_NEAR(left, right, 1e-9);
    }
  }
}

TEST(Augment, TinyNoiseConvergesToIdentity) {
  const SparseCue2D c = sample_cues(4, 4.0);
  AugmentConfig cfg = AugmentConfig::disabled();
  cfg.enable_noise = true;
  cfg.noise_sigma = 1e-6;
  const SparseCue2D n = augment(c, cfg, 2);
  int within = 0, total = 0;
  for (std::size_t i = 0; i < c.values().size(); ++i) {
    ++total;
    within += std::abs(n.values()[i] - c.values()[i]) <= 5e-6 ? 1 : 0;
  }
  ASSERT_GE(total, 1000);
  EXPECT_GE(static_cast<double>(within) / total, 0.999);
}

TEST(Augment, KeepsInvalidSlotsZeroAndIsDeterministic) {
  SparseCue2D c = sample_cues(5);
  for (int f = 0; f < c.num_frames(); ++f) {
    c.set(f, slot_index(CueSlot::kLeftHand), Vector2d::Zero());
    c.set_valid(f, slot_index(CueSlot::kLeftHand), false);
  }
  normalize_global(c);
  const AugmentConfig cfg;
  const SparseCue2D a = augment(c, cfg, 77);
  EXPECT_EQ(a, augment(c, cfg, 77));
  for (int f = 0; f < a.num_frames(); ++f) {
    EXPECT_EQ(a.at(f, slot_index(CueSlot::kLeftHand)), Vector2d::Zero());
    EXPECT_EQ(a.at(f, 0), Vector2d::Zero());
  }
  EXPECT_NEAR(testing::brute_norm(a), 1.0, 1e-9);
}

TEST(ProjectionIo, CameraAndAugmentRoundTrip) {
  const CameraTrack cam = sample_camera(10, 20.0, 8);
  const CameraTrack back = parse_camera(dump_camera(cam));
  for (int n = 0; n < cam.num_frames(); ++n) {
    EXPECT_EQ(back.positions[n], cam.positions[n]);
    EXPECT_TRUE(back.orientations[n].coeffs() == cam.orientations[n].coeffs());
  }
  AugmentConfig cfg;
  cfg.noise_sigma = 0.02;
  cfg.enable_rotate = false;
  const AugmentConfig a = parse_augment_config(dump_augment_config(cfg));
  EXPECT_EQ(a.noise_sigma, 0.02);
  EXPECT_FALSE(a.enable_rotate);
  EXPECT_TRUE(a.enable_scale);
}

}  // namespace
}  // namespace sparsecue
