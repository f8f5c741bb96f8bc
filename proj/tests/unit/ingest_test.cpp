// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "sparsecue/error.hpp"
#include "sparsecue/ingest.hpp"
#include "sparsecue/motion_io.hpp"
#include "sparsecue/projection.hpp"
#include "sparsecue/synth.hpp"
#include "test_support.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector2d;

RawKeypointTrack make_track(int frames, const std::vector<std::string>& names,
                            const std::function<Vector2d(int, int)>& px,
                            const std::function<double(int, int)>& conf = nullptr) {
  nlohmann::json doc;
  doc["fps"] = 20.0;
  doc["names"] = names;
  nlohmann::json pts = nlohmann::json::array(), cf = nlohmann::json::array();
  for (int f = 0; f < frames; ++f) {
    nlohmann::json row = nlohmann::json::array(), crow = nlohmann::json::array();
    for (int k = 0; k < static_cast<int>(names.size()); ++k) {
      const Vector2d p = px(f, k);
      row.push_back({p.x(), p.y()});
      crow.push_back(conf ? conf(f, k) : 1.0);
    }
    pts.push_back(row);
    cf.push_back(crow);
  }
  doc["points"] = pts;
  doc["confidence"] = cf;
  return parse_keypoints(doc.dump());
}

std::vector<std::string> slot_list() {
  std::vector<std::string> out;
  for (auto n : slot_names()) out.emplace_back(n);
  return out;
}

TEST(Keypoints, MinimalFile) {
  const RawKeypointTrack t = parse_keypoints(R"({"fps": 30, "names": ["a"], "points": [[[1, 2]], [[3, 4]]]})");
  EXPECT_EQ(t.num_keypoints(), 1);
  EXPECT_EQ(t.num_frames(), 2);
  EXPECT_EQ(t.conf(1, 0), 1.0);
}

TEST(Keypoints, Errors) {
  EXPECT_THROW(parse_keypoints(R"({"names": ["a"], "points": [[[1, 2]]]})"), ParseError);
  EXPECT_THROW(parse_keypoints(R"({"fps": 30, "names": ["a"], "points": [[[null, 2]]], "confidence": [[0.9]]})"),
               ValidationError);
  // A NaN where nobody trusts the point is fine.
  EXPECT_NO_THROW(
      parse_keypoints(R"({"fps": 30, "names": ["a"], "points": [[[null, 2]]], "confidence": [[0.0]]})"));
}

TEST(MapToCanonical, IdentityMatchesHandNormalization) {
  // Ten keypoints on a known pixel layout that changes per frame.
  const auto px = [](int f, int k) { return Vector2d(400.0 + 13.0 * k + 2.0 * f, 300.0 - 7.0 * k * k + f); };
  const RawKeypointTrack t = make_track(5, slot_list(), px);
  const SparseCue2D c = map_to_canonical(t, MappingConfig::identity());

  // Independent oracle: root-relative, Y flipped, one norm for the sequence.
  std::vector<Vector2d> rel;
  double sq = 0.0;
  for (int f = 0; f < 5; ++f) {
    for (int k = 0; k < kNumSlots; ++k) {
      const Vector2d d(px(f, k).x() - px(f, 0).x(), -(px(f, k).y() - px(f, 0).y()));
      rel.push_back(d);
      if (k > 0) sq += d.squaredNorm();
    }
  }
  const double norm = std::sqrt(sq);
  for (int f = 0; f < 5; ++f) {
    for (int k = 0; k < kNumSlots; ++k) {
      EXPECT_LT((c.at(f, k) - rel[f * kNumSlots + k] / norm).norm(), 1e-12);
      EXPECT_TRUE(c.valid(f, k));
    }
  }
}

TEST(MapToCanonical, RootAndHeadOnly) {
  MappingConfig m;
  m.slots[slot_index(CueSlot::kRoot)] = {"hip"};
  m.slots[slot_index(CueSlot::kHead)] = {"nose"};
  const RawKeypointTrack t = make_track(3, {"hip", "nose"}, [](int, int) { return Vector2d(5, 5); });
  const SparseCue2D c = map_to_canonical(t, m);
  for (int f = 0; f < 3; ++f) {
    for (int s = 0; s < kNumSlots; ++s) {
      EXPECT_EQ(c.at(f, s), Vector2d::Zero());
      EXPECT_EQ(c.valid(f, s), s <= 1);
    }
  }
}

TEST(MapToCanonical, LowConfidenceSlotIsMasked) {
  MappingConfig m = MappingConfig::identity();
  m.confidence_floor = 0.5;
  const int hand = slot_index(CueSlot::kLeftHand);
  const RawKeypointTrack t = make_track(
      4, slot_list(), [](int f, int k) { return Vector2d(10.0 * k + f, 5.0 * k); },
      [hand](int, int k) { return k == hand ? 0.4 : 0.9; });
  const SparseCue2D c = map_to_canonical(t, m);
  for (int f = 0; f < 4; ++f) {
    EXPECT_FALSE(c.valid(f, hand));
    EXPECT_EQ(c.at(f, hand), Vector2d::Zero());
  }
  EXPECT_NEAR(testing::brute_norm(c), 1.0, 1e-12);
  EXPECT_TRUE(validate_cues(c).ok());
}

TEST(MapToCanonical, RootMustBeAnchored) {
  MappingConfig unmapped = MappingConfig::identity();
  unmapped.slots[0].clear();
  const RawKeypointTrack t = make_track(2, slot_list(), [](int, int k) { return Vector2d(k, k); });
  EXPECT_THROW(map_to_canonical(t, unmapped), ValidationError);

  const RawKeypointTrack weak_root =
      make_track(2, slot_list(), [](int, int k) { return Vector2d(k, k); },
                 [](int f, int k) { return (f == 1 && k == 0) ? 0.1 : 1.0; });
  EXPECT_THROW(map_to_canonical(weak_root, MappingConfig::identity()), ValidationError);
}

TEST(MapToCanonical, Human17AveragesHips) {
  const std::vector<std::string> names = {"nose", "left_eye", "right_eye", "left_ear", "right_ear",
                                          "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
                                          "left_wrist", "right_wrist", "left_hip", "right_hip",
                                          "left_knee", "right_knee", "left_ankle", "right_ankle"};
  const RawKeypointTrack t = make_track(3, names, [](int f, int k) { return Vector2d(100 + 10 * k + f, 50 + 20 * k); });
  const SparseCue2D c = map_to_canonical(t, MappingConfig::human17());
  EXPECT_TRUE(validate_cues(c).ok());
  for (int s = 0; s < kNumSlots; ++s) EXPECT_TRUE(c.valid(0, s));
}

TEST(ValidateCues, DetectsCorruption) {
  const MotionSequence m = synth_motion(MotionPattern::kWalk, {}, 1);
  SparseCue2D c = project(m, sample_camera(m.num_frames(), m.fps(), 1, {}, motion_centroid(m)));
  EXPECT_TRUE(validate_cues(c).ok());

  SparseCue2D root = c;
  root.set(3, 0, Vector2d(0.1, 0));
  const CueDiagnostics d = validate_cues(root);
  ASSERT_FALSE(d.ok());
  bool found = false;
  for (const auto& v : d.violations) found = found || (v.kind == CueViolation::Kind::kRootNotZero && v.frame == 3);
  EXPECT_TRUE(found);

  SparseCue2D ghost = c;
  ghost.set_valid(2, 4, false);
  bool nonzero = false;
  for (const auto& v : validate_cues(ghost).violations) nonzero = nonzero || v.kind == CueViolation::Kind::kInvalidNonZero;
  EXPECT_TRUE(nonzero);
}

TEST(ValidateCues, DisplacementTableByHand) {
  // Head static at (0, 0.5) except a 0.5-unit jump at frame 3; norm kept exact by hand.
  const int frames = 6;
  SparseCue2D c(20.0, frames);
  std::vector<Vector2d> head(frames, Vector2d(0, 0.5));
  head[3] = Vector2d(0.5, 0.5);
  double sq = 0.0;
  for (const auto& h : head) sq += h.squaredNorm();
  for (int f = 0; f < frames; ++f) {
    for (int s = 0; s < kNumSlots; ++s) c.set_valid(f, s, s <= 1);
    c.set(f, 1, head[f] / std::sqrt(sq));
  }
  const double jump = 0.5 / std::sqrt(sq);
  const CueDiagnostics lo = validate_cues(c, 0.9 * jump);
  EXPECT_TRUE(lo.ok());
  EXPECT_NEAR(lo.max_displacement[1], jump, 1e-12);
  EXPECT_EQ(lo.validity_rate[1], 1.0);
  EXPECT_EQ(lo.validity_rate[2], 0.0);
  ASSERT_EQ(lo.outliers.size(), 2U);  // into frame 3 and back out of it
  EXPECT_EQ(lo.outliers[0].slot, 1);
  EXPECT_EQ(validate_cues(c, 1.1 * jump).outliers.size(), 0U);
}

TEST(CrossModule, PixelExportReingestMatchesProject) {
  const auto dir = testing::temp_dir("ingest-roundtrip");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MotionSequence m = synth_motion(static_cast<MotionPattern>(seed % 4), {}, seed + 100);
    const CameraTrack cam = sample_camera(m.num_frames(), m.fps(), seed, {}, motion_centroid(m));
    save_keypoints(project_to_pixels(m, cam), dir / "kp.json");
    const SparseCue2D back = map_to_canonical(load_keypoints(dir / "kp.json"), MappingConfig::identity());
    const SparseCue2D direct = project(m, cam);
    for (std::size_t i = 0; i < direct.values().size(); ++i) EXPECT_NEAR(back.values()[i], direct.values()[i], 1e-6);
  }
}

TEST(Mapping, FileRoundTrip) {
  MappingConfig m = MappingConfig::quadruped();
  m.confidence_floor = 0.42;
  const MappingConfig back = parse_mapping(dump_mapping(m));
  EXPECT_EQ(back.confidence_floor, 0.42);
  EXPECT_EQ(back.slots, m.slots);
}

}  // namespace
}  // namespace sparsecue
