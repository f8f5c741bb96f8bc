// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "sparsecue/error.hpp"
#include "sparsecue/metrics.hpp"
#include "sparsecue/synth.hpp"
#include "test_support.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector3d;
using testing::make_motion;
using testing::rest_pose;

const int kLeftToe = Skeleton::humanoid22().slot_joint(CueSlot::kLeftFoot);
const int kRightToe = Skeleton::humanoid22().slot_joint(CueSlot::kRightFoot);

MotionSequence still(int frames = 10, double lift = 0.0) {
  return make_motion(frames, 20.0, [lift](int, int j) { return Vector3d(rest_pose(j) + Vector3d(0, lift, 0)); });
}

TEST(Metrics, StaticGroundedClipIsClean) {
  const MetricReport r = evaluate_metrics(still());
  EXPECT_EQ(r.jitter, 0.0);
  EXPECT_EQ(r.fsr, 0.0);
  EXPECT_EQ(r.ffl, 0.0);
  EXPECT_EQ(r.fsd, 0.0);
}

TEST(Jitter, StencilArithmetic) {
  const auto step = make_motion(4, 1.0, [](int f, int) { return Vector3d(f == 3 ? 1.0 : 0.0, 0, 0); });
  EXPECT_DOUBLE_EQ(jitter(step), 1.0);
  const auto linear = make_motion(12, 20.0, [](int f, int j) { return Vector3d(rest_pose(j) + Vector3d(0.1 * f, 0, -0.05 * f)); });
  EXPECT_NEAR(jitter(linear), 0.0, 1e-9);
  EXPECT_THROW(jitter(still(3)), ValidationError);
}

TEST(Jitter, ConvergesToAnalyticDerivative) {
  // x(t) = sin(t); |x'''(t)| = |cos(t)|.
  for (double fps : {20.0, 40.0}) {
    const int n = static_cast<int>(3.0 * fps) + 1;
    const auto m = make_motion(n, fps, [fps](int f, int j) {
      return Vector3d(rest_pose(j) + Vector3d(std::sin(f / fps), 0, 0));
    });
    double analytic = 0.0;
    for (int f = 0; f + 3 < n; ++f) analytic += std::abs(std::cos((f + 1.5) / fps));
    analytic /= (n - 3);
    EXPECT_NEAR(jitter(m), analytic, 0.05 * analytic) << fps;
  }
}

TEST(Contacts, ThresholdAndWalkSchedule) {
  for (const auto& c : foot_contacts(still(), {})) EXPECT_TRUE(c[0] && c[1]);
  for (const auto& c : foot_contacts(still(5, 1.0), {})) EXPECT_FALSE(c[0] || c[1]);

  const SynthParams p;
  const MotionSequence walk = synth_motion(MotionPattern::kWalk, p, 3);
  const auto sched = synth_foot_schedule(MotionPattern::kWalk, p, 3);
  const auto contact = foot_contacts(walk, {});
  int stance = 0, flight = 0;
  for (std::size_t f = 0; f < sched.size(); ++f) {
    for (int k = 0; k < 2; ++k) {
      if (sched[f][k] == FootPhase::kStance) {
        EXPECT_TRUE(contact[f][k]) << f;
        ++stance;
      } else if (sched[f][k] == FootPhase::kFlight) {
        EXPECT_FALSE(contact[f][k]) << f;
        ++flight;
      }
    }
  }
  EXPECT_GT(stance, 0);
  EXPECT_GT(flight, 0);
}

TEST(Fsr, StaticFullAndHalf) {
  EXPECT_EQ(fsr(still(), {}), 0.0);
  // Left toe slides at 0.5 m/s the whole clip.
  const auto slide = make_motion(20, 20.0, [](int f, int j) {
    return j == kLeftToe ? Vector3d(rest_pose(j) + Vector3d(0.025 * f, 0, 0)) : rest_pose(j);
  });
  EXPECT_EQ(fsr(slide, {}), 1.0);
  // Slides over frames 0..9, planted afterwards: 10 of 20 frames.
  const auto half = make_motion(20, 20.0, [](int f, int j) {
    return j == kLeftToe ? Vector3d(rest_pose(j) + Vector3d(0.05 * std::min(f, 10), 0, 0)) : rest_pose(j);
  });
  EXPECT_EQ(fsr(half, {}), 0.5);
}

TEST(Ffl, GroundedHoveringAndJump) {
  EXPECT_EQ(ffl(still(), {}), 0.0);
  EXPECT_EQ(ffl(still(10, 1.0), {}), 1.0);
  // Airborne on frames 7..12 of 20.
  const auto jump = make_motion(20, 20.0, [](int f, int j) {
    return Vector3d(rest_pose(j) + Vector3d(0, (f >= 7 && f <= 12) ? 0.3 : 0.0, 0));
  });
  EXPECT_NEAR(ffl(jump, {}), 0.3, 1.0 / 20.0);
  EXPECT_DOUBLE_EQ(ffl(jump, {}), 6.0 / 20.0);
}

TEST(Fsd, SlidingClipAndTwoFeetSchedule) {
  EXPECT_EQ(fsd(still(), {}), 0.0);
  // 0.2 m of sliding over a 0.5 s clip (11 frames at 20 fps).
  const auto slide = make_motion(11, 20.0, [](int f, int j) {
    return j == kLeftToe ? Vector3d(rest_pose(j) + Vector3d(0.02 * f, 0, 0)) : rest_pose(j);
  });
  EXPECT_NEAR(fsd(slide, {}), 0.4, 1e-9);

  // Left toe: 0.01 m steps while grounded on frames 0..4. Right toe: 0.03 m
  // steps along z on frames 5..9, then lifted 0.2 m and moving on 10..12 (not counted).
  const auto left_x = [](int f) { return 0.01 * std::min(f, 5); };
  const auto right_z = [](int f) { return 0.03 * std::clamp(f - 5, 0, 8); };
  const auto two = make_motion(14, 20.0, [&](int f, int j) {
    if (j == kLeftToe) return Vector3d(rest_pose(j) + Vector3d(left_x(f), 0, 0));
    if (j == kRightToe) return Vector3d(rest_pose(j) + Vector3d(0, (f >= 10 && f <= 12) ? 0.2 : 0.0, right_z(f)));
    return rest_pose(j);
  });
  double sum = 0.0;
  for (int f = 0; f + 1 < 14; ++f) {
    sum += std::abs(left_x(f + 1) - left_x(f));  // always grounded
    if (!(f >= 10 && f <= 12)) sum += std::abs(right_z(f + 1) - right_z(f));
  }
  // Frame 9 is grounded and moves into frame 10, so it counts; 10..12 do not.
  EXPECT_NEAR(sum, 0.05 + 0.03 * 5, 1e-12);
  EXPECT_NEAR(fsd(two, {}), sum / (13.0 / 20.0), 1e-9);
}

TEST(Fsd, MonotoneUnderExtraSliding) {
  const MotionSequence walk = synth_motion(MotionPattern::kWalk, {}, 4);
  const double before = fsd(walk, {});
  const auto contact = foot_contacts(walk, {});
  std::vector<double> data(walk.data().begin(), walk.data().end());
  double shift = 0.0;
  for (int f = 0; f < walk.num_frames(); ++f) {
    if (contact[f][0]) shift += 0.01;
    data[(static_cast<std::size_t>(f) * walk.num_joints() + kLeftToe) * 3] += shift;
  }
  const MotionSequence more(walk.skeleton(), walk.fps(), data);
  EXPECT_GE(fsd(more, {}), before);
}

TEST(Metrics, TranslationInvariance) {
  const MotionSequence walk = synth_motion(MotionPattern::kWalk, {}, 5);
  const auto moved = make_motion(walk.num_frames(), walk.fps(), [&](int f, int j) {
    return Vector3d(walk.joint(f, j) + Vector3d(3.0, 0, -2.0));
  });
  const MetricReport a = evaluate_metrics(walk), b = evaluate_metrics(moved);
  EXPECT_NEAR(a.jitter, b.jitter, 1e-6);
  EXPECT_EQ(a.fsr, b.fsr);
  EXPECT_EQ(a.ffl, b.ffl);
  EXPECT_NEAR(a.fsd, b.fsd, 1e-9);
  const MetricReport up = evaluate_metrics(make_motion(walk.num_frames(), walk.fps(), [&](int f, int j) {
    return Vector3d(walk.joint(f, j) + Vector3d(0, 1.0, 0));
  }));
  EXPECT_NEAR(up.jitter, a.jitter, 1e-6);
  EXPECT_EQ(up.ffl, 1.0);
}

TEST(Relative, Algebra) {
  const MetricReport base = evaluate_metrics(synth_motion(MotionPattern::kWalk, {}, 6));
  const MetricReport same = relative_report(base, base);
  ASSERT_TRUE(same.relative);
  EXPECT_EQ(same.relative->r_jitter, 0.0);
  EXPECT_EQ(same.relative->r_fsr, 0.0);
  EXPECT_EQ(same.relative->r_ffl, 0.0);
  EXPECT_EQ(same.relative->r_fsd, 0.0);

  MetricReport m = base;
  m.jitter = 1.1 * base.jitter;
  EXPECT_NEAR(relative_report(m, base).relative->r_jitter, 0.1, 1e-9);

  MetricReport z = base;
  z.ffl = 0.0;
  EXPECT_EQ(relative_report(z, z).relative->r_ffl, 0.0);

  MetricReport other = base;
  other.model.skate_speed = 0.2;
  EXPECT_THROW(relative_report(other, base), ValidationError);
}

TEST(Report, EmbedsFormulasAndCsv) {
  const MetricReport r = relative_report(evaluate_metrics(still()), evaluate_metrics(still()));
  const auto doc = nlohmann::json::parse(dump_report(r, {{"motion", "abc"}}));
  EXPECT_EQ(doc["thresholds"]["contact_height"], 0.05);
  EXPECT_TRUE(doc["formulas"].contains("fsd"));
  EXPECT_EQ(doc["inputs"]["motion"], "abc");
  EXPECT_EQ(doc["relative"]["R-FSD"], 0.0);
  const std::string csv = report_csv({{"clip", r}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,Jitter,FSR,FFL,FSD,R-Jitter,R-FSR,R-FFL,R-FSD");
}

TEST(ContactModel, RejectsNonPositive) {
  ContactModel m;
  m.float_height = 0.0;
  EXPECT_THROW(evaluate_metrics(still(), m), ValidationError);
}

}  // namespace
}  // namespace sparsecue
