// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecue/motion.hpp"

namespace sparsecue {

/// Ground plane is y = 0. Feet are the left/right foot cue slots (toes).
struct ContactModel {
  double contact_height = 0.05;  // m
  double skate_speed = 0.10;     // m/s, horizontal
  double float_height = 0.05;    // m

  void validate() const;
  bool operator==(const ContactModel&) const = default;
};

struct RelativeMetrics {
  double r_jitter = 0.0;
  double r_fsr = 0.0;
  double r_ffl = 0.0;
  double r_fsd = 0.0;
};

struct MetricReport {
  double jitter = 0.0;  // m/s^3
  double fsr = 0.0;
  double ffl = 0.0;
  double fsd = 0.0;  // m/s
  double fps = 0.0;
  ContactModel model;
  std::optional<RelativeMetrics> relative;
};

inline constexpr double kRelativeEpsilon = 1e-9;

/// Mean over joints and the N - 3 four-frame stencils of
/// |x[n+3] - 3 x[n+2] + 3 x[n+1] - x[n]| * fps^3. Needs N >= 4.
double jitter(const MotionSequence& motion);

/// {left, right} per frame: toe height below contact_height.
std::vector<std::array<bool, 2>> foot_contacts(const MotionSequence& motion, const ContactModel& model);

/// Horizontal toe speed per frame and foot: forward difference, backward on the last frame.
std::vector<std::array<double, 2>> foot_speeds(const MotionSequence& motion);

/// Fraction of frames where some foot is in contact and moving faster than skate_speed.
double fsr(const MotionSequence& motion, const ContactModel& model);
/// Fraction of frames where both toes are above float_height.
double ffl(const MotionSequence& motion, const ContactModel& model);
/// Horizontal toe travel from each contact frame to the next, summed over
/// feet, divided by the clip duration (N - 1) / fps.
double fsd(const MotionSequence& motion, const ContactModel& model);

MetricReport evaluate_metrics(const MotionSequence& motion, const ContactModel& model = {});

/// R-X = |X - X_base| / max(X_base, 1e-9). Throws when the contact models or frame rates differ.
MetricReport relative_report(const MetricReport& method, const MetricReport& baseline);

/// JSON report with values, thresholds, formula identifiers and the given input hashes.
std::string dump_report(const MetricReport& report, const std::map<std::string, std::string>& inputs = {});

/// One row per named report; relative columns are empty when absent.
std::string report_csv(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace sparsecue
