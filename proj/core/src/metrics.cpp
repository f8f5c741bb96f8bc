// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/metrics.hpp"

#include <charconv>
#include <cmath>

#include "json_util.hpp"
#include "sparsecue/error.hpp"

namespace sparsecue {
namespace {

using Eigen::Vector3d;

std::array<int, 2> foot_joints(const Skeleton& sk) {
  return {sk.slot_joint(CueSlot::kLeftFoot), sk.slot_joint(CueSlot::kRightFoot)};
}

double horizontal_distance(const Vector3d& a, const Vector3d& b) {
  const double dx = b.x() - a.x();
  const double dz = b.z() - a.z();
  return std::sqrt(dx * dx + dz * dz);
}

double relative(double m, double b) { return std::abs(m - b) / std::max(b, kRelativeEpsilon); }

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void ContactModel::validate() const {
  if (!(contact_height > 0.0) || !(skate_speed > 0.0) || !(float_height > 0.0)) {
    throw ValidationError("contact model: all thresholds must be positive");
  }
}

double jitter(const MotionSequence& motion) {
  const int n = motion.num_frames();
  if (n < 4) throw ValidationError("jitter: need at least 4 frames, got " + std::to_string(n));
  const double fps3 = motion.fps() * motion.fps() * motion.fps();
  double sum = 0.0;
  for (int j = 0; j < motion.num_joints(); ++j) {
    for (int f = 0; f + 3 < n; ++f) {
      // Grouped as two differences so a constant signal gives exactly zero.
      const Vector3d d = (motion.joint(f + 3, j) - motion.joint(f, j)) -
                         3.0 * (motion.joint(f + 2, j) - motion.joint(f + 1, j));
      sum += d.norm();
    }
  }
  return sum * fps3 / (static_cast<double>(motion.num_joints()) * (n - 3));
}

std::vector<std::array<bool, 2>> foot_contacts(const MotionSequence& motion, const ContactModel& model) {
  model.validate();
  const auto feet = foot_joints(motion.skeleton());
  std::vector<std::array<bool, 2>> out(motion.num_frames());
  for (int f = 0; f < motion.num_frames(); ++f) {
    for (int k = 0; k < 2; ++k) out[f][k] = motion.joint(f, feet[k]).y() < model.contact_height;
  }
  return out;
}

std::vector<std::array<double, 2>> foot_speeds(const MotionSequence& motion) {
  const auto feet = foot_joints(motion.skeleton());
  const int n = motion.num_frames();
  std::vector<std::array<double, 2>> out(n);
  for (int f = 0; f < n; ++f) {
    const int a = f + 1 < n ? f : f - 1;
    for (int k = 0; k < 2; ++k) {
      out[f][k] = horizontal_distance(motion.joint(a, feet[k]), motion.joint(a + 1, feet[k])) * motion.fps();
    }
  }
  return out;
}

double fsr(const MotionSequence& motion, const ContactModel& model) {
  const auto contact = foot_contacts(motion, model);
  const auto speed = foot_speeds(motion);
  int count = 0;
  for (std::size_t f = 0; f < contact.size(); ++f) {
    bool skating = false;
    for (int k = 0; k < 2; ++k) skating = skating || (contact[f][k] && speed[f][k] > model.skate_speed);
    count += skating ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(contact.size());
}

double ffl(const MotionSequence& motion, const ContactModel& model) {
  model.validate();
  const auto feet = foot_joints(motion.skeleton());
  int count = 0;
  for (int f = 0; f < motion.num_frames(); ++f) {
    const bool both = motion.joint(f, feet[0]).y() > model.float_height &&
                      motion.joint(f, feet[1]).y() > model.float_height;
    count += both ? 1 : 0;
  }
  return static_cast<double>(count) / motion.num_frames();
}

double fsd(const MotionSequence& motion, const ContactModel& model) {
  const auto contact = foot_contacts(motion, model);
  const auto feet = foot_joints(motion.skeleton());
  double total = 0.0;
  for (int f = 0; f + 1 < motion.num_frames(); ++f) {
    for (int k = 0; k < 2; ++k) {
      if (contact[f][k]) total += horizontal_distance(motion.joint(f, feet[k]), motion.joint(f + 1, feet[k]));
    }
  }
  return total / motion.duration();
}

MetricReport evaluate_metrics(const MotionSequence& motion, const ContactModel& model) {
  model.validate();
  MetricReport r;
  r.jitter = jitter(motion);
  r.fsr = fsr(motion, model);
  r.ffl = ffl(motion, model);
  r.fsd = fsd(motion, model);
  r.fps = motion.fps();
  r.model = model;
  return r;
}

MetricReport relative_report(const MetricReport& method, const MetricReport& baseline) {
  if (!(method.model == baseline.model)) throw ValidationError("relative report: contact models differ");
  if (method.fps != baseline.fps) throw ValidationError("relative report: frame rates differ");
  MetricReport out = method;
  out.relative = RelativeMetrics{relative(method.jitter, baseline.jitter), relative(method.fsr, baseline.fsr),
                                 relative(method.ffl, baseline.ffl), relative(method.fsd, baseline.fsd)};
  return out;
}

std::string dump_report(const MetricReport& report, const std::map<std::string, std::string>& inputs) {
  detail::json j;
  j["metrics"] = {{"jitter", report.jitter}, {"fsr", report.fsr}, {"ffl", report.ffl}, {"fsd", report.fsd}};
  j["units"] = {{"jitter", "m/s^3"}, {"fsr", "fraction"}, {"ffl", "fraction"}, {"fsd", "m/s"}};
  j["fps"] = report.fps;
  j["thresholds"] = {{"contact_height", report.model.contact_height},
                     {"skate_speed", report.model.skate_speed},
                     {"float_height", report.model.float_height}};
  j["formulas"] = {{"jitter", "mean-third-forward-difference-norm-fps3"},
                   {"fsr", "fraction-frames-foot-contact-and-horizontal-speed-above-skate"},
                   {"ffl", "fraction-frames-both-toes-above-float"},
                   {"fsd", "sum-contact-horizontal-toe-displacement-over-duration"},
                   {"contact", "toe-height-below-contact-height"}};
  if (report.relative) {
    const auto& r = *report.relative;
    j["relative"] = {{"R-Jitter", r.r_jitter}, {"R-FSR", r.r_fsr}, {"R-FFL", r.r_ffl}, {"R-FSD", r.r_fsd}};
    j["relative_formula"] = "abs(method - baseline) / max(baseline, 1e-9)";
  }
  j["inputs"] = inputs;
  return j.dump(2) + "\n";
}

std::string report_csv(const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::string out = "name,Jitter,FSR,FFL,FSD,R-Jitter,R-FSR,R-FFL,R-FSD\n";
  for (const auto& [name, r] : rows) {
    out += name + "," + fmt(r.jitter) + "," + fmt(r.fsr) + "," + fmt(r.ffl) + "," + fmt(r.fsd);
    if (r.relative) {
      out += "," + fmt(r.relative->r_jitter) + "," + fmt(r.relative->r_fsr) + "," + fmt(r.relative->r_ffl) + "," +
             fmt(r.relative->r_fsd) + "\n";
    } else {
      out += ",,,,\n";
    }
  }
  return out;
}

}  // namespace sparsecue
