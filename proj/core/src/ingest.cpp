// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/ingest.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "sparsecue/motion_io.hpp"

namespace sparsecue {

using detail::as_array;
using detail::as_number;
using detail::json;
using detail::require;

int RawKeypointTrack::find(std::string_view name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

void RawKeypointTrack::validate() const {
  if (!(fps > 0.0)) throw ValidationError("keypoints: fps must be positive");
  if (names.empty()) throw ValidationError("keypoints: need at least one keypoint");
  const std::size_t k = names.size();
  if (confidence.size() % k != 0 || points.size() != confidence.size() * 2) {
    throw ValidationError("keypoints: points/confidence shapes disagree");
  }
  for (int n = 0; n < num_frames(); ++n) {
    for (int i = 0; i < num_keypoints(); ++i) {
      const double c = conf(n, i);
      if (!(c >= 0.0 && c <= 1.0)) {
        throw ValidationError("keypoints: confidence outside [0, 1] at frame " + std::to_string(n) +
                              ", keypoint '" + names[i] + "'");
      }
      if (c > 0.0 && !point(n, i).allFinite()) {
        throw ValidationError("keypoints: non-finite coordinate at frame " + std::to_string(n) +
                              ", keypoint '" + names[i] + "' (confidence " + std::to_string(c) + ")");
      }
    }
  }
}

MappingConfig MappingConfig::human17() {
  MappingConfig m;
  m.slots[slot_index(CueSlot::kRoot)] = {"left_hip", "right_hip"};
  m.slots[slot_index(CueSlot::kHead)] = {"nose"};
  m.slots[slot_index(CueSlot::kLeftElbow)] = {"left_elbow"};
  m.slots[slot_index(CueSlot::kRightElbow)] = {"right_elbow"};
  m.slots[slot_index(CueSlot::kLeftHand)] = {"left_wrist"};
  m.slots[slot_index(CueSlot::kRightHand)] = {"right_wrist"};
  m.slots[slot_index(CueSlot::kLeftKnee)] = {"left_knee"};
  m.slots[slot_index(CueSlot::kRightKnee)] = {"right_knee"};
  m.slots[slot_index(CueSlot::kLeftFoot)] = {"left_ankle"};
  m.slots[slot_index(CueSlot::kRightFoot)] = {"right_ankle"};
  return m;
}

MappingConfig MappingConfig::quadruped() {
  MappingConfig m;
  m.slots[slot_index(CueSlot::kRoot)] = {"left_hip", "right_hip"};
  m.slots[slot_index(CueSlot::kHead)] = {"nose"};
  m.slots[slot_index(CueSlot::kLeftElbow)] = {"left_elbow"};
  m.slots[slot_index(CueSlot::kRightElbow)] = {"right_elbow"};
  m.slots[slot_index(CueSlot::kLeftHand)] = {"left_front_paw"};
  m.slots[slot_index(CueSlot::kRightHand)] = {"right_front_paw"};
  m.slots[slot_index(CueSlot::kLeftKnee)] = {"left_knee"};
  m.slots[slot_index(CueSlot::kRightKnee)] = {"right_knee"};
  m.slots[slot_index(CueSlot::kLeftFoot)] = {"left_back_paw"};
  m.slots[slot_index(CueSlot::kRightFoot)] = {"right_back_paw"};
  return m;
}

MappingConfig MappingConfig::identity() {
  MappingConfig m;
  for (int s = 0; s < kNumSlots; ++s) m.slots[s] = {std::string(slot_names()[s])};
  return m;
}

void MappingConfig::validate(const RawKeypointTrack& track) const {
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) {
    throw ValidationError("mapping: confidence floor must lie in [0, 1]");
  }
  if (slots[0].empty()) throw ValidationError("mapping: the root slot is not mapped");
  for (int s = 0; s < kNumSlots; ++s) {
    for (const auto& name : slots[s]) {
      if (track.find(name) < 0) {
        throw ValidationError("mapping: slot '" + std::string(slot_names()[s]) + "' refers to unknown keypoint '" +
                              name + "'");
      }
    }
  }
}

RawKeypointTrack parse_keypoints(std::string_view text) {
  const json doc = detail::parse_json(text, "keypoints");
  RawKeypointTrack t;
  const json& fps = require(doc, "fps", "keypoints");
  if (!fps.is_number()) throw ParseError("keypoints: fps must be a number");
  t.fps = fps.get<double>();
  for (const auto& n : as_array(require(doc, "names", "keypoints"), 0, "keypoints.names")) {
    if (!n.is_string()) throw ParseError("keypoints: names must be strings");
    t.names.push_back(n.get<std::string>());
  }
  const std::size_t k = t.names.size();
  const json& points = as_array(require(doc, "points", "keypoints"), 0, "keypoints.points");
  const json* conf = doc.contains("confidence") ? &doc["confidence"] : nullptr;
  if (conf) as_array(*conf, points.size(), "keypoints.confidence");
  for (std::size_t n = 0; n < points.size(); ++n) {
    const std::string where = "keypoints frame " + std::to_string(n);
    as_array(points[n], k, where);
    if (conf) as_array((*conf)[n], k, where + " confidence");
    for (std::size_t i = 0; i < k; ++i) {
      as_array(points[n][i], 2, where);
      t.points.push_back(as_number(points[n][i][0], where));
      t.points.push_back(as_number(points[n][i][1], where));
      t.confidence.push_back(conf ? as_number((*conf)[n][i], where + " confidence") : 1.0);
    }
  }
  t.validate();
  return t;
}

std::string dump_keypoints(const RawKeypointTrack& t) {
  json points = json::array();
  json conf = json::array();
  for (int n = 0; n < t.num_frames(); ++n) {
    json fp = json::array();
    json fc = json::array();
    for (int i = 0; i < t.num_keypoints(); ++i) {
      const auto p = t.point(n, i);
      fp.push_back({p.x(), p.y()});
      fc.push_back(t.conf(n, i));
    }
    points.push_back(std::move(fp));
    conf.push_back(std::move(fc));
  }
  json doc = {{"fps", t.fps}, {"names", t.names}, {"points", points}, {"confidence", conf}};
  return doc.dump();
}

RawKeypointTrack load_keypoints(const std::filesystem::path& path) { return parse_keypoints(read_text_file(path)); }

void save_keypoints(const RawKeypointTrack& track, const std::filesystem::path& path) {
  write_text_file(path, dump_keypoints(track));
}

MappingConfig parse_mapping(std::string_view text) {
  const json doc = detail::parse_json(text, "mapping");
  const json& slots = require(doc, "slots", "mapping");
  if (!slots.is_object()) throw ParseError("mapping: slots must be an object");
  MappingConfig m;
  for (auto it = slots.begin(); it != slots.end(); ++it) {
    const auto slot = slot_from_name(it.key());
    if (!slot) throw ParseError("mapping: unknown canonical slot '" + it.key() + "'");
    auto& dst = m.slots[slot_index(*slot)];
    if (it->is_string()) {
      dst.push_back(it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& n : *it) {
        if (!n.is_string()) throw ParseError("mapping: slot '" + it.key() + "' must list keypoint names");
        dst.push_back(n.get<std::string>());
      }
    } else if (!it->is_null()) {
      throw ParseError("mapping: slot '" + it.key() + "' must be a name, a list of names or null");
    }
  }
  if (doc.contains("confidence_floor")) m.confidence_floor = as_number(doc["confidence_floor"], "mapping.confidence_floor");
  return m;
}

std::string dump_mapping(const MappingConfig& m) {
  json slots = json::object();
  for (int s = 0; s < kNumSlots; ++s) {
    const std::string key(slot_names()[s]);
    if (m.slots[s].empty()) {
      slots[key] = nullptr;
    } else if (m.slots[s].size() == 1) {
      slots[key] = m.slots[s][0];
    } else {
      slots[key] = m.slots[s];
    }
  }
  return json{{"slots", slots}, {"confidence_floor", m.confidence_floor}}.dump();
}

MappingConfig load_mapping(const std::filesystem::path& path) { return parse_mapping(read_text_file(path)); }

SparseCue2D map_to_canonical(const RawKeypointTrack& track, const MappingConfig& mapping) {
  track.validate();
  mapping.validate(track);
  std::array<std::vector<int>, kNumSlots> sources;
  for (int s = 0; s < kNumSlots; ++s) {
    for (const auto& name : mapping.slots[s]) sources[s].push_back(track.find(name));
  }

  // Mean pixel position of a slot's sources, or nothing if any is unreliable.
  auto sample = [&](int n, int s) -> std::optional<Eigen::Vector2d> {
    if (sources[s].empty()) return std::nullopt;
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (int k : sources[s]) {
      if (track.conf(n, k) < mapping.confidence_floor || !track.point(n, k).allFinite()) return std::nullopt;
      sum += track.point(n, k);
    }
    return sum / static_cast<double>(sources[s].size());
  };

  SparseCue2D cues(track.fps, track.num_frames());
  for (int n = 0; n < track.num_frames(); ++n) {
    const auto root = sample(n, 0);
    if (!root) {
      throw ValidationError("ingest: root keypoint below the confidence floor at frame " + std::to_string(n));
    }
    cues.set_valid(n, 0, true);
    for (int s = 1; s < kNumSlots; ++s) {
      const auto p = sample(n, s);
      if (!p) continue;
      const Eigen::Vector2d d = *p - *root;
      cues.set(n, s, Eigen::Vector2d(d.x(), -d.y()));
      cues.set_valid(n, s, true);
    }
  }
  normalize_global(cues);
  return cues;
}

RawKeypointTrack project_to_pixels(const MotionSequence& motion, const CameraTrack& cam, const PixelFrame& frame) {
  const auto image = project_slots(motion, cam);
  RawKeypointTrack t;
  t.fps = motion.fps();
  for (auto name : slot_names()) t.names.emplace_back(name);
  const double cx = 0.5 * frame.width;
  const double cy = 0.5 * frame.height;
  for (const auto& slots : image) {
    for (const auto& uv : slots) {
      t.points.push_back(cx + frame.pixel_scale * uv.x());
      t.points.push_back(cy - frame.pixel_scale * uv.y());
      t.confidence.push_back(1.0);
    }
  }
  return t;
}

template <int Dim>
CueDiagnostics validate_cues(const SparseCue<Dim>& cues, double jump_threshold) {
  CueDiagnostics d;
  const int frames = cues.num_frames();
  for (int n = 0; n < frames; ++n) {
    if (cues.valid(n, 0) && cues.at(n, 0).norm() != 0.0) {
      d.violations.push_back({CueViolation::Kind::kRootNotZero, n, 0, cues.at(n, 0).norm()});
    }
    for (int s = 0; s < kNumSlots; ++s) {
      if (!cues.valid(n, s) && cues.at(n, s).norm() != 0.0) {
        d.violations.push_back({CueViolation::Kind::kInvalidNonZero, n, s, cues.at(n, s).norm()});
      }
    }
  }
  d.global_norm = global_norm(cues);
  if (d.global_norm != 0.0 && std::abs(d.global_norm - 1.0) > 1e-9) {
    d.violations.push_back({CueViolation::Kind::kNormNotUnit, -1, -1, d.global_norm});
  }
  for (int s = 0; s < kNumSlots; ++s) {
    int valid = 0;
    for (int n = 0; n < frames; ++n) valid += cues.valid(n, s) ? 1 : 0;
    d.validity_rate[s] = frames > 0 ? static_cast<double>(valid) / frames : 0.0;
    for (int n = 0; n + 1 < frames; ++n) {
      if (!cues.valid(n, s) || !cues.valid(n + 1, s)) continue;
      const double step = (cues.at(n + 1, s) - cues.at(n, s)).norm();
      d.max_displacement[s] = std::max(d.max_displacement[s], step);
      if (step > jump_threshold) d.outliers.push_back({s, n, step});
    }
  }
  return d;
}

template CueDiagnostics validate_cues<2>(const SparseCue<2>&, double);
template CueDiagnostics validate_cues<3>(const SparseCue<3>&, double);

std::string_view violation_name(CueViolation::Kind kind) {
  switch (kind) {
    case CueViolation::Kind::kRootNotZero: return "root_not_zero";
    case CueViolation::Kind::kNormNotUnit: return "norm_not_unit";
    case CueViolation::Kind::kInvalidNonZero: return "invalid_nonzero";
  }
  return "unknown";
}

std::string dump_diagnostics(const CueDiagnostics& d) {
  json violations = json::array();
  for (const auto& v : d.violations) {
    violations.push_back({{"kind", violation_name(v.kind)}, {"frame", v.frame}, {"slot", v.slot}, {"value", v.value}});
  }
  json outliers = json::array();
  for (const auto& o : d.outliers) {
    outliers.push_back({{"slot", slot_names()[o.slot]}, {"frame", o.frame}, {"displacement", o.displacement}});
  }
  json slots = json::object();
  for (int s = 0; s < kNumSlots; ++s) {
    slots[std::string(slot_names()[s])] = {{"validity_rate", d.validity_rate[s]},
                                           {"max_displacement", d.max_displacement[s]}};
  }
  json doc = {{"ok", d.ok()},
              {"global_norm", d.global_norm},
              {"violations", violations},
              {"slots", slots},
              {"displacement_outliers", outliers}};
  return doc.dump(2);
}

}  // namespace sparsecue
