// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/motion_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace sparsecue {

using detail::as_array;
using detail::as_number;
using detail::as_pair;
using detail::json;
using detail::require;

namespace {

json skeleton_to_json(const Skeleton& sk) {
  json slots = json::object();
  for (int s = 0; s < kNumSlots; ++s) slots[std::string(slot_names()[s])] = sk.cue_slots()[s];
  return {{"joint_names", sk.joint_names()}, {"parents", sk.parents()}, {"cue_slots", slots}};
}

Skeleton skeleton_from_json(const json& j) {
  const json& names = require(j, "joint_names", "skeleton");
  const json& parents = require(j, "parents", "skeleton");
  const json& slots = require(j, "cue_slots", "skeleton");
  if (!names.is_array() || !parents.is_array() || !slots.is_object()) {
    throw ParseError("skeleton: joint_names/parents must be arrays and cue_slots an object");
  }
  std::vector<std::string> joint_names;
  for (const auto& n : names) {
    if (!n.is_string()) throw ParseError("skeleton: joint names must be strings");
    joint_names.push_back(n.get<std::string>());
  }
  std::vector<int> parent_idx;
  for (const auto& p : parents) {
    if (!p.is_number_integer()) throw ParseError("skeleton: parents must be integers");
    parent_idx.push_back(p.get<int>());
  }
  std::array<int, kNumSlots> slot_idx{};
  for (int s = 0; s < kNumSlots; ++s) {
    const auto it = slots.find(std::string(slot_names()[s]));
    if (it == slots.end()) {
      throw ValidationError("skeleton: cue slot '" + std::string(slot_names()[s]) + "' is not mapped");
    }
    if (!it->is_number_integer()) throw ParseError("skeleton: cue slot indices must be integers");
    slot_idx[s] = it->get<int>();
  }
  for (auto it = slots.begin(); it != slots.end(); ++it) {
    if (!slot_from_name(it.key())) throw ValidationError("skeleton: unknown cue slot '" + it.key() + "'");
  }
  return Skeleton(std::move(joint_names), std::move(parent_idx), slot_idx);
}

double require_fps(const json& doc, std::string_view what) {
  const json& fps = require(doc, "fps", what);
  if (!fps.is_number()) throw ParseError(std::string(what) + ": fps must be a number");
  return fps.get<double>();
}

template <int Dim>
std::string dump_cues_impl(const SparseCue<Dim>& cues) {
  json values = json::array();
  json valid = json::array();
  for (int n = 0; n < cues.num_frames(); ++n) {
    json frame = json::array();
    json mask = json::array();
    for (int s = 0; s < kNumSlots; ++s) {
      const auto v = cues.at(n, s);
      json entry = json::array();
      for (int d = 0; d < Dim; ++d) entry.push_back(v[d]);
      frame.push_back(std::move(entry));
      mask.push_back(cues.valid(n, s));
    }
    values.push_back(std::move(frame));
    valid.push_back(std::move(mask));
  }
  json slots = json::array();
  for (auto name : slot_names()) slots.push_back(std::string(name));
  json doc = {{"kind", Dim == 2 ? "cues2d" : "cues3d"},
              {"fps", cues.fps()},
              {"slots", slots},
              {"cues", values},
              {"valid", valid}};
  return doc.dump();
}

template <int Dim>
SparseCue<Dim> parse_cues_impl(std::string_view text) {
  const std::string what = Dim == 2 ? "cues2d" : "cues3d";
  const json doc = detail::parse_json(text, what);
  const json& kind = require(doc, "kind", what);
  if (kind != what) throw ParseError(what + ": kind is '" + kind.dump() + "'");
  const double fps = require_fps(doc, what);
  if (!(fps > 0.0)) throw ValidationError(what + ": fps must be positive");
  const json& slots = as_array(require(doc, "slots", what), kNumSlots, what + ".slots");
  for (int s = 0; s < kNumSlots; ++s) {
    if (slots[s] != slot_names()[s]) throw ParseError(what + ": slot order differs from the canonical order");
  }
  const json& values = as_array(require(doc, "cues", what), 0, what + ".cues");
  const json& valid = as_array(require(doc, "valid", what), values.size(), what + ".valid");
  std::vector<double> flat;
  std::vector<std::uint8_t> mask;
  for (std::size_t n = 0; n < values.size(); ++n) {
    const std::string where = what + " frame " + std::to_string(n);
    as_array(values[n], kNumSlots, where);
    as_array(valid[n], kNumSlots, where);
    for (int s = 0; s < kNumSlots; ++s) {
      as_array(values[n][s], Dim, where);
      for (int d = 0; d < Dim; ++d) {
        const double x = as_number(values[n][s][d], where);
        if (!std::isfinite(x)) throw ValidationError(where + ": non-finite cue value");
        flat.push_back(x);
      }
      if (!valid[n][s].is_boolean()) throw ParseError(where + ": valid entries must be booleans");
      mask.push_back(valid[n][s].get<bool>() ? 1 : 0);
    }
  }
  return SparseCue<Dim>(fps, std::move(flat), std::move(mask));
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MotionSequence parse_motion(std::string_view text) {
  const json doc = detail::parse_json(text, "motion");
  const double fps = require_fps(doc, "motion");
  Skeleton skeleton = skeleton_from_json(require(doc, "skeleton", "motion"));
  const json& frames = as_array(require(doc, "frames", "motion"), 0, "motion.frames");
  const std::size_t joints = static_cast<std::size_t>(skeleton.num_joints());
  std::vector<double> flat;
  flat.reserve(frames.size() * joints * 3);
  for (std::size_t n = 0; n < frames.size(); ++n) {
    const std::string where = "motion frame " + std::to_string(n);
    as_array(frames[n], joints, where);
    for (std::size_t j = 0; j < joints; ++j) {
      as_array(frames[n][j], 3, where);
      for (int d = 0; d < 3; ++d) flat.push_back(as_number(frames[n][j][d], where));
    }
  }
  return MotionSequence(std::move(skeleton), fps, std::move(flat));
}

std::string dump_motion(const MotionSequence& motion) {
  json frames = json::array();
  for (int n = 0; n < motion.num_frames(); ++n) {
    json frame = json::array();
    for (int j = 0; j < motion.num_joints(); ++j) {
      const auto p = motion.joint(n, j);
      frame.push_back({p.x(), p.y(), p.z()});
    }
    frames.push_back(std::move(frame));
  }
  json doc = {{"fps", motion.fps()}, {"skeleton", skeleton_to_json(motion.skeleton())}, {"frames", frames}};
  return doc.dump();
}

MotionSequence load_motion(const std::filesystem::path& path) { return parse_motion(read_text_file(path)); }

void save_motion(const MotionSequence& motion, const std::filesystem::path& path) {
  write_text_file(path, dump_motion(motion));
}

SparseCue2D parse_cues2d(std::string_view text) { return parse_cues_impl<2>(text); }
SparseCue3D parse_cues3d(std::string_view text) { return parse_cues_impl<3>(text); }
std::string dump_cues(const SparseCue2D& cues) { return dump_cues_impl(cues); }
std::string dump_cues(const SparseCue3D& cues) { return dump_cues_impl(cues); }
SparseCue2D load_cues2d(const std::filesystem::path& path) { return parse_cues2d(read_text_file(path)); }
SparseCue3D load_cues3d(const std::filesystem::path& path) { return parse_cues3d(read_text_file(path)); }
void save_cues(const SparseCue2D& cues, const std::filesystem::path& path) { write_text_file(path, dump_cues(cues)); }
void save_cues(const SparseCue3D& cues, const std::filesystem::path& path) { write_text_file(path, dump_cues(cues)); }

CameraTrack parse_camera(std::string_view text) {
  const json doc = detail::parse_json(text, "camera");
  if (require(doc, "kind", "camera") != "camera") throw ParseError("camera: kind must be 'camera'");
  CameraTrack cam;
  cam.fps = require_fps(doc, "camera");
  cam.focal = as_number(require(doc, "focal", "camera"), "camera.focal");
  const json& pos = as_array(require(doc, "positions", "camera"), 0, "camera.positions");
  const json& rot = as_array(require(doc, "orientations", "camera"), pos.size(), "camera.orientations");
  for (std::size_t n = 0; n < pos.size(); ++n) {
    const std::string where = "camera frame " + std::to_string(n);
    as_array(pos[n], 3, where);
    as_array(rot[n], 4, where);
    cam.positions.emplace_back(as_number(pos[n][0], where), as_number(pos[n][1], where),
                               as_number(pos[n][2], where));
    cam.orientations.emplace_back(as_number(rot[n][0], where), as_number(rot[n][1], where),
                                  as_number(rot[n][2], where), as_number(rot[n][3], where));
  }
  cam.validate();
  return cam;
}

std::string dump_camera(const CameraTrack& cam) {
  json pos = json::array();
  json rot = json::array();
  for (int n = 0; n < cam.num_frames(); ++n) {
    const auto& p = cam.positions[n];
    const auto& q = cam.orientations[n];
    pos.push_back({p.x(), p.y(), p.z()});
    rot.push_back({q.w(), q.x(), q.y(), q.z()});
  }
  json doc = {{"kind", "camera"}, {"fps", cam.fps}, {"focal", cam.focal}, {"positions", pos}, {"orientations", rot}};
  return doc.dump();
}

void save_camera(const CameraTrack& cam, const std::filesystem::path& path) { write_text_file(path, dump_camera(cam)); }
CameraTrack load_camera(const std::filesystem::path& path) { return parse_camera(read_text_file(path)); }

AugmentConfig parse_augment_config(std::string_view text) {
  const json doc = detail::parse_json(text, "augment config");
  if (!doc.is_object()) throw ParseError("augment config: expected a JSON object");
  AugmentConfig cfg;
  if (doc.contains("limb_scale_range")) cfg.limb_scale_range = as_pair(doc["limb_scale_range"], "augment.limb_scale_range");
  if (doc.contains("rotation_range_deg")) cfg.rotation_range_deg = as_pair(doc["rotation_range_deg"], "augment.rotation_range_deg");
  if (doc.contains("noise_sigma")) cfg.noise_sigma = as_number(doc["noise_sigma"], "augment.noise_sigma");
  if (doc.contains("enable")) {
    const json& en = doc["enable"];
    auto flag = [&](const char* key, bool& dst) {
      if (!en.contains(key)) return;
      if (!en[key].is_boolean()) throw ParseError(std::string("augment.enable.") + key + ": expected a boolean");
      dst = en[key].get<bool>();
    };
    flag("scale", cfg.enable_scale);
    flag("rotate", cfg.enable_rotate);
    flag("noise", cfg.enable_noise);
  }
  cfg.validate();
  return cfg;
}

std::string dump_augment_config(const AugmentConfig& cfg) {
  json doc = {{"limb_scale_range", cfg.limb_scale_range},
              {"rotation_range_deg", cfg.rotation_range_deg},
              {"noise_sigma", cfg.noise_sigma},
              {"order", {"scale", "rotate", "noise", "renormalize"}},
              {"enable", {{"scale", cfg.enable_scale}, {"rotate", cfg.enable_rotate}, {"noise", cfg.enable_noise}}}};
  return doc.dump();
}

AugmentConfig load_augment_config(const std::filesystem::path& path) {
  return parse_augment_config(read_text_file(path));
}

CameraRanges parse_camera_ranges(std::string_view text) {
  const json doc = detail::parse_json(text, "camera ranges");
  if (!doc.is_object()) throw ParseError("camera ranges: expected a JSON object");
  CameraRanges r;
  if (doc.contains("azimuth_deg")) r.azimuth_deg = as_pair(doc["azimuth_deg"], "camera.azimuth_deg");
  if (doc.contains("elevation_deg")) r.elevation_deg = as_pair(doc["elevation_deg"], "camera.elevation_deg");
  if (doc.contains("distance")) r.distance = as_pair(doc["distance"], "camera.distance");
  if (doc.contains("drift_speed")) r.drift_speed = as_number(doc["drift_speed"], "camera.drift_speed");
  if (doc.contains("focal")) r.focal = as_number(doc["focal"], "camera.focal");
  r.validate();
  return r;
}

std::string dump_camera_ranges(const CameraRanges& r) {
  json doc = {{"azimuth_deg", r.azimuth_deg},
              {"elevation_deg", r.elevation_deg},
              {"distance", r.distance},
              {"drift_speed", r.drift_speed},
              {"focal", r.focal}};
  return doc.dump();
}

}  // namespace sparsecue
