// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sparsecue/motion.hpp"
#include "sparsecue/projection.hpp"

namespace sparsecue {

// JSON documents. Numbers are written in shortest round-trip form, so
// load(save(x)) reproduces every double bit for bit.
//
// motion:  {"fps", "skeleton": {"joint_names", "parents", "cue_slots": {slot: index}},
//           "frames": [N][J][3]}
// cues:    {"kind": "cues2d" | "cues3d", "fps", "slots": [10 names],
//           "cues": [N][10][D], "valid": [N][10]}
// camera:  {"kind": "camera", "fps", "focal", "positions": [N][3], "orientations": [N][4] (w, x, y, z)}

MotionSequence parse_motion(std::string_view text);
std::string dump_motion(const MotionSequence& motion);
MotionSequence load_motion(const std::filesystem::path& path);
void save_motion(const MotionSequence& motion, const std::filesystem::path& path);

SparseCue2D parse_cues2d(std::string_view text);
SparseCue3D parse_cues3d(std::string_view text);
std::string dump_cues(const SparseCue2D& cues);
std::string dump_cues(const SparseCue3D& cues);
SparseCue2D load_cues2d(const std::filesystem::path& path);
SparseCue3D load_cues3d(const std::filesystem::path& path);
void save_cues(const SparseCue2D& cues, const std::filesystem::path& path);
void save_cues(const SparseCue3D& cues, const std::filesystem::path& path);

CameraTrack parse_camera(std::string_view text);
std::string dump_camera(const CameraTrack& cam);
void save_camera(const CameraTrack& cam, const std::filesystem::path& path);
CameraTrack load_camera(const std::filesystem::path& path);

// {"limb_scale_range": [lo, hi], "rotation_range_deg": [lo, hi], "noise_sigma",
//  "enable": {"scale", "rotate", "noise"}}; missing keys keep their defaults.
AugmentConfig parse_augment_config(std::string_view text);
std::string dump_augment_config(const AugmentConfig& cfg);
AugmentConfig load_augment_config(const std::filesystem::path& path);

// {"azimuth_deg", "elevation_deg", "distance", "drift_speed", "focal"}; missing keys keep defaults.
CameraRanges parse_camera_ranges(std::string_view text);
std::string dump_camera_ranges(const CameraRanges& ranges);

std::string read_text_file(const std::filesystem::path& path);
/// Throws IoError when the file cannot be created or fully written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace sparsecue
