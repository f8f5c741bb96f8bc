// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecue/motion.hpp"
#include "sparsecue/projection.hpp"

namespace sparsecue {

/// Externally estimated 2D keypoints in pixels (origin top-left, Y down).
struct RawKeypointTrack {
  double fps = 0.0;
  std::vector<std::string> names;
  std::vector<double> points;      // N x K x 2
  std::vector<double> confidence;  // N x K, 1 when the file omits it

  int num_keypoints() const { return static_cast<int>(names.size()); }
  int num_frames() const {
    return names.empty() ? 0 : static_cast<int>(confidence.size() / names.size());
  }
  Eigen::Vector2d point(int frame, int k) const {
    const std::size_t i = (static_cast<std::size_t>(frame) * names.size() + k) * 2;
    return {points[i], points[i + 1]};
  }
  double conf(int frame, int k) const { return confidence[static_cast<std::size_t>(frame) * names.size() + k]; }
  int find(std::string_view name) const;
  void validate() const;
};

/// Canonical slot -> source keypoints. A slot backed by several names takes
/// their mean and is valid only when all of them are.
struct MappingConfig {
  std::array<std::vector<std::string>, kNumSlots> slots;
  double confidence_floor = 0.3;

  /// COCO-17 human layout; the root is the hip midpoint.
  static MappingConfig human17();
  /// AP-10K style quadruped layout: front legs act as arms, hind legs as legs.
  static MappingConfig quadruped();
  /// Every slot maps to a keypoint carrying the slot's own name.
  static MappingConfig identity();

  void validate(const RawKeypointTrack& track) const;
};

// keypoints: {"fps", "names": [K], "points": [N][K][2], "confidence"?: [N][K]}
// mapping:   {"slots": {slot: name | [names]}, "confidence_floor"?}
RawKeypointTrack parse_keypoints(std::string_view text);
std::string dump_keypoints(const RawKeypointTrack& track);
RawKeypointTrack load_keypoints(const std::filesystem::path& path);
void save_keypoints(const RawKeypointTrack& track, const std::filesystem::path& path);

MappingConfig parse_mapping(std::string_view text);
std::string dump_mapping(const MappingConfig& mapping);
MappingConfig load_mapping(const std::filesystem::path& path);

/// Masks low-confidence or unmapped slots, flips Y up, anchors the root and
/// normalizes globally. Throws ValidationError if the root is invalid in any frame.
SparseCue2D map_to_canonical(const RawKeypointTrack& track, const MappingConfig& mapping);

struct PixelFrame {
  double width = 1920.0;
  double height = 1080.0;
  double pixel_scale = 1000.0;  // pixels per normalized image unit
};

/// Renders the cue joints of `motion` as a keypoint track named after the
/// canonical slots, as an external estimator would report them.
RawKeypointTrack project_to_pixels(const MotionSequence& motion, const CameraTrack& cam,
                                   const PixelFrame& frame = {});

struct CueViolation {
  enum class Kind { kRootNotZero, kNormNotUnit, kInvalidNonZero } kind;
  int frame = -1;  // -1 for sequence-level findings
  int slot = -1;
  double value = 0.0;
};

struct DisplacementOutlier {
  int slot;
  int frame;  // displacement measured from `frame` to `frame + 1`
  double displacement;
};

struct CueDiagnostics {
  std::vector<CueViolation> violations;
  double global_norm = 0.0;
  std::array<double, kNumSlots> validity_rate{};
  std::array<double, kNumSlots> max_displacement{};
  std::vector<DisplacementOutlier> outliers;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kDefaultJumpThreshold = 0.25;

template <int Dim>
CueDiagnostics validate_cues(const SparseCue<Dim>& cues, double jump_threshold = kDefaultJumpThreshold);

std::string_view violation_name(CueViolation::Kind kind);
std::string dump_diagnostics(const CueDiagnostics& diag);

}  // namespace sparsecue
