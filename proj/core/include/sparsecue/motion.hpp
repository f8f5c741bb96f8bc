// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparsecue {

inline constexpr int kNumSlots = 10;

/// The ten canonical cue slots: the root, the head, and two joints per limb.
enum class CueSlot : int {
  kRoot = 0,
  kHead,
  kLeftElbow,
  kRightElbow,
  kLeftHand,
  kRightHand,
  kLeftKnee,
  kRightKnee,
  kLeftFoot,
  kRightFoot,
};

inline constexpr int slot_index(CueSlot s) { return static_cast<int>(s); }

const std::array<std::string_view, kNumSlots>& slot_names();
std::string_view slot_name(CueSlot s);
std::optional<CueSlot> slot_from_name(std::string_view name);

/// Joint hierarchy plus the joints that back each cue slot.
///
/// The constructor rejects anything that is not a single rooted tree or that
/// leaves a cue slot unassigned.
class Skeleton {
 public:
  Skeleton(std::vector<std::string> joint_names, std::vector<int> parents,
           std::array<int, kNumSlots> cue_slots);

  /// SMPL-style 22 joint humanoid used by the synthetic data and the generator.
  static const Skeleton& humanoid22();

  int num_joints() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& joint_names() const { return names_; }
  const std::vector<int>& parents() const { return parents_; }
  const std::array<int, kNumSlots>& cue_slots() const { return slots_; }
  int slot_joint(CueSlot s) const { return slots_[slot_index(s)]; }
  int root() const { return root_; }
  /// Index of the named joint, or -1.
  int find(std::string_view name) const;

  bool operator==(const Skeleton&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<int> parents_;
  std::array<int, kNumSlots> slots_;
  int root_ = 0;
};

/// Timed joint positions (meters, Y-up, right-handed). Frames are stored
/// frame-major as N x J x 3.
class MotionSequence {
 public:
  MotionSequence(Skeleton skeleton, double fps, std::vector<double> frames);

  const Skeleton& skeleton() const { return skeleton_; }
  double fps() const { return fps_; }
  int num_frames() const { return num_frames_; }
  int num_joints() const { return skeleton_.num_joints(); }
  /// Time spanned by the samples, (N - 1) / fps.
  double duration() const { return (num_frames_ - 1) / fps_; }

  Eigen::Vector3d joint(int frame, int j) const {
    const double* p = &frames_[(static_cast<std::size_t>(frame) * num_joints() + j) * 3];
    return {p[0], p[1], p[2]};
  }
  std::span<const double> data() const { return frames_; }

  bool operator==(const MotionSequence&) const = default;

 private:
  Skeleton skeleton_;
  double fps_;
  int num_frames_;
  std::vector<double> frames_;
};

struct RootTrajectory {
  double fps = 0.0;
  std::vector<Eigen::Vector3d> positions;

  int num_frames() const { return static_cast<int>(positions.size()); }
};

/// Per-frame sparse cues over the canonical slots with a validity mask.
/// Invalid slots hold zeros.
template <int Dim>
class SparseCue {
 public:
  using Vec = Eigen::Matrix<double, Dim, 1>;
  static constexpr int kDim = Dim;

  SparseCue() = default;
  SparseCue(double fps, int num_frames);
  SparseCue(double fps, std::vector<double> values, std::vector<std::uint8_t> valid);

  double fps() const { return fps_; }
  int num_frames() const { return static_cast<int>(valid_.size() / kNumSlots); }

  Vec at(int frame, int slot) const {
    return Eigen::Map<const Vec>(&values_[offset(frame, slot)]);
  }
  void set(int frame, int slot, const Vec& v) {
    Eigen::Map<Vec> dst(&values_[offset(frame, slot)]);
    dst = v;
  }
  bool valid(int frame, int slot) const { return valid_[frame * kNumSlots + slot] != 0; }
  void set_valid(int frame, int slot, bool v) { valid_[frame * kNumSlots + slot] = v ? 1 : 0; }

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> valid_mask() const { return valid_; }

  bool operator==(const SparseCue&) const = default;

 private:
  std::size_t offset(int frame, int slot) const {
    return (static_cast<std::size_t>(frame) * kNumSlots + slot) * Dim;
  }

  double fps_ = 0.0;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

using SparseCue2D = SparseCue<2>;
using SparseCue3D = SparseCue<3>;

extern template class SparseCue<2>;
extern template class SparseCue<3>;

/// L2 norm over every valid non-root entry of the whole sequence.
template <int Dim>
double global_norm(const SparseCue<Dim>& cues);

/// Zeroes invalid slots and divides all valid non-root entries by the
/// sequence-global norm. An all-zero sequence is left as is.
template <int Dim>
void normalize_global(SparseCue<Dim>& cues);

RootTrajectory root_trajectory(const MotionSequence& motion);

/// Root-anchored, globally normalized 3D cues; every slot is marked valid.
SparseCue3D extract_cues_3d(const MotionSequence& motion);

/// Linear resampling to a new frame rate over the same time span.
MotionSequence resample(const MotionSequence& motion, double fps);

}  // namespace sparsecue
