// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/motion.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecue/error.hpp"

namespace sparsecue {

const std::array<std::string_view, kNumSlots>& slot_names() {
  static constexpr std::array<std::string_view, kNumSlots> kNames = {
      "root",       "head",      "left_elbow", "right_elbow", "left_hand",
      "right_hand", "left_knee", "right_knee", "left_foot",   "right_foot"};
  return kNames;
}

std::string_view slot_name(CueSlot s) { return slot_names()[slot_index(s)]; }

std::optional<CueSlot> slot_from_name(std::string_view name) {
  const auto& names = slot_names();
  for (int i = 0; i < kNumSlots; ++i) {
    if (names[i] == name) return static_cast<CueSlot>(i);
  }
  return std::nullopt;
}

Skeleton::Skeleton(std::vector<std::string> joint_names, std::vector<int> parents,
                   std::array<int, kNumSlots> cue_slots)
    : names_(std::move(joint_names)), parents_(std::move(parents)), slots_(cue_slots) {
  const int n = static_cast<int>(names_.size());
  if (n == 0) throw ValidationError("skeleton: no joints");
  if (static_cast<int>(parents_.size()) != n) {
    throw ValidationError("skeleton: parents has " + std::to_string(parents_.size()) +
                          " entries for " + std::to_string(n) + " joints");
  }
  int roots = 0;
  for (int j = 0; j < n; ++j) {
    const int p = parents_[j];
    if (p == -1) {
      ++roots;
      root_ = j;
    } else if (p < 0 || p >= n || p == j) {
      throw ValidationError("skeleton: joint '" + names_[j] + "' has invalid parent " +
                            std::to_string(p));
    }
  }
  if (roots != 1) {
    throw ValidationError("skeleton: expected exactly one root, found " + std::to_string(roots));
  }
  // Every joint must reach the root within n hops, otherwise there is a cycle.
  for (int j = 0; j < n; ++j) {
    int cur = j;
    int hops = 0;
    while (parents_[cur] != -1) {
      cur = parents_[cur];
      if (++hops > n) {
        throw ValidationError("skeleton: cycle through joint '" + names_[j] + "'");
      }
    }
  }
  for (int s = 0; s < kNumSlots; ++s) {
    if (slots_[s] < 0 || slots_[s] >= n) {
      throw ValidationError("skeleton: cue slot '" + std::string(slot_names()[s]) +
                            "' is not mapped to a joint");
    }
  }
  if (slots_[slot_index(CueSlot::kRoot)] != root_) {
    throw ValidationError("skeleton: root cue slot must be the skeleton root");
  }
}

const Skeleton& Skeleton::humanoid22() {
  static const Skeleton kSkeleton(
      {"pelvis", "left_hip", "right_hip", "spine1", "left_knee", "right_knee", "spine2",
       "left_ankle", "right_ankle", "spine3", "left_foot", "right_foot", "neck", "left_collar",
       "right_collar", "head", "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
       "left_wrist", "right_wrist"},
      {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19},
      {0, 15, 18, 19, 20, 21, 4, 5, 10, 11});
  return kSkeleton;
}

int Skeleton::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

MotionSequence::MotionSequence(Skeleton skeleton, double fps, std::vector<double> frames)
    : skeleton_(std::move(skeleton)), fps_(fps), frames_(std::move(frames)) {
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    throw ValidationError("motion: fps must be positive, got " + std::to_string(fps_));
  }
  const std::size_t per_frame = static_cast<std::size_t>(skeleton_.num_joints()) * 3;
  if (frames_.size() % per_frame != 0) {
    throw ValidationError("motion: frame buffer is not a multiple of J*3");
  }
  num_frames_ = static_cast<int>(frames_.size() / per_frame);
  if (num_frames_ < 2) {
    throw ValidationError("motion: need at least 2 frames, got " + std::to_string(num_frames_));
  }
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (!std::isfinite(frames_[i])) {
      throw ValidationError("motion: non-finite coordinate at frame " +
                            std::to_string(i / per_frame));
    }
  }
}

template <int Dim>
SparseCue<Dim>::SparseCue(double fps, int num_frames)
    : fps_(fps),
      values_(static_cast<std::size_t>(num_frames) * kNumSlots * Dim, 0.0),
      valid_(static_cast<std::size_t>(num_frames) * kNumSlots, 0) {}

template <int Dim>
SparseCue<Dim>::SparseCue(double fps, std::vector<double> values, std::vector<std::uint8_t> valid)
    : fps_(fps), values_(std::move(values)), valid_(std::move(valid)) {
  if (valid_.size() % kNumSlots != 0 || values_.size() != valid_.size() * Dim) {
    throw ValidationError("cues: value/mask shapes disagree");
  }
}

template class SparseCue<2>;
template class SparseCue<3>;

template <int Dim>
double global_norm(const SparseCue<Dim>& cues) {
  double sq = 0.0;
  for (int n = 0; n < cues.num_frames(); ++n) {
    for (int s = 1; s < kNumSlots; ++s) {
      if (cues.valid(n, s)) sq += cues.at(n, s).squaredNorm();
    }
  }
  return std::sqrt(sq);
}

template <int Dim>
void normalize_global(SparseCue<Dim>& cues) {
  using Vec = typename SparseCue<Dim>::Vec;
  for (int n = 0; n < cues.num_frames(); ++n) {
    cues.set(n, 0, Vec::Zero());
    for (int s = 1; s < kNumSlots; ++s) {
      if (!cues.valid(n, s)) cues.set(n, s, Vec::Zero());
    }
  }
  const double norm = global_norm(cues);
  if (norm == 0.0) return;
  for (int n = 0; n < cues.num_frames(); ++n) {
    for (int s = 1; s < kNumSlots; ++s) {
      if (cues.valid(n, s)) cues.set(n, s, cues.at(n, s) / norm);
    }
  }
}

template double global_norm<2>(const SparseCue<2>&);
template double global_norm<3>(const SparseCue<3>&);
template void normalize_global<2>(SparseCue<2>&);
template void normalize_global<3>(SparseCue<3>&);

RootTrajectory root_trajectory(const MotionSequence& motion) {
  RootTrajectory t;
  t.fps = motion.fps();
  t.positions.reserve(motion.num_frames());
  const int root = motion.skeleton().root();
  for (int n = 0; n < motion.num_frames(); ++n) t.positions.push_back(motion.joint(n, root));
  return t;
}

SparseCue3D extract_cues_3d(const MotionSequence& motion) {
  SparseCue3D cues(motion.fps(), motion.num_frames());
  const auto& slots = motion.skeleton().cue_slots();
  for (int n = 0; n < motion.num_frames(); ++n) {
    const Eigen::Vector3d root = motion.joint(n, slots[0]);
    for (int s = 0; s < kNumSlots; ++s) {
      cues.set(n, s, motion.joint(n, slots[s]) - root);
      cues.set_valid(n, s, true);
    }
  }
  normalize_global(cues);
  return cues;
}

MotionSequence resample(const MotionSequence& motion, double fps) {
  if (!(fps > 0.0)) throw ValidationError("resample: fps must be positive");
  const double span = motion.duration();
  const int n_out = std::max(2, static_cast<int>(std::floor(span * fps + 1e-9)) + 1);
  const int joints = motion.num_joints();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_out) * joints * 3);
  const auto src = motion.data();
  for (int n = 0; n < n_out; ++n) {
    const double pos = std::min(n / fps * motion.fps(), double(motion.num_frames() - 1));
    const int i0 = std::min(static_cast<int>(std::floor(pos)), motion.num_frames() - 2);
    const double w = pos - i0;
    for (int k = 0; k < joints * 3; ++k) {
      const double a = src[static_cast<std::size_t>(i0) * joints * 3 + k];
      const double b = src[static_cast<std::size_t>(i0 + 1) * joints * 3 + k];
      out.push_back(a + w * (b - a));
    }
  }
  return MotionSequence(motion.skeleton(), fps, std::move(out));
}

}  // namespace sparsecue
