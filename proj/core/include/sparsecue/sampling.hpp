// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsecue/generator.hpp"

namespace sparsecue {

struct SampleConfig {
  double cfg_motion = 2.0;
  double cfg_text = 4.0;
  int steps = 4;
  int num_frames = 40;  // used when no cues fix the length
  double fps = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Frames to keep fixed during in-filling. Unmasked frames of `mask` are
/// copied from `poses`; masked ones are generated.
struct Prefill {
  Matrix poses;
  MaskSpec mask;
};

/// p = p_uu + s_text (p_tu - p_uu) + s_motion (p_tc - p_tu)
Matrix combine_guidance(const Matrix& p_uu, const Matrix& p_tu, const Matrix& p_tc, double s_motion,
                        double s_text);

/// Frames revealed at each step: a seeded permutation of `frames`, cut so that
/// step k reveals ceil(remaining / (steps - k)) of them.
std::vector<std::vector<int>> unmask_schedule(const std::vector<int>& frames, int steps, std::uint64_t seed);

/// Iterative masked in-filling with two-condition classifier-free guidance.
/// `adapter`/`condition` may both be null for text-only or unconditional runs;
/// `text` may be kNullText. When s_motion is 0 the adapter is never evaluated.
Matrix cfg_sample(const GeneratorParams& base, const AdapterParams* adapter, const Condition* condition, int text,
                  const SampleConfig& config, const Prefill* prefill = nullptr);

}  // namespace sparsecue
