// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sparsecue/motion.hpp"

namespace sparsecue {

enum class MotionPattern { kWalk, kJump, kSway, kStatic };

std::string_view pattern_name(MotionPattern p);
std::optional<MotionPattern> parse_pattern(std::string_view name);

/// Procedural clip parameters. `amplitude` means step length for walk, peak
/// root rise for jump and lateral root excursion for sway; unset picks the
/// pattern default. The clip has round(duration * fps) frames.
struct SynthParams {
  std::optional<double> amplitude;
  double period = 1.0;
  double duration = 2.0;
  double fps = 20.0;
};

double default_amplitude(MotionPattern p);

/// Deterministic for a fixed (pattern, params, seed) on the 22 joint humanoid.
MotionSequence synth_motion(MotionPattern pattern, const SynthParams& params, std::uint64_t seed);

enum class FootPhase : std::uint8_t {
  kStance,      // planted, zero horizontal velocity
  kTransition,  // lifting or lowering in place, not yet clear of the ground
  kFlight,      // clear of the ground, possibly moving
};

/// Per-frame {left, right} foot phase that synth_motion used for the clip.
std::vector<std::array<FootPhase, 2>> synth_foot_schedule(MotionPattern pattern,
                                                          const SynthParams& params,
                                                          std::uint64_t seed);

}  // namespace sparsecue
