// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecue/checkpoint.hpp"
#include "sparsecue/generator.hpp"
#include "sparsecue/projection.hpp"
#include "sparsecue/synth.hpp"

namespace sparsecue {

enum class Stage { kBase, kStage3D, kStage2D };

std::string_view stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

/// Adapter roles inside a training state or checkpoint.
namespace roles {
inline constexpr const char* kLocal3D = "3d-la";
inline constexpr const char* kGlobal3D = "3d-ga";
inline constexpr const char* kLocal2D = "2d-la";
inline constexpr const char* kLocal3DInput = "3d-input-la";
}  // namespace roles

struct Ablations {
  bool no_3dga = false;
  bool no_lo = false;
  bool no_l3d = false;
  bool freeze_3dga = false;
  bool use_3d_input = false;
};

/// Procedural training corpus.
struct DataConfig {
  int num_clips = 256;
  int clip_frames = 40;
  double fps = 20.0;
  int val_clips = 32;
  // Pattern mix: walk, jump, sway, static.
  std::array<double, 4> pattern_weights{0.35, 0.25, 0.25, 0.15};
};

struct TrainConfig {
  double lambda1 = 0.01;
  double lambda2 = 10.0;
  double learning_rate = 2e-4;
  int batch_size = 64;
  int epochs = 30;       // split evenly between the two adapter stages
  int base_epochs = 30;  // base pretraining
  double mask_ratio = 0.25;  // lower bound of the per-clip mask ratio
  double text_dropout = 0.1;  // base pretraining only
  double global_dropout = 0.5;  // adapter stages: chance of training a clip without 3D-GA
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  bool allow_cold_start = false;
  GeneratorConfig model;
  DataConfig data;
  AugmentConfig augment;
  CameraRanges camera;
  Ablations ablate;

  void validate() const;
  /// Epochs run by `stage`.
  int stage_epochs(Stage stage) const;
};

struct StepLoss {
  int step = 0;
  int epoch = 0;
  double l_base = 0.0;
  double l_o = 0.0;
  double l_3d = 0.0;
  double total = 0.0;
};

/// End-of-epoch means over the fixed validation batch.
struct EpochRecord {
  int epoch = 0;
  double l_base = 0.0;
  double l_o = 0.0;
  double l_3d = 0.0;
};

struct AdamMoments {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  long long t = 0;
};

struct TrainState {
  Stage stage = Stage::kBase;
  GeneratorParams base;
  std::map<std::string, AdapterParams> adapters;
  std::map<std::string, AdamMoments> moments;
  int epoch = 0;
  long long step = 0;
  std::vector<StepLoss> history;
  std::vector<EpochRecord> validation;

  Checkpoint to_checkpoint() const;
  static TrainState from_checkpoint(const Checkpoint& ck);
};

/// One procedural clip with everything the stages need.
struct Clip {
  MotionPattern pattern = MotionPattern::kStatic;
  int text = kNullText;
  MotionSequence motion;
  Matrix poses;
  SparseCue3D cues3d;
  RootTrajectory trajectory;
};

std::string_view pattern_prompt(MotionPattern p);
/// Deterministic per (seed, stream, index).
Clip make_clip(const DataConfig& data, std::uint64_t seed, std::string_view stream, int index);
std::vector<Clip> make_clips(const DataConfig& data, std::uint64_t seed, std::string_view stream, int count);

/// Per-stage data for one clip within one epoch: the mask, the prompt (after
/// dropout in base pretraining) and, for the 2D stage, the projected and
/// augmented cues under a fresh camera.
struct StageItem {
  MaskSpec mask;
  int text = kNullText;
  bool drop_global = false;
  std::optional<SparseCue2D> cues2d;
};
StageItem make_stage_item(const TrainConfig& cfg, Stage stage, const Clip& clip, std::uint64_t seed,
                          std::string_view stream, int epoch, int index);

/// Base pretraining on L_base with prompt dropout.
TrainState train_base(const TrainConfig& cfg);

/// Optimizes 3D-LA and 3D-GA on L_base + lambda1 L_O over a frozen base.
TrainState train_stage_3d(const GeneratorParams& base, const TrainConfig& cfg);

/// Optimizes 2D-LA (or the 3D-input local adapter) and 3D-GA on
/// L_base + lambda1 L_O + lambda2 L_3D with the stage-1 3D-LA frozen.
TrainState train_stage_2d(const GeneratorParams& base, const TrainState* stage3d, const TrainConfig& cfg);

/// Loss terms and weighted total for one clip without updating anything.
StepLoss evaluate_item(const TrainState& state, const TrainConfig& cfg, Stage stage, const Clip& clip,
                       const StageItem& item);

/// Mean cos^2 between 3D-GA and the stage's local adapter features over `clips`.
double mean_ortho(const TrainState& state, const TrainConfig& cfg, Stage stage, const std::vector<Clip>& clips,
                  std::string_view stream);

std::string loss_table_csv(const std::vector<StepLoss>& history);
std::string validation_csv(const std::vector<EpochRecord>& records);

enum class LossTerm { kBase, kOrtho, kAlign3D };

struct GradCheckResult {
  double max_rel_error = 0.0;
  int coordinates = 0;
};

/// Central-difference check of `analytic` against `loss` over every entry of
/// `params` (or `max_coords` evenly spaced entries when positive).
GradCheckResult grad_check(const std::function<double()>& loss, const std::vector<Matrix*>& params,
                           const std::vector<Matrix>& analytic, double eps, int max_coords = 0);

/// Builds a toy network (d = 8, two blocks, N = 6) with nonzero adapter output
/// projections and checks the gradient of `term` through the adapters.
GradCheckResult check_loss_gradient(LossTerm term, std::uint64_t seed, double eps = 1e-5);

}  // namespace sparsecue
