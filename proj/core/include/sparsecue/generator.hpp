// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "sparsecue/motion.hpp"
#include "sparsecue/rng.hpp"

namespace sparsecue {

/// Row-per-frame dense matrix used throughout the network.
using Matrix = Eigen::MatrixXd;

/// Masked pose-frame reconstruction network.
///
/// A pose frame is the flattened 22 x 3 joint positions of the humanoid.
/// Each input frame carries the pose (zeroed when masked) plus a mask flag.
/// The network embeds frames, adds a learned prompt embedding, runs a stack
/// of residual temporal blocks with growing dilation, and maps the final
/// hidden state back to pose frames:
///
///   h0      = [pose * (1 - m), m] W_in + b_in + E[text]
///   mix_n   = t_-1 * h_{n-k} + t_0 * h_n + t_+1 * h_{n+k}    (per channel, k = 2^b)
///   h_{b+1} = h_b + tanh(mix W1 + b1) W2 + b2 + inject_b
///   out     = h_L W_out + b_out
struct GeneratorConfig {
  int width = 64;
  int blocks = 4;
  int max_frames = 240;
  int pose_dim = 66;

  bool operator==(const GeneratorConfig&) const = default;
};

/// Closed prompt vocabulary. Id 0 is the empty prompt used for unconditional passes.
const std::vector<std::string>& text_vocabulary();
inline constexpr int kNullText = 0;
/// Throws ValidationError for prompts outside the vocabulary.
int text_id(std::string_view prompt);

struct TemporalBlock {
  Matrix taps;  // 3 x d, for frames n - dilation, n, n + dilation
  Matrix w1;    // d x d
  Matrix b1;    // 1 x d
  Matrix w2;    // d x d
  Matrix b2;    // 1 x d
  int dilation = 1;
};

struct GeneratorParams {
  GeneratorConfig config;
  Matrix w_in;        // (pose_dim + 1) x d
  Matrix b_in;        // 1 x d
  Matrix text_table;  // vocabulary x d
  std::vector<TemporalBlock> blocks;
  Matrix w_out;  // d x pose_dim
  Matrix b_out;  // 1 x pose_dim
};

enum class AdapterKind { kLocal3D, kLocal2D, kGlobal3D };

std::string_view adapter_kind_name(AdapterKind kind);
std::optional<AdapterKind> parse_adapter_kind(std::string_view name);
/// Width of one encoded condition frame.
int condition_width(AdapterKind kind);

/// ControlNet-style branch: a trainable copy of the base blocks driven by an
/// encoded condition, emitting through per-block zero-initialized projections.
struct AdapterParams {
  AdapterKind kind = AdapterKind::kLocal2D;
  Matrix w_cond;  // condition_width x d
  Matrix b_cond;  // 1 x d
  std::vector<TemporalBlock> blocks;
  std::vector<Matrix> out_w;  // per block, d x d
  std::vector<Matrix> out_b;  // per block, 1 x d
};

/// Visits every weight tensor with a stable name, in a stable order.
template <class P, class F>
  requires std::same_as<std::remove_const_t<P>, GeneratorParams>
void for_each_tensor(P& p, F&& f) {
  f(std::string("w_in"), p.w_in);
  f(std::string("b_in"), p.b_in);
  f(std::string("text_table"), p.text_table);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const std::string pre = "block" + std::to_string(b) + ".";
    f(pre + "taps", p.blocks[b].taps);
    f(pre + "w1", p.blocks[b].w1);
    f(pre + "b1", p.blocks[b].b1);
    f(pre + "w2", p.blocks[b].w2);
    f(pre + "b2", p.blocks[b].b2);
  }
  f(std::string("w_out"), p.w_out);
  f(std::string("b_out"), p.b_out);
}

template <class P, class F>
  requires std::same_as<std::remove_const_t<P>, AdapterParams>
void for_each_tensor(P& p, F&& f) {
  f(std::string("w_cond"), p.w_cond);
  f(std::string("b_cond"), p.b_cond);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const std::string pre = "block" + std::to_string(b) + ".";
    f(pre + "taps", p.blocks[b].taps);
    f(pre + "w1", p.blocks[b].w1);
    f(pre + "b1", p.blocks[b].b1);
    f(pre + "w2", p.blocks[b].w2);
    f(pre + "b2", p.blocks[b].b2);
    f(pre + "out_w", p.out_w[b]);
    f(pre + "out_b", p.out_b[b]);
  }
}

/// Same shapes, all zeros. Used as gradient accumulators.
GeneratorParams zeros_like(const GeneratorParams& p);
AdapterParams zeros_like(const AdapterParams& p);

/// Per-block residual features, each N x d.
struct FeatureSeq {
  std::vector<Matrix> blocks;

  static FeatureSeq zeros(int num_blocks, int num_frames, int width);
  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int num_frames() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }
  int width() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].cols()); }
  bool same_shape(const FeatureSeq& o) const;
  bool operator==(const FeatureSeq& o) const;
};

/// Frames selected for reconstruction.
struct MaskSpec {
  std::vector<std::uint8_t> masked;
  double ratio = 0.0;

  int num_frames() const { return static_cast<int>(masked.size()); }
  int count() const;
  bool is_masked(int n) const { return masked[n] != 0; }

  static MaskSpec all(int num_frames);
  static MaskSpec none(int num_frames);
  /// Masks round(ratio * N) frames (at least one) chosen uniformly.
  static MaskSpec random(int num_frames, double ratio, Engine& eng);
};

using Condition = std::variant<SparseCue2D, SparseCue3D, RootTrajectory>;

/// N x condition_width rows: cue coordinates followed by the validity mask for
/// local kinds, the root position for the global kind. Throws ValidationError
/// when the condition does not match `kind`.
Matrix encode_condition(AdapterKind kind, const Condition& condition);

Matrix pose_matrix(const MotionSequence& motion);
MotionSequence pose_motion(const Matrix& poses, double fps);
/// N x (pose_dim + 1) network input: masked poses zeroed plus the mask flag.
Matrix masked_input(const Matrix& poses, const MaskSpec& mask);

GeneratorParams init_generator(const GeneratorConfig& config, std::uint64_t seed);
/// Blocks copied from `base`, output projections exactly zero, condition
/// encoder drawn from `seed`.
AdapterParams init_adapter(const GeneratorParams& base, AdapterKind kind, std::uint64_t seed);
void validate(const GeneratorParams& params);
void validate(const AdapterParams& adapter, const GeneratorParams& base);

/// Prediction for every frame of `poses` (N x pose_dim). Throws on N > max_frames.
Matrix base_forward(const GeneratorParams& params, const Matrix& poses, int text, const MaskSpec& mask);

FeatureSeq adapter_forward(const AdapterParams& adapter, const Condition& condition);

/// Base forward with the sum of `features` added to each block's residual stream.
Matrix conditioned_forward(const GeneratorParams& params, std::span<const FeatureSeq> features,
                           const Matrix& poses, int text, const MaskSpec& mask);

/// Convenience overload running the adapters first. `adapters` and
/// `conditions` are matched by position.
Matrix conditioned_forward(const GeneratorParams& params, std::span<const AdapterParams* const> adapters,
                           std::span<const Condition> conditions, const Matrix& poses, int text,
                           const MaskSpec& mask);

// Training support: traced forwards and the matching reverse passes.

struct BlockTrace {
  Matrix input;  // N x d
  Matrix mix;    // N x d
  Matrix act;    // N x d, tanh output
};

struct BaseTrace {
  Matrix input;  // N x (pose_dim + 1)
  int text = kNullText;
  std::vector<BlockTrace> blocks;
  Matrix last;  // N x d
};

struct AdapterTrace {
  Matrix condition;  // N x condition_width
  std::vector<BlockTrace> blocks;
  std::vector<Matrix> outputs;  // block outputs before projection, N x d
};

/// `injection` may be null. The trace is filled when non-null.
Matrix base_forward_raw(const GeneratorParams& params, const Matrix& input, int text,
                        const FeatureSeq* injection, BaseTrace* trace);

/// Reverse pass from dL/d(out). `grad` receives parameter gradients when
/// non-null; `grad_injection` receives dL/d(inject_b) per block when non-null.
void base_backward(const GeneratorParams& params, const BaseTrace& trace, const Matrix& grad_out,
                   GeneratorParams* grad, FeatureSeq* grad_injection);

FeatureSeq adapter_forward_raw(const AdapterParams& adapter, const Matrix& condition, AdapterTrace* trace);

/// Accumulates parameter gradients of `adapter` into `grad` from dL/d(features).
void adapter_backward(const AdapterParams& adapter, const AdapterTrace& trace, const FeatureSeq& grad_features,
                      AdapterParams& grad);

}  // namespace sparsecue
