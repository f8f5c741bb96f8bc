// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/generator.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecue/error.hpp"

namespace sparsecue {
namespace {

Matrix random_normal(int rows, int cols, double stddev, Engine& eng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  // Column-major fill order is part of the seed contract.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = dist(eng);
  }
  return m;
}

Matrix temporal_mix(const Matrix& h, const Matrix& taps, int dilation) {
  const int n = static_cast<int>(h.rows());
  Matrix mix = h.array().rowwise() * taps.row(1).array();
  const int span = n - dilation;
  if (span > 0) {
    mix.bottomRows(span).array() += h.topRows(span).array().rowwise() * taps.row(0).array();
    mix.topRows(span).array() += h.bottomRows(span).array().rowwise() * taps.row(2).array();
  }
  return mix;
}

Matrix block_forward(const TemporalBlock& blk, const Matrix& h, const Matrix* injection, BlockTrace* trace) {
  Matrix mix = temporal_mix(h, blk.taps, blk.dilation);
  Matrix pre = mix * blk.w1;
  pre.rowwise() += blk.b1.row(0);
  Matrix act = pre.array().tanh().matrix();
  Matrix out = h + act * blk.w2;
  out.rowwise() += blk.b2.row(0);
  if (injection != nullptr) out += *injection;
  if (trace != nullptr) {
    trace->input = h;
    trace->mix = std::move(mix);
    trace->act = std::move(act);
  }
  return out;
}

// Returns dL/d(input); accumulates parameter gradients into `grad` when given.
Matrix block_backward(const TemporalBlock& blk, const BlockTrace& tr, const Matrix& grad_out, TemporalBlock* grad) {
  const int n = static_cast<int>(tr.input.rows());
  const int span = n - blk.dilation;
  Matrix grad_act = grad_out * blk.w2.transpose();
  Matrix grad_pre = (grad_act.array() * (1.0 - tr.act.array().square())).matrix();
  Matrix grad_mix = grad_pre * blk.w1.transpose();
  if (grad != nullptr) {
    grad->w2.noalias() += tr.act.transpose() * grad_out;
    grad->b2 += grad_out.colwise().sum();
    grad->w1.noalias() += tr.mix.transpose() * grad_pre;
    grad->b1 += grad_pre.colwise().sum();
    grad->taps.row(1) += (grad_mix.array() * tr.input.array()).colwise().sum().matrix();
    if (span > 0) {
      grad->taps.row(0) += (grad_mix.bottomRows(span).array() * tr.input.topRows(span).array()).colwise().sum().matrix();
      grad->taps.row(2) += (grad_mix.topRows(span).array() * tr.input.bottomRows(span).array()).colwise().sum().matrix();
    }
  }
  Matrix grad_in = grad_out;
  grad_in.array() += grad_mix.array().rowwise() * blk.taps.row(1).array();
  if (span > 0) {
    grad_in.topRows(span).array() += grad_mix.bottomRows(span).array().rowwise() * blk.taps.row(0).array();
    grad_in.bottomRows(span).array() += grad_mix.topRows(span).array().rowwise() * blk.taps.row(2).array();
  }
  return grad_in;
}

TemporalBlock zero_block(const TemporalBlock& b) {
  TemporalBlock z;
  z.taps = Matrix::Zero(b.taps.rows(), b.taps.cols());
  z.w1 = Matrix::Zero(b.w1.rows(), b.w1.cols());
  z.b1 = Matrix::Zero(b.b1.rows(), b.b1.cols());
  z.w2 = Matrix::Zero(b.w2.rows(), b.w2.cols());
  z.b2 = Matrix::Zero(b.b2.rows(), b.b2.cols());
  z.dilation = b.dilation;
  return z;
}

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ValidationError(what + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw ValidationError(what + ": non-finite weights");
}

void check_blocks(const std::vector<TemporalBlock>& blocks, int count, int d, const std::string& what) {
  if (static_cast<int>(blocks.size()) != count) throw ValidationError(what + ": wrong number of blocks");
  for (int b = 0; b < count; ++b) {
    const std::string pre = what + ".block" + std::to_string(b);
    check_shape(blocks[b].taps, 3, d, pre + ".taps");
    check_shape(blocks[b].w1, d, d, pre + ".w1");
    check_shape(blocks[b].b1, 1, d, pre + ".b1");
    check_shape(blocks[b].w2, d, d, pre + ".w2");
    check_shape(blocks[b].b2, 1, d, pre + ".b2");
    if (blocks[b].dilation != (1 << b)) throw ValidationError(pre + ": unexpected dilation");
  }
}

void check_length(const GeneratorConfig& cfg, Eigen::Index frames) {
  if (frames > cfg.max_frames) {
    throw ValidationError("generator: sequence of " + std::to_string(frames) + " frames exceeds the maximum of " +
                          std::to_string(cfg.max_frames));
  }
  if (frames < 1) throw ValidationError("generator: empty sequence");
}

// Rescales a globally normalized cue sequence so that entries have unit RMS.
template <int Dim>
double cue_gain(const SparseCue<Dim>& cues) {
  int count = 0;
  for (int n = 0; n < cues.num_frames(); ++n) {
    for (int s = 1; s < kNumSlots; ++s) count += cues.valid(n, s) ? Dim : 0;
  }
  return std::sqrt(static_cast<double>(std::max(count, 1)));
}

template <int Dim>
Matrix encode_cues(const SparseCue<Dim>& cues) {
  const double gain = cue_gain(cues);
  Matrix m(cues.num_frames(), kNumSlots * (Dim + 1));
  for (int n = 0; n < cues.num_frames(); ++n) {
    for (int s = 0; s < kNumSlots; ++s) {
      const auto v = cues.at(n, s);
      for (int d = 0; d < Dim; ++d) m(n, s * Dim + d) = gain * v[d];
      m(n, kNumSlots * Dim + s) = cues.valid(n, s) ? 1.0 : 0.0;
    }
  }
  return m;
}

}  // namespace

const std::vector<std::string>& text_vocabulary() {
  static const std::vector<std::string> kVocab = {"", "walk forward", "jump", "sway side to side", "stand still"};
  return kVocab;
}

int text_id(std::string_view prompt) {
  const auto& vocab = text_vocabulary();
  const auto it = std::find(vocab.begin(), vocab.end(), prompt);
  if (it == vocab.end()) throw ValidationError("unknown prompt '" + std::string(prompt) + "'");
  return static_cast<int>(it - vocab.begin());
}

std::string_view adapter_kind_name(AdapterKind kind) {
  switch (kind) {
    case AdapterKind::kLocal3D: return "3d-la";
    case AdapterKind::kLocal2D: return "2d-la";
    case AdapterKind::kGlobal3D: return "3d-ga";
  }
  return "unknown";
}

std::optional<AdapterKind> parse_adapter_kind(std::string_view name) {
  for (auto k : {AdapterKind::kLocal3D, AdapterKind::kLocal2D, AdapterKind::kGlobal3D}) {
    if (adapter_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

int condition_width(AdapterKind kind) {
  switch (kind) {
    case AdapterKind::kLocal3D: return kNumSlots * 4;
    case AdapterKind::kLocal2D: return kNumSlots * 3;
    case AdapterKind::kGlobal3D: return 3;
  }
  return 0;
}

GeneratorParams zeros_like(const GeneratorParams& p) {
  GeneratorParams z;
  z.config = p.config;
  z.w_in = Matrix::Zero(p.w_in.rows(), p.w_in.cols());
  z.b_in = Matrix::Zero(p.b_in.rows(), p.b_in.cols());
  z.text_table = Matrix::Zero(p.text_table.rows(), p.text_table.cols());
  for (const auto& b : p.blocks) z.blocks.push_back(zero_block(b));
  z.w_out = Matrix::Zero(p.w_out.rows(), p.w_out.cols());
  z.b_out = Matrix::Zero(p.b_out.rows(), p.b_out.cols());
  return z;
}

AdapterParams zeros_like(const AdapterParams& p) {
  AdapterParams z;
  z.kind = p.kind;
  z.w_cond = Matrix::Zero(p.w_cond.rows(), p.w_cond.cols());
  z.b_cond = Matrix::Zero(p.b_cond.rows(), p.b_cond.cols());
  for (const auto& b : p.blocks) z.blocks.push_back(zero_block(b));
  for (const auto& w : p.out_w) z.out_w.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : p.out_b) z.out_b.push_back(Matrix::Zero(b.rows(), b.cols()));
  return z;
}

FeatureSeq FeatureSeq::zeros(int num_blocks, int num_frames, int width) {
  FeatureSeq f;
  f.blocks.assign(num_blocks, Matrix::Zero(num_frames, width));
  return f;
}

bool FeatureSeq::same_shape(const FeatureSeq& o) const {
  if (blocks.size() != o.blocks.size()) return false;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].rows() != o.blocks[b].rows() || blocks[b].cols() != o.blocks[b].cols()) return false;
  }
  return true;
}

bool FeatureSeq::operator==(const FeatureSeq& o) const {
  if (!same_shape(o)) return false;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b] != o.blocks[b]) return false;
  }
  return true;
}

int MaskSpec::count() const {
  return static_cast<int>(std::count_if(masked.begin(), masked.end(), [](std::uint8_t m) { return m != 0; }));
}

MaskSpec MaskSpec::all(int num_frames) { return {std::vector<std::uint8_t>(num_frames, 1), 1.0}; }

MaskSpec MaskSpec::none(int num_frames) { return {std::vector<std::uint8_t>(num_frames, 0), 0.0}; }

MaskSpec MaskSpec::random(int num_frames, double ratio, Engine& eng) {
  const int k = std::clamp(static_cast<int>(std::lround(ratio * num_frames)), 1, num_frames);
  std::vector<int> order(num_frames);
  for (int i = 0; i < num_frames; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), eng);
  MaskSpec m = none(num_frames);
  for (int i = 0; i < k; ++i) m.masked[order[i]] = 1;
  m.ratio = static_cast<double>(k) / num_frames;
  return m;
}

Matrix encode_condition(AdapterKind kind, const Condition& condition) {
  switch (kind) {
    case AdapterKind::kLocal2D:
      if (const auto* c = std::get_if<SparseCue2D>(&condition)) return encode_cues(*c);
      break;
    case AdapterKind::kLocal3D:
      if (const auto* c = std::get_if<SparseCue3D>(&condition)) return encode_cues(*c);
      break;
    case AdapterKind::kGlobal3D:
      if (const auto* t = std::get_if<RootTrajectory>(&condition)) {
        Matrix m(t->num_frames(), 3);
        for (int n = 0; n < t->num_frames(); ++n) m.row(n) = t->positions[n].transpose();
        return m;
      }
      break;
  }
  throw ValidationError("adapter " + std::string(adapter_kind_name(kind)) + ": condition kind mismatch");
}

Matrix pose_matrix(const MotionSequence& motion) {
  const int cols = motion.num_joints() * 3;
  Matrix m(motion.num_frames(), cols);
  const auto data = motion.data();
  for (int n = 0; n < motion.num_frames(); ++n) {
    for (int c = 0; c < cols; ++c) m(n, c) = data[static_cast<std::size_t>(n) * cols + c];
  }
  return m;
}

MotionSequence pose_motion(const Matrix& poses, double fps) {
  const Skeleton& sk = Skeleton::humanoid22();
  if (poses.cols() != sk.num_joints() * 3) {
    throw ValidationError("pose frames do not match the 22 joint humanoid");
  }
  std::vector<double> flat(static_cast<std::size_t>(poses.size()));
  for (Eigen::Index n = 0; n < poses.rows(); ++n) {
    for (Eigen::Index c = 0; c < poses.cols(); ++c) flat[n * poses.cols() + c] = poses(n, c);
  }
  return MotionSequence(sk, fps, std::move(flat));
}

Matrix masked_input(const Matrix& poses, const MaskSpec& mask) {
  if (mask.num_frames() != poses.rows()) throw ValidationError("mask length differs from the pose sequence");
  Matrix x(poses.rows(), poses.cols() + 1);
  for (Eigen::Index n = 0; n < poses.rows(); ++n) {
    const bool m = mask.is_masked(static_cast<int>(n));
    x.row(n).head(poses.cols()) = m ? Eigen::RowVectorXd::Zero(poses.cols()) : Eigen::RowVectorXd(poses.row(n));
    x(n, poses.cols()) = m ? 1.0 : 0.0;
  }
  return x;
}

GeneratorParams init_generator(const GeneratorConfig& config, std::uint64_t seed) {
  if (config.width < 1 || config.blocks < 1 || config.max_frames < 1 || config.pose_dim < 1) {
    throw ValidationError("generator: width, blocks, max_frames and pose_dim must be positive");
  }
  Engine eng = make_engine(seed, "generator-init");
  const int d = config.width;
  GeneratorParams p;
  p.config = config;
  p.w_in = random_normal(config.pose_dim + 1, d, 1.0 / std::sqrt(config.pose_dim + 1.0), eng);
  p.b_in = Matrix::Zero(1, d);
  p.text_table = random_normal(static_cast<int>(text_vocabulary().size()), d, 0.5, eng);
  for (int b = 0; b < config.blocks; ++b) {
    TemporalBlock blk;
    blk.taps = random_normal(3, d, 0.3, eng);
    blk.taps.row(1).array() += 1.0;
    blk.w1 = random_normal(d, d, 1.0 / std::sqrt(d), eng);
    blk.b1 = Matrix::Zero(1, d);
    blk.w2 = random_normal(d, d, 0.5 / std::sqrt(d), eng);
    blk.b2 = Matrix::Zero(1, d);
    blk.dilation = 1 << b;
    p.blocks.push_back(std::move(blk));
  }
  p.w_out = random_normal(d, config.pose_dim, 1.0 / std::sqrt(d), eng);
  p.b_out = Matrix::Zero(1, config.pose_dim);
  return p;
}

AdapterParams init_adapter(const GeneratorParams& base, AdapterKind kind, std::uint64_t seed) {
  validate(base);
  Engine eng = make_engine(seed, "adapter-init", static_cast<std::uint64_t>(kind));
  const int d = base.config.width;
  const int c = condition_width(kind);
  AdapterParams a;
  a.kind = kind;
  a.w_cond = random_normal(c, d, 1.0 / std::sqrt(c), eng);
  a.b_cond = Matrix::Zero(1, d);
  a.blocks = base.blocks;
  for (std::size_t b = 0; b < base.blocks.size(); ++b) {
    a.out_w.push_back(Matrix::Zero(d, d));
    a.out_b.push_back(Matrix::Zero(1, d));
  }
  return a;
}

void validate(const GeneratorParams& p) {
  const auto& c = p.config;
  if (c.width < 1 || c.blocks < 1) throw ValidationError("generator: width and blocks must be positive");
  check_shape(p.w_in, c.pose_dim + 1, c.width, "generator.w_in");
  check_shape(p.b_in, 1, c.width, "generator.b_in");
  check_shape(p.text_table, static_cast<Eigen::Index>(text_vocabulary().size()), c.width, "generator.text_table");
  check_blocks(p.blocks, c.blocks, c.width, "generator");
  check_shape(p.w_out, c.width, c.pose_dim, "generator.w_out");
  check_shape(p.b_out, 1, c.pose_dim, "generator.b_out");
}

void validate(const AdapterParams& a, const GeneratorParams& base) {
  const int d = base.config.width;
  const std::string what(adapter_kind_name(a.kind));
  check_shape(a.w_cond, condition_width(a.kind), d, what + ".w_cond");
  check_shape(a.b_cond, 1, d, what + ".b_cond");
  check_blocks(a.blocks, base.config.blocks, d, what);
  if (a.out_w.size() != a.blocks.size() || a.out_b.size() != a.blocks.size()) {
    throw ValidationError(what + ": one output projection per block is required");
  }
  for (std::size_t b = 0; b < a.blocks.size(); ++b) {
    check_shape(a.out_w[b], d, d, what + ".out_w");
    check_shape(a.out_b[b], 1, d, what + ".out_b");
  }
}

Matrix base_forward_raw(const GeneratorParams& params, const Matrix& input, int text, const FeatureSeq* injection,
                        BaseTrace* trace) {
  const auto& cfg = params.config;
  check_length(cfg, input.rows());
  if (input.cols() != cfg.pose_dim + 1) throw ValidationError("generator: input width mismatch");
  if (text < 0 || text >= params.text_table.rows()) throw ValidationError("generator: text id out of range");
  if (injection != nullptr &&
      (injection->num_blocks() != cfg.blocks || injection->num_frames() != input.rows() ||
       injection->width() != cfg.width)) {
    throw ValidationError("generator: injected features do not match the network shape");
  }

  Matrix h = input * params.w_in;
  h.rowwise() += params.b_in.row(0);
  h.rowwise() += params.text_table.row(text);
  if (trace != nullptr) {
    trace->input = input;
    trace->text = text;
    trace->blocks.resize(cfg.blocks);
  }
  for (int b = 0; b < cfg.blocks; ++b) {
    h = block_forward(params.blocks[b], h, injection ? &injection->blocks[b] : nullptr,
                      trace ? &trace->blocks[b] : nullptr);
  }
  Matrix out = h * params.w_out;
  out.rowwise() += params.b_out.row(0);
  if (trace != nullptr) trace->last = std::move(h);
  return out;
}

void base_backward(const GeneratorParams& params, const BaseTrace& trace, const Matrix& grad_out,
                   GeneratorParams* grad, FeatureSeq* grad_injection) {
  const int blocks = params.config.blocks;
  if (grad != nullptr) {
    grad->w_out.noalias() += trace.last.transpose() * grad_out;
    grad->b_out += grad_out.colwise().sum();
  }
  Matrix gh = grad_out * params.w_out.transpose();
  if (grad_injection != nullptr) grad_injection->blocks.assign(blocks, Matrix());
  for (int b = blocks - 1; b >= 0; --b) {
    if (grad_injection != nullptr) grad_injection->blocks[b] = gh;
    gh = block_backward(params.blocks[b], trace.blocks[b], gh, grad ? &grad->blocks[b] : nullptr);
  }
  if (grad != nullptr) {
    grad->w_in.noalias() += trace.input.transpose() * gh;
    const Eigen::RowVectorXd col = gh.colwise().sum();
    grad->b_in += col;
    grad->text_table.row(trace.text) += col;
  }
}

FeatureSeq adapter_forward_raw(const AdapterParams& adapter, const Matrix& condition, AdapterTrace* trace) {
  if (condition.cols() != adapter.w_cond.rows()) throw ValidationError("adapter: condition width mismatch");
  Matrix g = condition * adapter.w_cond;
  g.rowwise() += adapter.b_cond.row(0);
  FeatureSeq f;
  f.blocks.resize(adapter.blocks.size());
  if (trace != nullptr) {
    trace->condition = condition;
    trace->blocks.resize(adapter.blocks.size());
    trace->outputs.resize(adapter.blocks.size());
  }
  for (std::size_t b = 0; b < adapter.blocks.size(); ++b) {
    g = block_forward(adapter.blocks[b], g, nullptr, trace ? &trace->blocks[b] : nullptr);
    f.blocks[b] = g * adapter.out_w[b];
    f.blocks[b].rowwise() += adapter.out_b[b].row(0);
    if (trace != nullptr) trace->outputs[b] = g;
  }
  return f;
}

void adapter_backward(const AdapterParams& adapter, const AdapterTrace& trace, const FeatureSeq& grad_features,
                      AdapterParams& grad) {
  const int blocks = static_cast<int>(adapter.blocks.size());
  Matrix gg = Matrix::Zero(trace.condition.rows(), adapter.w_cond.cols());
  for (int b = blocks - 1; b >= 0; --b) {
    const Matrix& gf = grad_features.blocks[b];
    grad.out_w[b].noalias() += trace.outputs[b].transpose() * gf;
    grad.out_b[b] += gf.colwise().sum();
    gg.noalias() += gf * adapter.out_w[b].transpose();
    gg = block_backward(adapter.blocks[b], trace.blocks[b], gg, &grad.blocks[b]);
  }
  grad.w_cond.noalias() += trace.condition.transpose() * gg;
  grad.b_cond += gg.colwise().sum();
}

Matrix base_forward(const GeneratorParams& params, const Matrix& poses, int text, const MaskSpec& mask) {
  check_length(params.config, poses.rows());
  return base_forward_raw(params, masked_input(poses, mask), text, nullptr, nullptr);
}

FeatureSeq adapter_forward(const AdapterParams& adapter, const Condition& condition) {
  return adapter_forward_raw(adapter, encode_condition(adapter.kind, condition), nullptr);
}

Matrix conditioned_forward(const GeneratorParams& params, std::span<const FeatureSeq> features, const Matrix& poses,
                           int text, const MaskSpec& mask) {
  check_length(params.config, poses.rows());
  const Matrix input = masked_input(poses, mask);
  if (features.empty()) return base_forward_raw(params, input, text, nullptr, nullptr);
  FeatureSeq sum = features[0];
  for (std::size_t k = 1; k < features.size(); ++k) {
    if (!features[k].same_shape(sum)) throw ValidationError("conditioned_forward: adapter feature shapes differ");
    for (int b = 0; b < sum.num_blocks(); ++b) sum.blocks[b] += features[k].blocks[b];
  }
  return base_forward_raw(params, input, text, &sum, nullptr);
}

Matrix conditioned_forward(const GeneratorParams& params, std::span<const AdapterParams* const> adapters,
                           std::span<const Condition> conditions, const Matrix& poses, int text,
                           const MaskSpec& mask) {
  if (adapters.size() != conditions.size()) {
    throw ValidationError("conditioned_forward: adapters and conditions are not aligned");
  }
  std::vector<FeatureSeq> features;
  features.reserve(adapters.size());
  for (std::size_t k = 0; k < adapters.size(); ++k) {
    features.push_back(adapter_forward(*adapters[k], conditions[k]));
    if (features.back().num_frames() != poses.rows()) {
      throw ValidationError("conditioned_forward: condition length differs from the pose sequence");
    }
  }
  return conditioned_forward(params, features, poses, text, mask);
}

}  // namespace sparsecue
