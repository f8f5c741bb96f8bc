// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecue/error.hpp"

namespace sparsecue {
namespace {

int condition_frames(const Condition& c) {
  return std::visit([](const auto& v) { return v.num_frames(); }, c);
}

}  // namespace

void SampleConfig::validate() const {
  if (!std::isfinite(cfg_motion) || !std::isfinite(cfg_text)) throw ValidationError("sample: guidance scales must be finite");
  if (steps < 1) throw ValidationError("sample: steps must be at least 1");
  if (num_frames < 1) throw ValidationError("sample: num_frames must be positive");
  if (!(fps > 0.0)) throw ValidationError("sample: fps must be positive");
}

Matrix combine_guidance(const Matrix& p_uu, const Matrix& p_tu, const Matrix& p_tc, double s_motion,
                        double s_text) {
  Matrix p = p_uu + s_text * (p_tu - p_uu);
  if (s_motion != 0.0) p += s_motion * (p_tc - p_tu);
  return p;
}

std::vector<std::vector<int>> unmask_schedule(const std::vector<int>& frames, int steps, std::uint64_t seed) {
  if (steps < 1) throw ValidationError("unmask_schedule: steps must be at least 1");
  std::vector<int> order = frames;
  Engine eng = make_engine(seed, "unmask");
  std::shuffle(order.begin(), order.end(), eng);
  std::vector<std::vector<int>> out(steps);
  std::size_t pos = 0;
  for (int k = 0; k < steps; ++k) {
    const std::size_t remaining = order.size() - pos;
    const std::size_t left = static_cast<std::size_t>(steps - k);
    const std::size_t take = (remaining + left - 1) / left;
    out[k].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + take));
    pos += take;
  }
  return out;
}

Matrix cfg_sample(const GeneratorParams& base, const AdapterParams* adapter, const Condition* condition, int text,
                  const SampleConfig& config, const Prefill* prefill) {
  config.validate();
  if ((adapter == nullptr) != (condition == nullptr)) {
    throw ValidationError("sample: an adapter needs a condition and vice versa");
  }
  int frames = config.num_frames;
  if (condition != nullptr) frames = condition_frames(*condition);
  if (prefill != nullptr) {
    if (condition != nullptr && prefill->poses.rows() != frames) {
      throw ValidationError("sample: prefill length differs from the cue length");
    }
    frames = static_cast<int>(prefill->poses.rows());
    if (prefill->mask.num_frames() != frames || prefill->poses.cols() != base.config.pose_dim) {
      throw ValidationError("sample: prefill shape mismatch");
    }
  }
  if (frames > base.config.max_frames) {
    throw ValidationError("sample: " + std::to_string(frames) + " frames exceeds the maximum of " +
                          std::to_string(base.config.max_frames));
  }

  Matrix poses = Matrix::Zero(frames, base.config.pose_dim);
  MaskSpec mask = MaskSpec::all(frames);
  if (prefill != nullptr) {
    for (int n = 0; n < frames; ++n) {
      if (!prefill->mask.is_masked(n)) {
        poses.row(n) = prefill->poses.row(n);
        mask.masked[n] = 0;
      }
    }
  }
  std::vector<int> todo;
  for (int n = 0; n < frames; ++n) {
    if (mask.is_masked(n)) todo.push_back(n);
  }
  const auto schedule = unmask_schedule(todo, config.steps, config.seed);

  const bool use_cues = adapter != nullptr && config.cfg_motion != 0.0;
  FeatureSeq features;
  if (use_cues) features = adapter_forward(*adapter, *condition);

  for (const auto& reveal : schedule) {
    if (reveal.empty()) continue;
    const Matrix input = masked_input(poses, mask);
    const Matrix p_uu = base_forward_raw(base, input, kNullText, nullptr, nullptr);
    const Matrix p_tu = text == kNullText ? p_uu : base_forward_raw(base, input, text, nullptr, nullptr);
    const Matrix p_tc = use_cues ? base_forward_raw(base, input, text, &features, nullptr) : p_tu;
    const Matrix p = combine_guidance(p_uu, p_tu, p_tc, use_cues ? config.cfg_motion : 0.0, config.cfg_text);
    for (int n : reveal) {
      poses.row(n) = p.row(n);
      mask.masked[n] = 0;
    }
  }
  return poses;
}

}  // namespace sparsecue
