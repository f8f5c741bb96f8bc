// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include "sparsecue/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "sparsecue/error.hpp"
#include "sparsecue/losses.hpp"
#include "sparsecue/rng.hpp"

namespace sparsecue {
namespace {

template <class P>
std::vector<Matrix*> tensors_of(P& p) {
  std::vector<Matrix*> out;
  for_each_tensor(p, [&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

template <class P>
std::vector<const Matrix*> const_tensors_of(const P& p) {
  std::vector<const Matrix*> out;
  for_each_tensor(p, [&](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

template <class P>
void scale_tensors(P& p, double s) {
  for_each_tensor(p, [&](const std::string&, Matrix& m) { m *= s; });
}

template <class P>
void adam_step(P& params, const P& grads, AdamMoments& mom, const TrainConfig& cfg) {
  auto ps = tensors_of(params);
  auto gs = const_tensors_of(grads);
  if (mom.m.empty()) {
    for (const Matrix* p : ps) {
      mom.m.push_back(Matrix::Zero(p->rows(), p->cols()));
      mom.v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  ++mom.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(mom.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(mom.t));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    mom.m[i] = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * *gs[i];
    mom.v[i] = cfg.beta2 * mom.v[i] + (1.0 - cfg.beta2) * gs[i]->cwiseAbs2();
    const auto m_hat = mom.m[i].array() / c1;
    const auto v_hat = mom.v[i].array() / c2;
    ps[i]->array() -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_eps);
  }
}

FeatureSeq sum_features(const FeatureSeq& a, const FeatureSeq* b) {
  FeatureSeq out = a;
  if (b != nullptr) {
    for (int k = 0; k < out.num_blocks(); ++k) out.blocks[k] += b->blocks[k];
  }
  return out;
}

void add_scaled(FeatureSeq& dst, const FeatureSeq& src, double w) {
  if (w == 0.0) return;
  for (int k = 0; k < dst.num_blocks(); ++k) dst.blocks[k] += w * src.blocks[k];
}

std::string stream_name(Stage stage, std::string_view what) {
  return std::string(stage_name(stage)) + ":" + std::string(what);
}

std::string local_role(Stage stage, const TrainConfig& cfg) {
  if (stage == Stage::kStage3D) return roles::kLocal3D;
  return cfg.ablate.use_3d_input ? roles::kLocal3DInput : roles::kLocal2D;
}

bool ga_trainable(Stage stage, const TrainConfig& cfg) {
  if (cfg.ablate.no_3dga) return false;
  return stage == Stage::kStage3D || !cfg.ablate.freeze_3dga;
}

struct Grads {
  std::optional<GeneratorParams> base;
  std::map<std::string, AdapterParams> adapters;
};

// Forward (and, with `grads`, backward) pass for one clip.
StepLoss run_item(const TrainState& st, const TrainConfig& cfg, Stage stage, const Clip& clip,
                  const StageItem& item, Grads* grads) {
  StepLoss out;
  const Matrix input = masked_input(clip.poses, item.mask);
  BaseTrace trace_base;
  Matrix grad_pred;

  if (stage == Stage::kBase) {
    const Matrix pred = base_forward_raw(st.base, input, item.text, nullptr, grads ? &trace_base : nullptr);
    out.l_base = loss_base(pred, clip.poses, item.mask, grads ? &grad_pred : nullptr);
    out.total = out.l_base;
    if (grads != nullptr) base_backward(st.base, trace_base, grad_pred, &*grads->base, nullptr);
    return out;
  }

  const std::string lrole = local_role(stage, cfg);
  const AdapterParams& la = st.adapters.at(lrole);
  const bool local_is_3d = la.kind == AdapterKind::kLocal3D;
  if (!local_is_3d && !item.cues2d) throw ValidationError("training: 2D cues missing for the 2D stage");
  const Matrix cond_local = local_is_3d ? encode_condition(AdapterKind::kLocal3D, clip.cues3d)
                                        : encode_condition(AdapterKind::kLocal2D, *item.cues2d);
  AdapterTrace trace_la;
  AdapterTrace trace_ga;
  const FeatureSeq f_local = adapter_forward_raw(la, cond_local, grads ? &trace_la : nullptr);

  const AdapterParams* ga = nullptr;
  if (!cfg.ablate.no_3dga && !item.drop_global) ga = &st.adapters.at(roles::kGlobal3D);
  FeatureSeq f_global;
  if (ga != nullptr) {
    f_global = adapter_forward_raw(*ga, encode_condition(AdapterKind::kGlobal3D, clip.trajectory),
                                   grads ? &trace_ga : nullptr);
  }

  const FeatureSeq injection = sum_features(f_local, ga ? &f_global : nullptr);
  const Matrix pred = base_forward_raw(st.base, input, item.text, &injection, grads ? &trace_base : nullptr);
  out.l_base = loss_base(pred, clip.poses, item.mask, grads ? &grad_pred : nullptr);

  FeatureSeq grad_o_global;
  FeatureSeq grad_o_local;
  if (ga != nullptr) {
    out.l_o = loss_ortho(f_global, f_local, grads ? &grad_o_global : nullptr, grads ? &grad_o_local : nullptr);
  }

  FeatureSeq grad_align;
  const auto teacher = st.adapters.find(roles::kLocal3D);
  const bool has_teacher = stage == Stage::kStage2D && teacher != st.adapters.end();
  if (has_teacher) {
    const FeatureSeq f_teacher =
        adapter_forward_raw(teacher->second, encode_condition(AdapterKind::kLocal3D, clip.cues3d), nullptr);
    out.l_3d = loss_3d_align(f_teacher, f_local, grads ? &grad_align : nullptr);
  }

  const double w1 = cfg.ablate.no_lo ? 0.0 : cfg.lambda1;
  const double w2 = (stage == Stage::kStage2D && !cfg.ablate.no_l3d) ? cfg.lambda2 : 0.0;
  out.total = out.l_base + w1 * out.l_o + w2 * out.l_3d;
  if (grads == nullptr) return out;

  FeatureSeq grad_injection;
  base_backward(st.base, trace_base, grad_pred, nullptr, &grad_injection);
  FeatureSeq grad_local = grad_injection;
  if (ga != nullptr) add_scaled(grad_local, grad_o_local, w1);
  if (has_teacher) add_scaled(grad_local, grad_align, w2);
  adapter_backward(la, trace_la, grad_local, grads->adapters.at(lrole));
  if (ga != nullptr && ga_trainable(stage, cfg)) {
    FeatureSeq grad_global = grad_injection;
    add_scaled(grad_global, grad_o_global, w1);
    adapter_backward(*ga, trace_ga, grad_global, grads->adapters.at(roles::kGlobal3D));
  }
  return out;
}

std::vector<std::string> trainable_roles(Stage stage, const TrainConfig& cfg) {
  std::vector<std::string> out;
  if (stage == Stage::kBase) return out;
  out.push_back(local_role(stage, cfg));
  if (ga_trainable(stage, cfg)) out.push_back(roles::kGlobal3D);
  return out;
}

void run_stage(TrainState& st, const TrainConfig& cfg, Stage stage) {
  st.stage = stage;
  const auto clips = make_clips(cfg.data, cfg.seed, "train", cfg.data.num_clips);
  const auto val_clips = make_clips(cfg.data, cfg.seed, "val", cfg.data.val_clips);
  const std::string train_stream = stream_name(stage, "train");
  const std::string val_stream = stream_name(stage, "val");
  std::vector<StageItem> val_items;
  for (int i = 0; i < static_cast<int>(val_clips.size()); ++i) {
    val_items.push_back(make_stage_item(cfg, stage, val_clips[i], cfg.seed, val_stream, 0, i));
  }
  // The validation batch never sees dropout.
  for (int i = 0; i < static_cast<int>(val_items.size()); ++i) {
    val_items[i].text = val_clips[i].text;
    val_items[i].drop_global = false;
  }

  const auto roles_to_train = trainable_roles(stage, cfg);
  const int epochs = cfg.stage_epochs(stage);
  const int num = static_cast<int>(clips.size());
  std::vector<int> order(num);
  for (int e = 1; e <= epochs; ++e) {
    std::iota(order.begin(), order.end(), 0);
    Engine eng = make_engine(cfg.seed, stream_name(stage, "order"), static_cast<std::uint64_t>(e));
    std::shuffle(order.begin(), order.end(), eng);
    for (int start = 0; start < num; start += cfg.batch_size) {
      const int stop = std::min(num, start + cfg.batch_size);
      Grads grads;
      if (stage == Stage::kBase) grads.base = zeros_like(st.base);
      for (const auto& r : roles_to_train) grads.adapters.emplace(r, zeros_like(st.adapters.at(r)));

      StepLoss mean;
      for (int k = start; k < stop; ++k) {
        const int idx = order[k];
        const StageItem item = make_stage_item(cfg, stage, clips[idx], cfg.seed, train_stream, e, idx);
        const StepLoss l = run_item(st, cfg, stage, clips[idx], item, &grads);
        mean.l_base += l.l_base;
        mean.l_o += l.l_o;
        mean.l_3d += l.l_3d;
        mean.total += l.total;
      }
      const double inv = 1.0 / (stop - start);
      mean.l_base *= inv;
      mean.l_o *= inv;
      mean.l_3d *= inv;
      mean.total *= inv;
      if (grads.base) {
        scale_tensors(*grads.base, inv);
        adam_step(st.base, *grads.base, st.moments["base"], cfg);
      }
      for (auto& [role, g] : grads.adapters) {
        scale_tensors(g, inv);
        adam_step(st.adapters.at(role), g, st.moments[role], cfg);
      }
      ++st.step;
      mean.step = static_cast<int>(st.step);
      mean.epoch = e;
      st.history.push_back(mean);
    }
    st.epoch = e;

    EpochRecord rec;
    rec.epoch = e;
    for (std::size_t i = 0; i < val_clips.size(); ++i) {
      const StepLoss l = run_item(st, cfg, stage, val_clips[i], val_items[i], nullptr);
      rec.l_base += l.l_base;
      rec.l_o += l.l_o;
      rec.l_3d += l.l_3d;
    }
    if (!val_clips.empty()) {
      const double inv = 1.0 / static_cast<double>(val_clips.size());
      rec.l_base *= inv;
      rec.l_o *= inv;
      rec.l_3d *= inv;
    }
    st.validation.push_back(rec);
  }
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kBase: return "base";
    case Stage::kStage3D: return "3d";
    case Stage::kStage2D: return "2d";
  }
  return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (auto s : {Stage::kBase, Stage::kStage3D, Stage::kStage2D}) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ValidationError("train: lambda1 and lambda2 must be >= 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("train: learning rate must be finite and non-negative");
  }
  if (batch_size < 1) throw ValidationError("train: batch size must be at least 1");
  if (epochs < 0 || base_epochs < 0) throw ValidationError("train: epochs must be >= 0");
  if (!(mask_ratio > 0.0 && mask_ratio <= 1.0)) throw ValidationError("train: mask ratio must be in (0, 1]");
  if (!(text_dropout >= 0.0 && text_dropout <= 1.0)) throw ValidationError("train: text dropout must be in [0, 1]");
  if (!(global_dropout >= 0.0 && global_dropout < 1.0)) {
    throw ValidationError("train: global adapter dropout must be in [0, 1)");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(adam_eps > 0.0)) {
    throw ValidationError("train: invalid optimizer moments");
  }
  if (data.num_clips < 1 || data.val_clips < 0) throw ValidationError("train: need at least one training clip");
  if (data.clip_frames < 2 || data.clip_frames > model.max_frames) {
    throw ValidationError("train: clip length must be in [2, max_frames]");
  }
  if (!(data.fps > 0.0)) throw ValidationError("train: fps must be positive");
  double wsum = 0.0;
  for (double w : data.pattern_weights) {
    if (!(w >= 0.0)) throw ValidationError("train: pattern weights must be >= 0");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw ValidationError("train: pattern weights sum to zero");
  if (ablate.no_3dga && ablate.freeze_3dga) {
    throw ValidationError("train: no_3dga and freeze_3dga are mutually exclusive");
  }
  augment.validate();
  camera.validate();
}

int TrainConfig::stage_epochs(Stage stage) const {
  switch (stage) {
    case Stage::kBase: return base_epochs;
    case Stage::kStage3D: return (epochs + 1) / 2;
    case Stage::kStage2D: return epochs / 2;
  }
  return 0;
}

Checkpoint TrainState::to_checkpoint() const {
  Checkpoint ck;
  ck.base = base;
  ck.adapters = adapters;
  ck.info["stage"] = std::string(stage_name(stage));
  ck.info["epoch"] = std::to_string(epoch);
  ck.info["step"] = std::to_string(step);
  return ck;
}

TrainState TrainState::from_checkpoint(const Checkpoint& ck) {
  TrainState st;
  st.base = ck.base;
  st.adapters = ck.adapters;
  if (const auto it = ck.info.find("stage"); it != ck.info.end()) {
    if (const auto s = parse_stage(it->second)) st.stage = *s;
  }
  return st;
}

std::string_view pattern_prompt(MotionPattern p) {
  switch (p) {
    case MotionPattern::kWalk: return "walk forward";
    case MotionPattern::kJump: return "jump";
    case MotionPattern::kSway: return "sway side to side";
    case MotionPattern::kStatic: return "stand still";
  }
  return "";
}

Clip make_clip(const DataConfig& data, std::uint64_t seed, std::string_view stream, int index) {
  Engine eng = make_engine(seed, stream, static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double total = std::accumulate(data.pattern_weights.begin(), data.pattern_weights.end(), 0.0);
  double pick = unit(eng) * total;
  int which = 3;
  for (int k = 0; k < 4; ++k) {
    if (pick < data.pattern_weights[k]) {
      which = k;
      break;
    }
    pick -= data.pattern_weights[k];
  }
  const auto pattern = static_cast<MotionPattern>(which);
  // Amplitude and period ranges per pattern.
  static constexpr std::array<std::array<double, 4>, 4> kRanges = {{
      {0.35, 0.6, 0.8, 1.3},
      {0.15, 0.45, 0.8, 1.6},
      {0.05, 0.15, 1.2, 2.5},
      {0.0, 0.0, 1.0, 1.0},
  }};
  const auto& r = kRanges[which];
  SynthParams params;
  params.amplitude = r[0] + (r[1] - r[0]) * unit(eng);
  params.period = r[2] + (r[3] - r[2]) * unit(eng);
  params.fps = data.fps;
  params.duration = data.clip_frames / data.fps;
  MotionSequence motion = synth_motion(pattern, params, derive_seed(seed, stream, static_cast<std::uint64_t>(index), 1));
  Matrix poses = pose_matrix(motion);
  SparseCue3D cues = extract_cues_3d(motion);
  RootTrajectory traj = root_trajectory(motion);
  return Clip{pattern, text_id(pattern_prompt(pattern)), std::move(motion), std::move(poses), std::move(cues),
              std::move(traj)};
}

std::vector<Clip> make_clips(const DataConfig& data, std::uint64_t seed, std::string_view stream, int count) {
  std::vector<Clip> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(make_clip(data, seed, stream, i));
  return out;
}

StageItem make_stage_item(const TrainConfig& cfg, Stage stage, const Clip& clip, std::uint64_t seed,
                          std::string_view stream, int epoch, int index) {
  const auto e = static_cast<std::uint64_t>(epoch);
  const auto i = static_cast<std::uint64_t>(index);
  StageItem item;
  Engine eng = make_engine(seed, std::string(stream) + ":mask", e, i);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ratio = cfg.mask_ratio + (1.0 - cfg.mask_ratio) * unit(eng);
  item.mask = MaskSpec::random(clip.motion.num_frames(), ratio, eng);
  item.text = clip.text;
  if (stage == Stage::kBase && unit(eng) < cfg.text_dropout) item.text = kNullText;
  if (stage != Stage::kBase && unit(eng) < cfg.global_dropout) item.drop_global = true;

  if (stage == Stage::kStage2D && !cfg.ablate.use_3d_input) {
    const Eigen::Vector3d centroid = motion_centroid(clip.motion);
    const std::string cam_stream = std::string(stream) + ":camera";
    for (std::uint64_t attempt = 0;; ++attempt) {
      const CameraTrack cam =
          sample_camera(clip.motion.num_frames(), clip.motion.fps(), derive_seed(seed, cam_stream, e, i * 64 + attempt),
                        cfg.camera, centroid);
      try {
        SparseCue2D cues = project(clip.motion, cam);
        if (cfg.augment.any_enabled()) {
          cues = augment(cues, cfg.augment, derive_seed(seed, std::string(stream) + ":augment", e, i));
        }
        item.cues2d = std::move(cues);
        break;
      } catch (const ValidationError&) {
        // A joint fell behind the camera; draw another viewpoint.
        if (attempt >= 15) throw;
      }
    }
  }
  return item;
}

TrainState train_base(const TrainConfig& cfg) {
  cfg.validate();
  TrainState st;
  st.base = init_generator(cfg.model, cfg.seed);
  run_stage(st, cfg, Stage::kBase);
  return st;
}

TrainState train_stage_3d(const GeneratorParams& base, const TrainConfig& cfg) {
  cfg.validate();
  validate(base);
  TrainState st;
  st.base = base;
  st.adapters.emplace(roles::kLocal3D, init_adapter(base, AdapterKind::kLocal3D, derive_seed(cfg.seed, "init:3d-la")));
  if (!cfg.ablate.no_3dga) {
    st.adapters.emplace(roles::kGlobal3D,
                        init_adapter(base, AdapterKind::kGlobal3D, derive_seed(cfg.seed, "init:3d-ga")));
  }
  run_stage(st, cfg, Stage::kStage3D);
  return st;
}

TrainState train_stage_2d(const GeneratorParams& base, const TrainState* stage3d, const TrainConfig& cfg) {
  cfg.validate();
  validate(base);
  const bool has_teacher = stage3d != nullptr && stage3d->adapters.count(roles::kLocal3D) != 0;
  if (!has_teacher && !(cfg.ablate.no_l3d && cfg.allow_cold_start)) {
    throw ValidationError("train: the 2d stage needs a trained 3d-la (cold start only with no_l3d)");
  }
  TrainState st;
  st.base = base;
  if (has_teacher) st.adapters.emplace(roles::kLocal3D, stage3d->adapters.at(roles::kLocal3D));
  if (!cfg.ablate.no_3dga) {
    if (stage3d != nullptr && stage3d->adapters.count(roles::kGlobal3D) != 0) {
      st.adapters.emplace(roles::kGlobal3D, stage3d->adapters.at(roles::kGlobal3D));
    } else {
      st.adapters.emplace(roles::kGlobal3D,
                          init_adapter(base, AdapterKind::kGlobal3D, derive_seed(cfg.seed, "init:3d-ga")));
    }
  }
  const AdapterKind local_kind = cfg.ablate.use_3d_input ? AdapterKind::kLocal3D : AdapterKind::kLocal2D;
  const std::string lrole = local_role(Stage::kStage2D, cfg);
  st.adapters.insert_or_assign(lrole, init_adapter(base, local_kind, derive_seed(cfg.seed, "init:" + lrole)));
  run_stage(st, cfg, Stage::kStage2D);
  return st;
}

StepLoss evaluate_item(const TrainState& state, const TrainConfig& cfg, Stage stage, const Clip& clip,
                       const StageItem& item) {
  return run_item(state, cfg, stage, clip, item, nullptr);
}

double mean_ortho(const TrainState& state, const TrainConfig& cfg, Stage stage, const std::vector<Clip>& clips,
                  std::string_view stream) {
  if (clips.empty() || cfg.ablate.no_3dga) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < static_cast<int>(clips.size()); ++i) {
    StageItem item = make_stage_item(cfg, stage, clips[i], cfg.seed, stream, 0, i);
    item.drop_global = false;
    sum += run_item(state, cfg, stage, clips[i], item, nullptr).l_o;
  }
  return sum / static_cast<double>(clips.size());
}

std::string loss_table_csv(const std::vector<StepLoss>& history) {
  std::string out = "step,epoch,L_base,L_O,L_3D,total\n";
  for (const auto& h : history) {
    out += std::to_string(h.step) + "," + std::to_string(h.epoch) + "," + fmt(h.l_base) + "," + fmt(h.l_o) + "," +
           fmt(h.l_3d) + "," + fmt(h.total) + "\n";
  }
  return out;
}

std::string validation_csv(const std::vector<EpochRecord>& records) {
  std::string out = "epoch,L_base,L_O,L_3D\n";
  for (const auto& r : records) {
    out += std::to_string(r.epoch) + "," + fmt(r.l_base) + "," + fmt(r.l_o) + "," + fmt(r.l_3d) + "\n";
  }
  return out;
}

GradCheckResult grad_check(const std::function<double()>& loss, const std::vector<Matrix*>& params,
                           const std::vector<Matrix>& analytic, double eps, int max_coords) {
  if (params.size() != analytic.size()) throw ValidationError("grad_check: parameter and gradient lists differ");
  long long total = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->rows() != analytic[k].rows() || params[k]->cols() != analytic[k].cols()) {
      throw ValidationError("grad_check: gradient shape mismatch");
    }
    total += params[k]->size();
  }
  const long long stride = (max_coords > 0 && total > max_coords) ? total / max_coords : 1;
  GradCheckResult res;
  long long flat = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    for (Eigen::Index i = 0; i < p.size(); ++i, ++flat) {
      if (flat % stride != 0) continue;
      double& x = p.data()[i];
      const double orig = x;
      x = orig + eps;
      const double up = loss();
      x = orig - eps;
      const double down = loss();
      x = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      res.max_rel_error = std::max(res.max_rel_error, std::abs(a - numeric) / denom);
      ++res.coordinates;
    }
  }
  return res;
}

GradCheckResult check_loss_gradient(LossTerm term, std::uint64_t seed, double eps) {
  constexpr int kFrames = 6;
  GeneratorConfig cfg;
  cfg.width = 8;
  cfg.blocks = 2;
  cfg.max_frames = kFrames;
  GeneratorParams base = init_generator(cfg, seed);
  Engine eng = make_engine(seed, "grad-check");
  std::normal_distribution<double> normal(0.0, 1.0);
  auto randomize = [&](Matrix& m, double s) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = s * normal(eng);
  };
  auto make = [&](AdapterKind kind) {
    AdapterParams a = init_adapter(base, kind, derive_seed(seed, "grad-check", static_cast<std::uint64_t>(kind)));
    for (auto& w : a.out_w) randomize(w, 0.3);
    for (auto& b : a.out_b) randomize(b, 0.1);
    return a;
  };
  AdapterParams local = make(term == LossTerm::kAlign3D ? AdapterKind::kLocal2D : AdapterKind::kLocal3D);
  AdapterParams global = make(AdapterKind::kGlobal3D);
  AdapterParams teacher = make(AdapterKind::kLocal3D);
  Matrix cond_local(kFrames, condition_width(local.kind));
  Matrix cond_global(kFrames, 3);
  Matrix cond_teacher(kFrames, condition_width(AdapterKind::kLocal3D));
  randomize(cond_local, 1.0);
  randomize(cond_global, 1.0);
  randomize(cond_teacher, 1.0);
  Matrix poses(kFrames, cfg.pose_dim);
  Matrix target(kFrames, cfg.pose_dim);
  randomize(poses, 0.5);
  randomize(target, 0.5);
  MaskSpec mask = MaskSpec::none(kFrames);
  mask.masked[1] = mask.masked[2] = mask.masked[4] = 1;
  const Matrix input = masked_input(poses, mask);
  const int text = 2;

  std::vector<Matrix*> params;
  std::vector<Matrix> analytic;
  std::function<double()> loss;
  FeatureSeq f3;

  if (term == LossTerm::kBase) {
    loss = [&]() {
      const FeatureSeq fg = adapter_forward_raw(global, cond_global, nullptr);
      const FeatureSeq inj = sum_features(adapter_forward_raw(local, cond_local, nullptr), &fg);
      return loss_base(base_forward_raw(base, input, text, &inj, nullptr), target, mask);
    };
    AdapterTrace tl;
    AdapterTrace tg;
    BaseTrace tb;
    const FeatureSeq fl = adapter_forward_raw(local, cond_local, &tl);
    const FeatureSeq fg = adapter_forward_raw(global, cond_global, &tg);
    const FeatureSeq inj = sum_features(fl, &fg);
    Matrix gpred;
    loss_base(base_forward_raw(base, input, text, &inj, &tb), target, mask, &gpred);
    GeneratorParams gb = zeros_like(base);
    FeatureSeq ginj;
    base_backward(base, tb, gpred, &gb, &ginj);
    AdapterParams gl = zeros_like(local);
    AdapterParams gg = zeros_like(global);
    adapter_backward(local, tl, ginj, gl);
    adapter_backward(global, tg, ginj, gg);
    for (Matrix* m : tensors_of(base)) params.push_back(m);
    for (const Matrix* m : const_tensors_of(gb)) analytic.push_back(*m);
    for (Matrix* m : tensors_of(local)) params.push_back(m);
    for (const Matrix* m : const_tensors_of(gl)) analytic.push_back(*m);
    for (Matrix* m : tensors_of(global)) params.push_back(m);
    for (const Matrix* m : const_tensors_of(gg)) analytic.push_back(*m);
  } else if (term == LossTerm::kOrtho) {
    loss = [&]() {
      return loss_ortho(adapter_forward_raw(global, cond_global, nullptr), adapter_forward_raw(local, cond_local, nullptr));
    };
    AdapterTrace tl;
    AdapterTrace tg;
    const FeatureSeq fl = adapter_forward_raw(local, cond_local, &tl);
    const FeatureSeq fg = adapter_forward_raw(global, cond_global, &tg);
    FeatureSeq dg;
    FeatureSeq dl;
    loss_ortho(fg, fl, &dg, &dl);
    AdapterParams gl = zeros_like(local);
    AdapterParams gg = zeros_like(global);
    adapter_backward(local, tl, dl, gl);
    adapter_backward(global, tg, dg, gg);
    for (Matrix* m : tensors_of(local)) params.push_back(m);
    for (const Matrix* m : const_tensors_of(gl)) analytic.push_back(*m);
    for (Matrix* m : tensors_of(global)) params.push_back(m);
    for (const Matrix* m : const_tensors_of(gg)) analytic.push_back(*m);
  } else {
    f3 = adapter_forward_raw(teacher, cond_teacher, nullptr);
    loss = [&]() { return loss_3d_align(f3, adapter_forward_raw(local, cond_local, nullptr)); };
    AdapterTrace tl;
    const FeatureSeq f2 = adapter_forward_raw(local, cond_local, &tl);
    FeatureSeq d2;
    loss_3d_align(f3, f2, &d2);
    AdapterParams gl = zeros_like(local);
    adapter_backward(local, tl, d2, gl);
    for (Matrix* m : tensors_of(local)) params.push_back(m);
    for (const Matrix* m : const_tensors_of(gl)) analytic.push_back(*m);
  }
  return grad_check(loss, params, analytic, eps);
}

}  // namespace sparsecue
