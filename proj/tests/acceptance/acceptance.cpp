// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
//
// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "sparsecue/checkpoint.hpp"
#include "sparsecue/ingest.hpp"
#include "sparsecue/losses.hpp"
#include "sparsecue/metrics.hpp"
#include "sparsecue/motion_io.hpp"
#include "sparsecue/projection.hpp"
#include "sparsecue/sampling.hpp"
#include "sparsecue/synth.hpp"
#include "sparsecue/trainer.hpp"
#include "test_support.hpp"

namespace sparsecue {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using Eigen::Vector3d;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

bool same(const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

// 1 -------------------------------------------------------------------------

Verdict zero_init_identity() {
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Engine eng = make_engine(1000 + trial, "zero-init");
    std::uniform_int_distribution<int> pick(0, 2);
    GeneratorConfig gc;
    gc.width = std::array{8, 16, 32}[pick(eng)];
    gc.blocks = 2 + pick(eng);
    gc.max_frames = 64;
    const GeneratorParams base = init_generator(gc, derive_seed(trial, "base"));

    DataConfig data;
    data.clip_frames = 16 + 8 * pick(eng);
    const Clip clip = make_clip(data, trial, "zero-init", trial);
    const CameraTrack cam = sample_camera(clip.motion.num_frames(), clip.motion.fps(), trial, {},
                                          motion_centroid(clip.motion));
    std::vector<AdapterParams> adapters;
    std::vector<Condition> conds;
    for (AdapterKind k : {AdapterKind::kLocal2D, AdapterKind::kLocal3D, AdapterKind::kGlobal3D}) {
      AdapterParams a = init_adapter(base, k, derive_seed(trial, "adapter", static_cast<std::uint64_t>(k)));
      // Scramble everything except the zero output projections.
      std::normal_distribution<double> normal(0.0, 0.5);
      for (auto& b : a.blocks) {
        for (Matrix* m : {&b.w1, &b.w2, &b.b1, &b.b2, &b.taps}) {
          for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] += normal(eng);
        }
      }
      adapters.push_back(std::move(a));
    }
    conds.emplace_back(project(clip.motion, cam));
    conds.emplace_back(clip.cues3d);
    conds.emplace_back(clip.trajectory);
    // Use a random subset of the branches.
    const int used = 1 + pick(eng);
    std::vector<const AdapterParams*> ptrs;
    for (int i = 0; i < used; ++i) ptrs.push_back(&adapters[i]);

    Matrix poses = Matrix::Random(clip.poses.rows(), gc.pose_dim);
    const MaskSpec mask = MaskSpec::random(static_cast<int>(poses.rows()), 0.5, eng);
    const int text = std::uniform_int_distribution<int>(0, static_cast<int>(text_vocabulary().size()) - 1)(eng);
    const Matrix want = base_forward(base, poses, text, mask);
    const Matrix got = conditioned_forward(base, std::span<const AdapterParams* const>(ptrs),
                                           std::span<const Condition>(conds.data(), used), poses, text, mask);
    if (!same(want, got)) ++mismatches;
  }
  const double t = seconds_since(t0);
  return {mismatches == 0 && t < 10.0, fmt("%d/100 bitwise mismatches, %.2f s (budget 10 s)", mismatches, t)};
}

// 2 -------------------------------------------------------------------------

Verdict normalization_invariants() {
  const auto t0 = Clock::now();
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Engine eng = make_engine(2000 + i, "norm");
    SynthParams sp;
    sp.duration = std::uniform_real_distribution<double>(0.5, 2.0)(eng);
    sp.fps = std::array{20.0, 30.0}[i % 2];
    const auto pattern = static_cast<MotionPattern>(i % 4);
    const MotionSequence m = synth_motion(pattern, sp, derive_seed(i, "motion"));
    const CameraTrack cam = sample_camera(m.num_frames(), m.fps(), derive_seed(i, "camera"), {}, motion_centroid(m));
    SparseCue2D c = project(m, cam);
    if (i % 2 == 1) c = augment(c, AugmentConfig{}, derive_seed(i, "augment"));
    bool zero = true;
    for (int n = 0; n < c.num_frames(); ++n) {
      if (c.at(n, 0).x() != 0.0 || c.at(n, 0).y() != 0.0) ++bad;
      for (int s = 1; s < kNumSlots; ++s) zero = zero && c.at(n, s).norm() == 0.0;
    }
    const double norm = testing::brute_norm(c);
    if (!zero) {
      worst = std::max(worst, std::abs(norm - 1.0));
      if (std::abs(norm - 1.0) > 1e-9) ++bad;
    }
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 30.0, fmt("%d violations over 1000 cases, max |norm-1| %.2e, %.2f s (budget 30 s)", bad,
                                     worst, t)};
}

// 3 -------------------------------------------------------------------------

Verdict gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int coords = 0;
  for (LossTerm term : {LossTerm::kBase, LossTerm::kOrtho, LossTerm::kAlign3D}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const GradCheckResult r = check_loss_gradient(term, seed, 1e-5);
      worst = std::max(worst, r.max_rel_error);
      coords += r.coordinates;
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-4 && coords > 0 && t < 60.0,
          fmt("max relative error %.2e over %d coordinates (d=8, N=6, eps=1e-5), %.2f s", worst, coords, t)};
}

// 4 -------------------------------------------------------------------------

FeatureSeq rows_of(const std::vector<std::vector<double>>& rows, int blocks) {
  FeatureSeq f = FeatureSeq::zeros(blocks, static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int b = 0; b < blocks; ++b) {
    for (std::size_t n = 0; n < rows.size(); ++n) {
      for (std::size_t k = 0; k < rows[n].size(); ++k) f.blocks[b](n, k) = (b + 1) * rows[n][k];
    }
  }
  return f;
}

Verdict loss_terms() {
  const FeatureSeq f = rows_of({{0.3, -1.0, 2.0, 0.5}, {1.0, 1.0, -0.2, 0.0}, {-4.0, 0.1, 0.0, 3.0}}, 3);
  const double self = loss_3d_align(f, f);
  const FeatureSeq g = rows_of({{1.0, 0.0, 2.0, 0.0}, {0.0, 3.0, 0.0, 0.0}}, 2);
  const FeatureSeq orth = rows_of({{0.0, 5.0, 0.0, -1.0}, {2.0, 0.0, 0.0, 7.0}}, 2);
  const FeatureSeq par = rows_of({{3.0, 0.0, 6.0, 0.0}, {0.0, 0.5, 0.0, 0.0}}, 2);
  const FeatureSeq anti = rows_of({{-0.5, 0.0, -1.0, 0.0}, {0.0, -9.0, 0.0, 0.0}}, 2);
  const double lo = loss_ortho(g, orth), lp = loss_ortho(g, par), la = loss_ortho(g, anti);
  const bool ok = std::abs(self) <= 1e-12 && std::abs(lo) <= 1e-12 && std::abs(lp - 1.0) <= 1e-12 &&
                  std::abs(la - 1.0) <= 1e-12;
  return {ok, fmt("L_3D(f,f)=%.1e, L_O orthogonal=%.1e, parallel=%.15f, anti-parallel=%.15f", self, lo, lp, la)};
}

// 5 -------------------------------------------------------------------------

Verdict constants_wiring() {
  std::ostringstream out, err;
  const int code = cli::run({"train", "--dump-config"}, out, err);
  if (code != 0) return {false, "train --dump-config exited " + std::to_string(code)};
  const json c = json::parse(out.str());
  const std::vector<std::pair<std::string, double>> want = {{"lambda1", 0.01}, {"lambda2", 10.0}, {"lr", 2e-4},
                                                            {"batch", 64},     {"epochs", 30},    {"cfg-motion", 2.0},
                                                            {"cfg-text", 4.0}};
  std::string missing;
  for (const auto& [k, v] : want) {
    if (!c.contains(k) || !c[k].is_number() || c[k].get<double>() != v) missing += " " + k;
  }
  return {missing.empty(), missing.empty() ? "lambda1=0.01 lambda2=10 lr=2e-4 batch=64 epochs=30 cfg-motion=2 cfg-text=4"
                                           : "mismatched:" + missing};
}

// 6, 7, 8, 12 share one trained toy model ----------------------------------

struct Trained {
  TrainConfig cfg;
  TrainState base, s3, s3_no_lo, s2, s2_no_l3d;
  double t_base = 0, t_s3 = 0, t_s3_no_lo = 0, t_s2 = 0, t_s2_no_l3d = 0;
};

TrainConfig acceptance_config() {
  TrainConfig cfg;
  cfg.seed = 11;
  cfg.model.width = 32;
  cfg.model.blocks = 4;
  cfg.model.max_frames = 64;
  cfg.data.num_clips = 256;
  cfg.data.val_clips = 32;
  cfg.data.clip_frames = 40;
  cfg.epochs = 60;
  cfg.base_epochs = 40;
  return cfg;
}

const Trained& trained() {
  static const Trained t = [] {
    Trained r;
    r.cfg = acceptance_config();
    TrainConfig base_cfg = r.cfg;
    base_cfg.learning_rate = 1e-3;
    base_cfg.batch_size = 16;
    auto t0 = Clock::now();
    r.base = train_base(base_cfg);
    r.t_base = seconds_since(t0);
    t0 = Clock::now();
    r.s3 = train_stage_3d(r.base.base, r.cfg);
    r.t_s3 = seconds_since(t0);
    TrainConfig no_lo = r.cfg;
    no_lo.lambda1 = 0.0;
    t0 = Clock::now();
    r.s3_no_lo = train_stage_3d(r.base.base, no_lo);
    r.t_s3_no_lo = seconds_since(t0);
    t0 = Clock::now();
    r.s2 = train_stage_2d(r.base.base, &r.s3, r.cfg);
    r.t_s2 = seconds_since(t0);
    TrainConfig no_l3d = r.cfg;
    no_l3d.ablate.no_l3d = true;
    t0 = Clock::now();
    r.s2_no_l3d = train_stage_2d(r.base.base, &r.s3, no_l3d);
    r.t_s2_no_l3d = seconds_since(t0);
    return r;
  }();
  return t;
}

Verdict progressive_effect() {
  const Trained& t = trained();
  const auto& v = t.s2.validation;
  const auto& vn = t.s2_no_l3d.validation;
  if (v.size() < 2 || vn.empty()) return {false, "missing validation records"};
  const double drop = 1.0 - v.back().l_3d / v.front().l_3d;
  const double time = t.t_base + t.t_s3 + t.t_s2 + t.t_s2_no_l3d;
  const bool ok = drop >= 0.5 && vn.back().l_3d > v.back().l_3d && time < 15 * 60;
  return {ok, fmt("stage-2 val L_3D %.4g -> %.4g (-%.1f%%, need >= 50%%); no_L3d final %.4g vs default %.4g; "
                  "%d clips, %.0f s",
                  v.front().l_3d, v.back().l_3d, 100 * drop, vn.back().l_3d, v.back().l_3d, t.cfg.data.num_clips, time)};
}

Verdict orthogonality_effect() {
  const Trained& t = trained();
  DataConfig held = t.cfg.data;
  const auto clips = make_clips(held, derive_seed(t.cfg.seed, "ortho-heldout"), "ortho-heldout", 64);
  const double with = mean_ortho(t.s3, t.cfg, Stage::kStage3D, clips, "ortho-heldout");
  TrainConfig c0 = t.cfg;
  c0.lambda1 = 0.0;
  const double without = mean_ortho(t.s3_no_lo, c0, Stage::kStage3D, clips, "ortho-heldout");
  const double time = t.t_base + t.t_s3 + t.t_s3_no_lo;
  return {with < without && time < 15 * 60,
          fmt("held-out mean cos^2: lambda1=0.01 %.4g vs lambda1=0 %.4g over 64 clips, %.0f s", with, without, time)};
}

Verdict freeze_invariants() {
  const Trained& t = trained();
  const std::string base_before = weights_hash(t.base.base);
  const bool base_ok = weights_hash(t.s3.base) == base_before && weights_hash(t.s2.base) == base_before;
  const bool la_ok = weights_hash(t.s2.adapters.at(roles::kLocal3D)) == weights_hash(t.s3.adapters.at(roles::kLocal3D));
  const bool ga_moves = weights_hash(t.s2.adapters.at(roles::kGlobal3D)) !=
                        weights_hash(t.s3.adapters.at(roles::kGlobal3D));
  // freeze_3dga on a short run.
  TrainConfig f = t.cfg;
  f.epochs = 4;
  f.data.num_clips = 64;
  f.ablate.freeze_3dga = true;
  const TrainState fz = train_stage_2d(t.base.base, &t.s3, f);
  const bool ga_fixed = weights_hash(fz.adapters.at(roles::kGlobal3D)) ==
                        weights_hash(t.s3.adapters.at(roles::kGlobal3D)) &&
                        weights_hash(fz.adapters.at(roles::kLocal3D)) == weights_hash(t.s3.adapters.at(roles::kLocal3D)) &&
                        weights_hash(fz.base) == base_before;
  return {base_ok && la_ok && ga_fixed,
          fmt("base unchanged across stages: %s; 3D-LA unchanged by stage 2: %s; freeze_3dga keeps 3D-GA: %s "
              "(default stage 2 updates it: %s)",
              base_ok ? "yes" : "no", la_ok ? "yes" : "no", ga_fixed ? "yes" : "no", ga_moves ? "yes" : "no")};
}

// 9 -------------------------------------------------------------------------

Verdict cfg_degeneracies() {
  GeneratorConfig gc;
  gc.width = 16;
  gc.blocks = 3;
  gc.max_frames = 64;
  const GeneratorParams base = init_generator(gc, 91);
  AdapterParams la = init_adapter(base, AdapterKind::kLocal2D, 92);
  Engine eng = make_engine(93, "cfg");
  std::normal_distribution<double> normal(0.0, 0.2);
  for (auto& w : la.out_w) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(eng);
  }
  DataConfig data;
  data.clip_frames = 30;
  auto cues_for = [&](int i) {
    const Clip c = make_clip(data, 94, "cfg", i);
    return project(c.motion, sample_camera(c.motion.num_frames(), c.motion.fps(), i, {}, motion_centroid(c.motion)));
  };
  const Condition a = cues_for(0), b = cues_for(1);

  int independent = 0, trials = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SampleConfig sc;
    sc.seed = seed;
    sc.cfg_motion = 0.0;
    const int text = 1 + static_cast<int>(seed % 4);
    independent += same(cfg_sample(base, &la, &a, text, sc), cfg_sample(base, &la, &b, text, sc)) ? 1 : 0;

    sc.cfg_motion = 1.0;
    sc.cfg_text = 1.0;
    const Matrix got = cfg_sample(base, &la, &a, text, sc);
    // Fully conditioned pathway: the same unmasking loop on conditioned_forward alone.
    const int n = 30;
    Matrix poses = Matrix::Zero(n, gc.pose_dim);
    MaskSpec mask = MaskSpec::all(n);
    std::vector<int> todo(n);
    std::iota(todo.begin(), todo.end(), 0);
    const FeatureSeq f = adapter_forward(la, a);
    for (const auto& reveal : unmask_schedule(todo, sc.steps, sc.seed)) {
      const Matrix p = conditioned_forward(base, std::span<const FeatureSeq>(&f, 1), poses, text, mask);
      for (int r : reveal) {
        poses.row(r) = p.row(r);
        mask.masked[r] = 0;
      }
    }
    worst = std::max(worst, (got - poses).cwiseAbs().maxCoeff());
    ++trials;
  }
  return {independent == trials && worst <= 1e-12,
          fmt("s_motion=0 cue-independent in %d/%d seeds; s_motion=s_text=1 max deviation %.2e", independent, trials,
              worst)};
}

// 10 ------------------------------------------------------------------------

Verdict metric_oracles() {
  using testing::make_motion;
  using testing::rest_pose;
  const int left_toe = Skeleton::humanoid22().slot_joint(CueSlot::kLeftFoot);
  const MotionSequence still = make_motion(20, 20.0, [](int, int j) { return rest_pose(j); });
  const MetricReport s = evaluate_metrics(still);
  const bool static_ok = s.jitter == 0.0 && s.fsr == 0.0 && s.ffl == 0.0 && s.fsd == 0.0;

  const MotionSequence slide = make_motion(11, 20.0, [&](int f, int j) {
    return j == left_toe ? Vector3d(rest_pose(j) + Vector3d(0.02 * f, 0, 0)) : rest_pose(j);
  });
  const double fsd_v = fsd(slide, {});

  const MotionSequence jump = make_motion(20, 20.0, [](int f, int j) {
    return Vector3d(rest_pose(j) + Vector3d(0, (f >= 7 && f <= 12) ? 0.3 : 0.0, 0));
  });
  const double ffl_v = ffl(jump, {});

  const MetricReport w = evaluate_metrics(synth_motion(MotionPattern::kWalk, {}, 3));
  const MetricReport rel = relative_report(w, w);
  const bool rel_ok = rel.relative->r_jitter == 0.0 && rel.relative->r_fsr == 0.0 && rel.relative->r_ffl == 0.0 &&
                      rel.relative->r_fsd == 0.0;
  const bool ok = static_ok && std::abs(fsd_v - 0.4) <= 1e-9 && std::abs(ffl_v - 0.3) <= 1.0 / 20 && rel_ok;
  return {ok, fmt("static: jitter=%g fsr=%g ffl=%g fsd=%g; sliding fsd=%.12f; 30%%-airborne ffl=%.4f; "
                  "self-relative all zero: %s",
                  s.jitter, s.fsr, s.ffl, s.fsd, fsd_v, ffl_v, rel_ok ? "yes" : "no")};
}

// 11 ------------------------------------------------------------------------

Verdict cross_module() {
  const fs::path dir = testing::temp_dir("acceptance-roundtrip");
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const MotionSequence m = synth_motion(static_cast<MotionPattern>(i % 4), {}, derive_seed(i, "xmod"));
    const CameraTrack cam = sample_camera(m.num_frames(), m.fps(), derive_seed(i, "xmod-cam"), {}, motion_centroid(m));
    save_keypoints(project_to_pixels(m, cam), dir / "kp.json");
    const SparseCue2D back = map_to_canonical(load_keypoints(dir / "kp.json"), MappingConfig::identity());
    const SparseCue2D direct = project(m, cam);
    for (std::size_t k = 0; k < direct.values().size(); ++k) {
      worst = std::max(worst, std::abs(back.values()[k] - direct.values()[k]));
    }
  }
  return {worst <= 1e-6, fmt("max deviation %.2e over 50 cases (limit 1e-6)", worst)};
}

// 12 ------------------------------------------------------------------------

struct ReconErrors {
  double matched = 0, shuffled = 0, text_only = 0, uncond = 0;
};

ReconErrors reconstruction(const Trained& t, double s_motion, double s_text) {
  constexpr int kHeld = 50;
  const std::uint64_t seed = derive_seed(t.cfg.seed, "heldout");
  const auto held = make_clips(t.cfg.data, seed, "heldout", kHeld);
  const AdapterParams& la = t.s2.adapters.at(roles::kLocal2D);
  const GeneratorParams& base = t.s2.base;
  std::vector<Condition> cues;
  for (int i = 0; i < kHeld; ++i) {
    cues.emplace_back(*make_stage_item(t.cfg, Stage::kStage2D, held[i], seed, "ho", 0, i).cues2d);
  }
  ReconErrors e;
  for (int i = 0; i < kHeld; ++i) {
    const int n = static_cast<int>(held[i].poses.rows());
    Engine eng = make_engine(seed, "prefill-mask", i);
    const Prefill pre{held[i].poses, MaskSpec::random(n, 0.5, eng)};
    SampleConfig sc;
    sc.seed = derive_seed(seed, "sample", i);
    sc.cfg_motion = s_motion;
    sc.cfg_text = s_text;
    auto err = [&](const Matrix& p) {
      double s = 0.0;
      for (int r = 0; r < n; ++r) {
        if (pre.mask.is_masked(r)) s += (p.row(r) - held[i].poses.row(r)).squaredNorm();
      }
      return s / (std::max(pre.mask.count(), 1) * static_cast<double>(p.cols()));
    };
    const int text = held[i].text;
    e.matched += err(cfg_sample(base, &la, &cues[i], text, sc, &pre));
    e.shuffled += err(cfg_sample(base, &la, &cues[(i + 17) % kHeld], text, sc, &pre));
    e.text_only += err(cfg_sample(base, nullptr, nullptr, text, sc, &pre));
    e.uncond += err(cfg_sample(base, nullptr, nullptr, kNullText, sc, &pre));
  }
  e.matched /= kHeld;
  e.shuffled /= kHeld;
  e.text_only /= kHeld;
  e.uncond /= kHeld;
  return e;
}

Verdict conditioning_signal() {
  const Trained& t = trained();
  const auto t0 = Clock::now();
  const ReconErrors e = reconstruction(t, 2.0, 1.0);
  const ReconErrors d = reconstruction(t, 2.0, 4.0);
  const double time = t.t_base + t.t_s3 + t.t_s2 + seconds_since(t0);
  const bool ok = e.matched < e.shuffled && e.matched < e.uncond && time < 20 * 60;
  return {ok, fmt("masked-frame MSE over 50 held-out clips at s_motion=2 s_text=1: matched %.5f, shuffled %.5f, "
                  "unconditional %.5f (text-only %.5f); at the default s_text=4: matched %.5f, shuffled %.5f, "
                  "unconditional %.5f; %.0f s",
                  e.matched, e.shuffled, e.uncond, e.text_only, d.matched, d.shuffled, d.uncond, time)};
}

// 13 ------------------------------------------------------------------------

Verdict manifest_replay() {
  const fs::path d = testing::temp_dir("acceptance-replay");
  auto p = [&](const std::string& name) { return (d / name).string(); };
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  const std::vector<std::string> tiny = {"--width", "8", "--blocks", "2", "--max-frames", "40", "--clips", "24",
                                         "--val-clips", "6", "--clip-frames", "20", "--batch", "8",
                                         "--base-epochs", "2", "--epochs", "2", "--seed", "3"};
  auto with = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  struct Step {
    std::string sub;
    std::vector<std::string> args;
    std::string out;
  };
  const std::vector<Step> steps = {
      {"synth", {"synth", "--pattern", "jump", "--seed", "7", "--out", p("m.json")}, "m.json"},
      {"project", {"project", "--motion", p("m.json"), "--camera-seed", "5", "--augment", "default", "--keypoints-out",
                   p("kp.json"), "--out", p("c.json")}, "c.json"},
      {"ingest", {"ingest", "--keypoints", p("kp.json"), "--mapping", "identity", "--out", p("ci.json")}, "ci.json"},
      {"validate", {"validate", "--cues", p("c.json"), "--out", p("v.json")}, "v.json"},
      {"train", with({"train", "--stage", "base", "--out", p("b.json")}, tiny), "b.json"},
      {"train", with({"train", "--stage", "3d", "--from", p("b.json"), "--out", p("s3.json")}, tiny), "s3.json"},
      {"train", with({"train", "--stage", "2d", "--from", p("s3.json"), "--out", p("s2.json")}, tiny), "s2.json"},
      {"sample", {"sample", "--checkpoint", p("s2.json"), "--cues", p("c.json"), "--text", "jump", "--seed", "9",
                  "--out", p("o.json")}, "o.json"},
      {"eval", {"eval", "--motion", p("o.json"), "--baseline", p("m.json"), "--csv", p("e.csv"), "--out",
                p("e.json")}, "e.json"},
      {"edit", {"edit", "--motion", p("m.json"), "--scale-root-y", "1.5", "--arm-spread", "45", "--out",
                p("ed.json")}, "ed.json"},
  };
  int reproduced = 0, files = 0;
  std::string failed;
  for (const auto& s : steps) {
    if (run(s.args) != 0) {
      failed += " " + s.sub + "(run)";
      continue;
    }
    const json first = json::parse(read_text_file(p(s.out) + ".manifest.json"));
    const std::string again = "replay-" + s.out;
    if (run({s.sub, "--config", p(s.out) + ".manifest.json", "--out", p(again)}) != 0) {
      failed += " " + s.sub + "(replay)";
      continue;
    }
    const json second = json::parse(read_text_file(p(again) + ".manifest.json"));
    // Every output the first run recorded must be reproduced bitwise.
    bool all = true;
    for (const auto& [role, entry] : first["outputs"].items()) {
      ++files;
      const bool match = second["outputs"].contains(role) && second["outputs"][role]["sha256"] == entry["sha256"];
      all = all && match;
      reproduced += match ? 1 : 0;
    }
    if (!all) failed += " " + s.sub + "(" + s.out + ")";
  }
  return {failed.empty(), fmt("%d/%d recorded outputs reproduced bitwise across 8 subcommands", reproduced, files) +
                              (failed.empty() ? std::string() : "; failed:" + failed)};
}

}  // namespace
}  // namespace sparsecue

int main() {
  using namespace sparsecue;
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, zero_init_identity},   {2, normalization_invariants}, {3, gradient_correctness},
      {4, loss_terms},           {5, constants_wiring},         {9, cfg_degeneracies},
      {10, metric_oracles},      {11, cross_module},            {13, manifest_replay},
      {6, progressive_effect},   {7, orthogonality_effect},     {8, freeze_invariants},
      {12, conditioning_signal},
  };
  std::vector<std::pair<int, Verdict>> results;
  for (const auto& [id, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(id, v);
  }
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.second.pass; });
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
