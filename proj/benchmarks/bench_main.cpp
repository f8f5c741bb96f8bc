// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "sparsecue/losses.hpp"
#include "sparsecue/metrics.hpp"
#include "sparsecue/projection.hpp"
#include "sparsecue/sampling.hpp"
#include "sparsecue/synth.hpp"
#include "sparsecue/trainer.hpp"

namespace sparsecue {
namespace {

GeneratorConfig model(int width) {
  GeneratorConfig c;
  c.width = width;
  c.blocks = 4;
  return c;
}

Clip clip(int frames) {
  DataConfig d;
  d.clip_frames = frames;
  return make_clip(d, 1, "bench", 0);
}

void BM_BaseForward(benchmark::State& state) {
  const GeneratorParams base = init_generator(model(static_cast<int>(state.range(0))), 1);
  const Clip c = clip(static_cast<int>(state.range(1)));
  const MaskSpec mask = MaskSpec::all(static_cast<int>(c.poses.rows()));
  for (auto _ : state) benchmark::DoNotOptimize(base_forward(base, c.poses, 1, mask));
}
BENCHMARK(BM_BaseForward)->Args({32, 40})->Args({64, 40})->Args({64, 240});

void BM_ConditionedForward(benchmark::State& state) {
  const GeneratorParams base = init_generator(model(static_cast<int>(state.range(0))), 1);
  const AdapterParams la = init_adapter(base, AdapterKind::kLocal3D, 2);
  const Clip c = clip(40);
  const Condition cond = c.cues3d;
  const AdapterParams* ptr = &la;
  const MaskSpec mask = MaskSpec::all(40);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conditioned_forward(base, std::span<const AdapterParams* const>(&ptr, 1),
                                                 std::span<const Condition>(&cond, 1), c.poses, 1, mask));
  }
}
BENCHMARK(BM_ConditionedForward)->Arg(32)->Arg(64);

void BM_CfgSample(benchmark::State& state) {
  const GeneratorParams base = init_generator(model(32), 1);
  const AdapterParams la = init_adapter(base, AdapterKind::kLocal2D, 2);
  const Clip c = clip(40);
  const Condition cues = project(c.motion, sample_camera(40, c.motion.fps(), 3, {}, motion_centroid(c.motion)));
  SampleConfig sc;
  sc.steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cfg_sample(base, &la, &cues, 1, sc));
}
BENCHMARK(BM_CfgSample)->Arg(1)->Arg(4)->Arg(10);

void BM_ProjectAugment(benchmark::State& state) {
  const MotionSequence m = synth_motion(MotionPattern::kWalk, {}, 4);
  const CameraTrack cam = sample_camera(m.num_frames(), m.fps(), 5, {}, motion_centroid(m));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(augment(project(m, cam), AugmentConfig{}, ++seed));
}
BENCHMARK(BM_ProjectAugment);

void BM_Metrics(benchmark::State& state) {
  SynthParams p;
  p.duration = static_cast<double>(state.range(0));
  const MotionSequence m = synth_motion(MotionPattern::kWalk, p, 6);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_metrics(m));
}
BENCHMARK(BM_Metrics)->Arg(2)->Arg(10);

void BM_LossGradients(benchmark::State& state) {
  for (auto _ : state) {
    for (LossTerm t : {LossTerm::kBase, LossTerm::kOrtho, LossTerm::kAlign3D}) {
      benchmark::DoNotOptimize(check_loss_gradient(t, 1));
    }
  }
}
BENCHMARK(BM_LossGradients)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sparsecue

BENCHMARK_MAIN();
