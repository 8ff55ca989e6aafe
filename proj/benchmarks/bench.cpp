#include <benchmark/benchmark.h>

#include "rlvrseg/reward.hpp"
#include "rlvrseg/sim.hpp"
#include "rlvrseg/voting.hpp"

using namespace rlvrseg;

namespace {

Mask random_mask(Rng& rng, ImageDims dims, double density) {
  Mask m(dims);
  for (int y = 0; y < dims.height; ++y)
    for (int x = 0; x < dims.width; ++x)
      if (rng.bernoulli(density)) m.set(x, y);
  return m;
}

void BM_MaskIou(benchmark::State& state) {
  int side = int(state.range(0));
  Rng rng(1);
  Mask a = random_mask(rng, ImageDims(side, side), 0.3);
  Mask b = random_mask(rng, ImageDims(side, side), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(mask_iou(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MaskIou)->Arg(64)->Arg(256)->Arg(1024);

void BM_Hungarian(benchmark::State& state) {
  int n = int(state.range(0));
  Rng rng(2);
  std::vector<std::vector<double>> costs(n, std::vector<double>(n));
  for (auto& row : costs)
    for (auto& c : row) c = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(hungarian_match(costs));
}
BENCHMARK(BM_Hungarian)->Arg(8)->Arg(32)->Arg(128);

void BM_ClusterMasks(benchmark::State& state) {
  int pool_size = int(state.range(0));
  Rng rng(3);
  ImageDims dims(128, 128);
  std::vector<CandidateMask> pool;
  for (int i = 0; i < pool_size; ++i) {
    CandidateMask c;
    c.response_id = i / 2;
    c.source_pred_index = i % 2;
    c.quality = rng.uniform();
    int x = rng.uniform_int(0, 60), y = rng.uniform_int(0, 60);
    c.mask = rasterize(BBox(x, y, x + 40, y + 40), dims);
    pool.push_back(std::move(c));
  }
  VotingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cluster_masks(pool, cfg));
}
BENCHMARK(BM_ClusterMasks)->Arg(32)->Arg(128);

void BM_SampleRollout(benchmark::State& state) {
  SceneGenConfig sg;
  sg.max_instances = 3;
  auto scenes = generate_scenes(1, sg, 11);
  PredictorConfig pcfg;
  pcfg.coord_noise_sigma = 2.0;
  pcfg.spurious_rate = 0.3;
  MaskStubConfig mcfg;
  mcfg.boundary_erosion_noise = 2;
  int i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_rollout(scenes[0], pcfg, mcfg, i++));
}
BENCHMARK(BM_SampleRollout);

}  // namespace

BENCHMARK_MAIN();
