#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlvrseg/grpo.hpp"
#include "rlvrseg/reward.hpp"
#include "rlvrseg/voting.hpp"

namespace rlvrseg {

// Deterministic per-stream generator. Stream seeds are derived by hashing
// (seed, scene, rollout), so extending a rollout pool never perturbs the
// rollouts already drawn.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t scene_id,
                    std::uint64_t rollout_id);

  std::uint64_t next_u64();
  double uniform();                 // [0, 1)
  double normal(double sigma);      // Box-Muller, mean 0
  bool bernoulli(double p);
  int uniform_int(int lo, int hi);  // inclusive bounds
  int poisson(double lambda);

 private:
  std::uint64_t state_;
};

struct Scene {
  int id = 0;
  ImageDims dims;
  std::vector<GtInstance> gts;
  double difficulty = 0.0;  // scales down the predictor hit probability
};

struct PredictorConfig {
  double hit_prob = 0.9;
  double coord_noise_sigma = 0.0;
  double spurious_rate = 0.0;
  double parse_fail_prob = 0.0;
  std::uint64_t seed = 0;
};

struct MaskStubConfig {
  int boundary_erosion_noise = 0;
  double quality_noise_sigma = 0.0;
};

struct SimRollout {
  std::string text;
  ParsedResponse parsed;
  std::vector<Mask> masks;
  std::vector<double> qualities;
};

struct SceneGenConfig {
  ImageDims dims{64, 64};
  int min_instances = 1;
  int max_instances = 1;
  double difficulty = 0.0;
  bool use_ellipses = true;
};

std::vector<Scene> generate_scenes(int count, const SceneGenConfig& cfg,
                                   std::uint64_t seed);

SimRollout sample_rollout(const Scene& scene, const PredictorConfig& pcfg,
                          const MaskStubConfig& mcfg, int rollout_id);

// Rollout-level correctness: IoU of the predicted mask union against the GT
// union, correct when above 0.5.
double rollout_union_iou(const Scene& scene, const SimRollout& rollout);

struct ZeroVarianceRow {
  int n = 0;
  double zero_variance_fraction = 0.0;
  double any_correct_fraction = 0.0;
};

struct VotingRow {
  int n_samples = 0;
  double voted_giou = 0.0;
  double single_giou = 0.0;
};

struct RestRow {
  int pool_size = 0;
  int select_size = 0;
  double selected_has_correct_fraction = 0.0;
  double pool_has_correct_fraction = 0.0;
};

std::vector<ZeroVarianceRow> zero_variance_experiment(
    const std::vector<Scene>& scenes, const PredictorConfig& pcfg,
    const MaskStubConfig& mcfg, const std::vector<int>& n_values,
    const RewardConfig& rcfg = {}, const GrpoConfig& gcfg = {});

std::vector<VotingRow> voting_experiment(const std::vector<Scene>& scenes,
                                         const PredictorConfig& pcfg,
                                         const MaskStubConfig& mcfg,
                                         const std::vector<int>& n_values,
                                         const VotingConfig& vcfg = {});

std::vector<RestRow> rest_experiment(
    const std::vector<Scene>& scenes, const PredictorConfig& pcfg,
    const MaskStubConfig& mcfg,
    const std::vector<std::pair<int, int>>& variants,
    const RewardConfig& rcfg = {}, const GrpoConfig& gcfg = {});

}  // namespace rlvrseg
