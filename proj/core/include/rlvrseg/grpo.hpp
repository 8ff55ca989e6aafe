#pragma once

#include <optional>
#include <vector>

#include "rlvrseg/errors.hpp"

namespace rlvrseg {

struct RolloutGroup {
  std::vector<double> rewards;
  std::optional<std::vector<double>> ratios;    // pi_theta / pi_theta_old
  std::optional<std::vector<double>> kl_terms;  // per-rollout KL estimates
};

enum class StdMode { kPopulation, kSample };

struct GrpoConfig {
  double clip_epsilon = 0.2;
  double kl_beta = 0.0;
  double std_floor = 1e-6;
  StdMode std_mode = StdMode::kPopulation;
};

struct RestConfig {
  int pool_size = 256;
  int select_size = 16;  // even
};

struct ObjectiveResult {
  std::vector<double> terms;
  double mean = 0.0;
};

// Group-normalized advantages; a group whose reward std falls below the
// floor is degenerate and yields all-zero advantages.
std::vector<double> advantages(const RolloutGroup& group,
                               const GrpoConfig& cfg = {});

bool is_degenerate_group(const std::vector<double>& rewards,
                         const GrpoConfig& cfg = {});

ObjectiveResult grpo_objective(const RolloutGroup& group,
                               const std::vector<double>& adv,
                               const GrpoConfig& cfg = {});

// Indices of the m/2 largest- and m/2 smallest-advantage rollouts, stable
// sorted by (advantage, index); result sorted ascending by index.
std::vector<int> rest_select(const std::vector<double>& adv,
                             const RestConfig& cfg);

}  // namespace rlvrseg
