#include "rlvrseg/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rlvrseg {

namespace {

double reward_std(const std::vector<double>& rewards, StdMode mode) {
  std::size_t n = rewards.size();
  double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  double denom = mode == StdMode::kPopulation ? double(n) : double(n - 1);
  return std::sqrt(ss / denom);
}

}  // namespace

bool is_degenerate_group(const std::vector<double>& rewards,
                         const GrpoConfig& cfg) {
  return reward_std(rewards, cfg.std_mode) < cfg.std_floor;
}

std::vector<double> advantages(const RolloutGroup& group,
                               const GrpoConfig& cfg) {
  std::size_t n = group.rewards.size();
  if (n < 2) throw GroupTooSmall("advantage needs a group of at least 2");

  double mean =
      std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) / n;
  double sd = reward_std(group.rewards, cfg.std_mode);
  std::vector<double> adv(n, 0.0);
  if (sd < cfg.std_floor) return adv;  // degenerate group, no signal
  for (std::size_t i = 0; i < n; ++i)
    adv[i] = (group.rewards[i] - mean) / sd;
  return adv;
}

ObjectiveResult grpo_objective(const RolloutGroup& group,
                               const std::vector<double>& adv,
                               const GrpoConfig& cfg) {
  if (!group.ratios || group.ratios->size() != adv.size())
    throw RatiosRequired("grpo_objective requires aligned likelihood ratios");

  ObjectiveResult res;
  res.terms.reserve(adv.size());
  for (std::size_t i = 0; i < adv.size(); ++i) {
    double ratio = (*group.ratios)[i];
    double clipped =
        std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    double term = std::min(ratio * adv[i], clipped * adv[i]);
    if (group.kl_terms && i < group.kl_terms->size())
      term -= cfg.kl_beta * (*group.kl_terms)[i];
    res.terms.push_back(term);
  }
  res.mean = adv.empty() ? 0.0
                         : std::accumulate(res.terms.begin(), res.terms.end(),
                                           0.0) /
                               double(res.terms.size());
  return res;
}

std::vector<int> rest_select(const std::vector<double>& adv,
                             const RestConfig& cfg) {
  int n = int(adv.size());
  int m = cfg.select_size;
  if (m % 2 != 0 || m < 2) throw Error("REST select size must be even and >= 2");
  if (n < m) throw PoolTooSmall("rollout pool smaller than select size");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return adv[a] < adv[b]; });

  std::vector<int> picked(order.begin(), order.begin() + m / 2);
  picked.insert(picked.end(), order.end() - m / 2, order.end());
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace rlvrseg
