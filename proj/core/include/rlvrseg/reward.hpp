#pragma once

#include <utility>
#include <vector>

#include "rlvrseg/geometry.hpp"
#include "rlvrseg/response.hpp"

namespace rlvrseg {

struct GtInstance {
  Mask mask;
  BBox bbox;   // tight box of mask
  Point point; // a set bit of mask

  static GtInstance from_mask(const Mask& m);
};

enum class MatchingCost { kBBoxIou, kMaskIou };

struct RewardConfig {
  double bbox_iou_threshold = 0.5;
  double bbox_l1_threshold = 10.0;
  double point_l1_threshold = 30.0;
  // (exclusive lower IoU bound, raw tier value), ascending.
  std::vector<std::pair<double, double>> mask_tiers = {
      {0.30, 1.0}, {0.50, 2.0}, {0.70, 3.0}, {0.80, 4.0}, {0.90, 5.0}};
  double mask_scale = 0.2;
  double weight_thinking = 1.0;
  double weight_answer = 1.0;
  double weight_non_repeat = 1.0;
  MatchingCost matching_cost = MatchingCost::kBBoxIou;
  bool l1_sum_mode = false;
  // Accuracy credited to a correct empty answer when no GT exists;
  // defaults to the maximum per-pair score (5 * mask_scale + 3).
  double no_target_accuracy = 4.0;
};

struct PairScores {
  double mask_tier_reward = 0.0;
  double bbox_iou_reward = 0.0;
  double bbox_l1_reward = 0.0;
  double point_l1_reward = 0.0;
  double mask_iou_value = 0.0;
};

struct RewardBreakdown {
  FormatRewards format;
  std::vector<std::pair<int, int>> assignment;  // (pred_index, gt_index)
  std::vector<PairScores> per_pair;
  double accuracy_total = 0.0;
  double total = 0.0;
  int n_pred = 0;
  int n_gt = 0;
};

double mask_tier_reward(double iou, const RewardConfig& cfg);

// Min-cost assignment of size min(rows, cols) on a rectangular matrix.
// Rows are scanned in ascending index so equal-cost optima resolve toward
// lower (pred, gt) indices.
std::vector<std::pair<int, int>> hungarian_match(
    const std::vector<std::vector<double>>& costs);

// `masks` holds one generated mask per prediction; it may be empty, in which
// case the mask-tier component is zero (matching must then use bbox IoU).
RewardBreakdown score_rollout(const ParsedResponse& parsed,
                              const std::vector<GtInstance>& gts,
                              const std::vector<Mask>& masks,
                              const FormatRewards& format,
                              const RewardConfig& cfg = {});

}  // namespace rlvrseg
