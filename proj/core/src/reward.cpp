#include "rlvrseg/reward.hpp"

#include <algorithm>
#include <limits>

namespace rlvrseg {

GtInstance GtInstance::from_mask(const Mask& m) {
  GtInstance gt;
  gt.mask = m;
  gt.bbox = tight_bbox(m);
  bool found = false;
  for (int y = gt.bbox.y1; y < gt.bbox.y2 && !found; ++y)
    for (int x = gt.bbox.x1; x < gt.bbox.x2; ++x)
      if (m.get(x, y)) {
        gt.point = {x, y};
        found = true;
        break;
      }
  return gt;
}

double mask_tier_reward(double iou, const RewardConfig& cfg) {
  double tier = 0.0;
  for (const auto& [lower, value] : cfg.mask_tiers) {
    if (iou > lower) tier = value;
  }
  return tier * cfg.mask_scale;
}

std::vector<std::pair<int, int>> hungarian_match(
    const std::vector<std::vector<double>>& costs) {
  int n = int(costs.size());
  int m = n ? int(costs[0].size()) : 0;
  if (n == 0 || m == 0) return {};

  bool transposed = n > m;
  std::vector<std::vector<double>> a;
  if (transposed) {
    a.assign(m, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) a[j][i] = costs[i][j];
    std::swap(n, m);
  } else {
    a = costs;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<std::pair<int, int>> result;
  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed)
      result.emplace_back(j - 1, p[j] - 1);
    else
      result.emplace_back(p[j] - 1, j - 1);
  }
  std::sort(result.begin(), result.end());
  return result;
}

RewardBreakdown score_rollout(const ParsedResponse& parsed,
                              const std::vector<GtInstance>& gts,
                              const std::vector<Mask>& masks,
                              const FormatRewards& format,
                              const RewardConfig& cfg) {
  RewardBreakdown bd;
  bd.format = format;
  bd.n_pred = int(parsed.predictions.size());
  bd.n_gt = int(gts.size());

  double format_total = cfg.weight_thinking * format.thinking +
                        cfg.weight_answer * format.answer +
                        cfg.weight_non_repeat * format.non_repeat;

  if (!parsed.parse_ok) {
    bd.total = format_total;
    return bd;
  }
  if (!masks.empty() && int(masks.size()) != bd.n_pred) {
    throw Error("mask list not aligned with predictions");
  }
  for (const Mask& m : masks)
    for (const GtInstance& gt : gts)
      if (!(m.dims() == gt.mask.dims()))
        throw DimsMismatch("prediction mask dims differ from GT dims");

  if (bd.n_gt == 0) {
    bd.accuracy_total = parsed.is_empty_answer ? cfg.no_target_accuracy : 0.0;
    bd.total = bd.accuracy_total + format_total;
    return bd;
  }
  if (bd.n_pred == 0) {
    bd.total = format_total;
    return bd;
  }

  std::vector<std::vector<double>> costs(bd.n_pred,
                                         std::vector<double>(bd.n_gt));
  for (int i = 0; i < bd.n_pred; ++i) {
    for (int j = 0; j < bd.n_gt; ++j) {
      double score;
      if (cfg.matching_cost == MatchingCost::kMaskIou) {
        if (masks.empty())
          throw Error("mask-IoU matching requires prediction masks");
        score = mask_iou(masks[i], gts[j].mask);
      } else {
        score = bbox_iou(parsed.predictions[i].bbox, gts[j].bbox);
      }
      costs[i][j] = -score;
    }
  }
  bd.assignment = hungarian_match(costs);

  double pair_sum = 0.0;
  for (const auto& [pi, gi] : bd.assignment) {
    const Prediction& pred = parsed.predictions[pi];
    const GtInstance& gt = gts[gi];
    PairScores ps;
    if (!masks.empty()) {
      ps.mask_iou_value = mask_iou(masks[pi], gt.mask);
      ps.mask_tier_reward = mask_tier_reward(ps.mask_iou_value, cfg);
    }
    ps.bbox_iou_reward =
        bbox_iou(pred.bbox, gt.bbox) > cfg.bbox_iou_threshold ? 1.0 : 0.0;
    ps.bbox_l1_reward =
        bbox_l1(pred.bbox, gt.bbox, cfg.l1_sum_mode) < cfg.bbox_l1_threshold
            ? 1.0
            : 0.0;
    ps.point_l1_reward =
        point_l1(pred.point, gt.point, cfg.l1_sum_mode) < cfg.point_l1_threshold
            ? 1.0
            : 0.0;
    pair_sum += ps.mask_tier_reward + ps.bbox_iou_reward + ps.bbox_l1_reward +
                ps.point_l1_reward;
    bd.per_pair.push_back(ps);
  }

  bd.accuracy_total = pair_sum / double(std::max(bd.n_pred, bd.n_gt));
  bd.total = bd.accuracy_total + format_total;
  return bd;
}

}  // namespace rlvrseg
