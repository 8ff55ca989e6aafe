#include "rlvrseg/sim.hpp"

#include <algorithm>
#include <cmath>

#include "rlvrseg/metrics.hpp"

namespace rlvrseg {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t scene_id,
                std::uint64_t rollout_id) {
  std::uint64_t s = seed;
  s = splitmix64(s) ^ scene_id;
  s = splitmix64(s) ^ rollout_id;
  s = splitmix64(s);
  return Rng(s);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal(double sigma) {
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

int Rng::uniform_int(int lo, int hi) {
  return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
}

int Rng::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  double l = std::exp(-lambda), p = 1.0;
  int k = 0;
  do {
    ++k;
    p *= uniform();
  } while (p > l);
  return k - 1;
}

std::vector<Scene> generate_scenes(int count, const SceneGenConfig& cfg,
                                   std::uint64_t seed) {
  std::vector<Scene> scenes;
  scenes.reserve(std::size_t(count));
  for (int id = 0; id < count; ++id) {
    Rng rng = Rng::stream(seed, std::uint64_t(id), 0xfffffffful);
    Scene sc;
    sc.id = id;
    sc.dims = cfg.dims;
    sc.difficulty = cfg.difficulty;
    int n = rng.uniform_int(cfg.min_instances, cfg.max_instances);

    // Place each instance in its own grid cell so GT masks are disjoint.
    int cols = int(std::ceil(std::sqrt(double(n))));
    int rows = (n + cols - 1) / cols;
    int cw = cfg.dims.width / cols, ch = cfg.dims.height / rows;
    for (int k = 0; k < n; ++k) {
      int cx = (k % cols) * cw, cy = (k / cols) * ch;
      int w = rng.uniform_int(std::max(4, cw / 4), std::max(5, cw - 2));
      int h = rng.uniform_int(std::max(4, ch / 4), std::max(5, ch - 2));
      w = std::min(w, cw - 2);
      h = std::min(h, ch - 2);
      int x1 = cx + 1 + rng.uniform_int(0, std::max(0, cw - w - 2));
      int y1 = cy + 1 + rng.uniform_int(0, std::max(0, ch - h - 2));
      Mask m(cfg.dims);
      bool ellipse = cfg.use_ellipses && rng.bernoulli(0.5);
      if (ellipse && w >= 6 && h >= 6) {
        double rx = w / 2.0, ry = h / 2.0;
        double ox = x1 + rx, oy = y1 + ry;
        for (int y = y1; y < y1 + h; ++y)
          for (int x = x1; x < x1 + w; ++x) {
            double dx = (x + 0.5 - ox) / rx, dy = (y + 0.5 - oy) / ry;
            if (dx * dx + dy * dy <= 1.0) m.set(x, y);
          }
      } else {
        for (int y = y1; y < y1 + h; ++y)
          for (int x = x1; x < x1 + w; ++x) m.set(x, y);
      }
      sc.gts.push_back(GtInstance::from_mask(m));
    }
    scenes.push_back(std::move(sc));
  }
  return scenes;
}

namespace {

int perturb(Rng& rng, int v, double sigma, int lo, int hi) {
  int nv = v + int(std::lround(rng.normal(sigma)));
  return std::clamp(nv, lo, hi);
}

Mask noisy_box_mask(Rng& rng, const BBox& box, ImageDims dims, int erosion) {
  if (erosion <= 0) return rasterize(box, dims);
  int x1 = box.x1 + rng.uniform_int(-erosion, erosion);
  int y1 = box.y1 + rng.uniform_int(-erosion, erosion);
  int x2 = box.x2 + rng.uniform_int(-erosion, erosion);
  int y2 = box.y2 + rng.uniform_int(-erosion, erosion);
  BBox noisy(std::min(x1, x2), std::min(y1, y2), std::max(x1, x2),
             std::max(y1, y2));
  return rasterize(noisy, dims);
}

}  // namespace

SimRollout sample_rollout(const Scene& scene, const PredictorConfig& pcfg,
                          const MaskStubConfig& mcfg, int rollout_id) {
  Rng rng = Rng::stream(pcfg.seed, std::uint64_t(scene.id),
                        std::uint64_t(rollout_id));
  SimRollout out;

  if (rng.bernoulli(pcfg.parse_fail_prob)) {
    out.text = "<answer>[</answer>";  // missing think block, broken JSON
    out.parsed = parse_response(out.text, scene.dims);
    return out;
  }

  double p_hit = std::clamp(pcfg.hit_prob * (1.0 - scene.difficulty), 0.0, 1.0);
  const int w = scene.dims.width, h = scene.dims.height;

  std::vector<Prediction> preds;
  for (std::size_t k = 0; k < scene.gts.size(); ++k) {
    if (!rng.bernoulli(p_hit)) continue;
    const GtInstance& gt = scene.gts[k];
    double sigma = pcfg.coord_noise_sigma;
    int x1 = perturb(rng, gt.bbox.x1, sigma, 0, w);
    int y1 = perturb(rng, gt.bbox.y1, sigma, 0, h);
    int x2 = perturb(rng, gt.bbox.x2, sigma, 0, w);
    int y2 = perturb(rng, gt.bbox.y2, sigma, 0, h);
    Prediction p;
    p.label = "target " + std::to_string(k);
    p.bbox = BBox(std::min(x1, x2), std::min(y1, y2), std::max(x1, x2),
                  std::max(y1, y2));
    p.point.x = std::clamp(perturb(rng, gt.point.x, sigma, 0, w - 1),
                           p.bbox.x1, std::max(p.bbox.x1, p.bbox.x2 - 1));
    p.point.y = std::clamp(perturb(rng, gt.point.y, sigma, 0, h - 1),
                           p.bbox.y1, std::max(p.bbox.y1, p.bbox.y2 - 1));
    preds.push_back(std::move(p));
  }
  int spurious = rng.poisson(pcfg.spurious_rate);
  for (int s = 0; s < spurious; ++s) {
    int x1 = rng.uniform_int(0, w - 2), y1 = rng.uniform_int(0, h - 2);
    int x2 = rng.uniform_int(x1 + 1, w - 1), y2 = rng.uniform_int(y1 + 1, h - 1);
    Prediction p;
    p.label = "object";
    p.bbox = BBox(x1, y1, x2, y2);
    p.point = {x1, y1};
    preds.push_back(std::move(p));
  }

  std::string think = preds.empty()
                          ? "No region in the image matches the query."
                          : "Locating the queried regions in the image.";
  out.text = serialize_response(think, preds);
  out.parsed = parse_response(out.text, scene.dims);

  for (const Prediction& p : out.parsed.predictions) {
    Mask clean = rasterize(p.bbox, scene.dims);
    Mask noisy = noisy_box_mask(rng, p.bbox, scene.dims,
                                mcfg.boundary_erosion_noise);
    double q = mask_iou(noisy, clean) + rng.normal(mcfg.quality_noise_sigma);
    out.masks.push_back(std::move(noisy));
    out.qualities.push_back(q);
  }
  return out;
}

double rollout_union_iou(const Scene& scene, const SimRollout& rollout) {
  std::vector<Mask> gt_masks;
  for (const auto& gt : scene.gts) gt_masks.push_back(gt.mask);
  Mask gt_union = gt_masks.empty() ? Mask(scene.dims) : mask_union(gt_masks);
  Mask pred_union =
      rollout.masks.empty() ? Mask(scene.dims) : mask_union(rollout.masks);
  if (gt_union.empty() && pred_union.empty())
    return rollout.parsed.parse_ok && rollout.parsed.is_empty_answer ? 1.0 : 0.0;
  return mask_iou(gt_union, pred_union);
}

std::vector<ZeroVarianceRow> zero_variance_experiment(
    const std::vector<Scene>& scenes, const PredictorConfig& pcfg,
    const MaskStubConfig& mcfg, const std::vector<int>& n_values,
    const RewardConfig& rcfg, const GrpoConfig& gcfg) {
  int n_max = n_values.empty() ? 0
                               : *std::max_element(n_values.begin(),
                                                   n_values.end());
  std::vector<ZeroVarianceRow> rows;
  // Rollouts are shared across n via per-(scene, rollout) streams, so the
  // group of size n is a prefix of the group of size n_max.
  std::vector<std::vector<double>> rewards(scenes.size());
  std::vector<std::vector<bool>> correct(scenes.size());
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    const Scene& sc = scenes[si];
    for (int i = 0; i < n_max; ++i) {
      SimRollout ro = sample_rollout(sc, pcfg, mcfg, i);
      FormatRewards fr = format_rewards(ro.text, ro.parsed);
      RewardBreakdown bd = score_rollout(ro.parsed, sc.gts, ro.masks, fr, rcfg);
      rewards[si].push_back(bd.total);
      correct[si].push_back(rollout_union_iou(sc, ro) > 0.5);
    }
  }
  for (int n : n_values) {
    ZeroVarianceRow row;
    row.n = n;
    int zero_var = 0, any_correct = 0;
    for (std::size_t si = 0; si < scenes.size(); ++si) {
      std::vector<double> group(rewards[si].begin(),
                                rewards[si].begin() + n);
      if (is_degenerate_group(group, gcfg)) ++zero_var;
      bool hit = false;
      for (int i = 0; i < n; ++i) hit = hit || correct[si][i];
      if (hit) ++any_correct;
    }
    row.zero_variance_fraction = double(zero_var) / double(scenes.size());
    row.any_correct_fraction = double(any_correct) / double(scenes.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<VotingRow> voting_experiment(const std::vector<Scene>& scenes,
                                         const PredictorConfig& pcfg,
                                         const MaskStubConfig& mcfg,
                                         const std::vector<int>& n_values,
                                         const VotingConfig& vcfg) {
  std::vector<VotingRow> rows;
  for (int n : n_values) {
    VotingRow row;
    row.n_samples = n;
    double voted_sum = 0.0, single_sum = 0.0;
    for (const Scene& sc : scenes) {
      std::vector<Mask> gt_masks;
      for (const auto& gt : sc.gts) gt_masks.push_back(gt.mask);
      Mask gt_union =
          gt_masks.empty() ? Mask(sc.dims) : mask_union(gt_masks);

      std::vector<ParsedResponse> parsed;
      std::vector<CandidateMask> pool;
      double per_response_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        SimRollout ro = sample_rollout(sc, pcfg, mcfg, i);
        per_response_sum += rollout_union_iou(sc, ro);
        for (std::size_t k = 0; k < ro.masks.size(); ++k) {
          CandidateMask c;
          c.response_id = i;
          c.source_pred_index = int(k);
          c.quality = ro.qualities[k];
          c.mask = ro.masks[k];
          pool.push_back(std::move(c));
        }
        parsed.push_back(std::move(ro.parsed));
      }
      single_sum += per_response_sum / double(n);

      double voted_iou = 0.0;
      try {
        VoteDecision dec = aggregate(parsed, pool, vcfg);
        if (dec.no_target) {
          voted_iou = gt_union.empty() ? 1.0 : 0.0;
        } else {
          voted_iou = mask_iou(*dec.mask, gt_union);
        }
      } catch (const NoValidResponses&) {
        voted_iou = 0.0;
      }
      voted_sum += voted_iou;
    }
    row.voted_giou = voted_sum / double(scenes.size());
    row.single_giou = single_sum / double(scenes.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<RestRow> rest_experiment(
    const std::vector<Scene>& scenes, const PredictorConfig& pcfg,
    const MaskStubConfig& mcfg,
    const std::vector<std::pair<int, int>>& variants,
    const RewardConfig& rcfg, const GrpoConfig& gcfg) {
  std::vector<RestRow> rows;
  for (const auto& [n, m] : variants) {
    RestRow row;
    row.pool_size = n;
    row.select_size = m;
    int sel_hits = 0, pool_hits = 0;
    for (const Scene& sc : scenes) {
      std::vector<double> group;
      std::vector<bool> correct;
      for (int i = 0; i < n; ++i) {
        SimRollout ro = sample_rollout(sc, pcfg, mcfg, i);
        FormatRewards fr = format_rewards(ro.text, ro.parsed);
        group.push_back(
            score_rollout(ro.parsed, sc.gts, ro.masks, fr, rcfg).total);
        correct.push_back(rollout_union_iou(sc, ro) > 0.5);
      }
      RolloutGroup rg;
      rg.rewards = group;
      std::vector<double> adv = advantages(rg, gcfg);
      std::vector<int> sel = rest_select(adv, RestConfig{n, m});
      bool sel_hit = false, pool_hit = false;
      for (int i : sel) sel_hit = sel_hit || correct[std::size_t(i)];
      for (bool c : correct) pool_hit = pool_hit || c;
      if (sel_hit) ++sel_hits;
      if (pool_hit) ++pool_hits;
    }
    row.selected_has_correct_fraction =
        double(sel_hits) / double(scenes.size());
    row.pool_has_correct_fraction = double(pool_hits) / double(scenes.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rlvrseg
