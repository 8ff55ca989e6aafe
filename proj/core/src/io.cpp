#include "rlvrseg/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace rlvrseg {

using nlohmann::json;

json rle_to_json(const RleMask& r) {
  return json{{"size", {r.dims.height, r.dims.width}}, {"counts", r.counts}};
}

RleMask rle_from_json(const json& j) {
  if (!j.is_object() || !j.contains("size") || !j.contains("counts"))
    throw InputError("RLE object needs size and counts");
  const auto& size = j.at("size");
  if (!size.is_array() || size.size() != 2)
    throw InputError("RLE size must be [height, width]");
  RleMask r;
  r.dims = ImageDims(size[1].get<int>(), size[0].get<int>());
  r.counts = j.at("counts").get<std::vector<std::int64_t>>();
  return r;
}

json mask_to_json(const Mask& m) { return rle_to_json(rle_encode(m)); }

Mask mask_from_json(const json& j) { return rle_decode(rle_from_json(j)); }

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<json> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw InputError(path + ":" + std::to_string(line_no) + ": bad JSON");
    records.push_back(std::move(j));
  }
  return records;
}

void write_jsonl(const std::string& path, const std::vector<json>& records) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (const auto& r : records) out << r.dump() << "\n";
}

json breakdown_to_json(const RewardBreakdown& bd) {
  json pairs = json::array();
  for (std::size_t i = 0; i < bd.assignment.size(); ++i) {
    const PairScores& ps = bd.per_pair[i];
    pairs.push_back({{"pred_index", bd.assignment[i].first},
                     {"gt_index", bd.assignment[i].second},
                     {"mask_tier_reward", ps.mask_tier_reward},
                     {"bbox_iou_reward", ps.bbox_iou_reward},
                     {"bbox_l1_reward", ps.bbox_l1_reward},
                     {"point_l1_reward", ps.point_l1_reward},
                     {"mask_iou", ps.mask_iou_value}});
  }
  return json{{"schema", "v1"},
              {"format",
               {{"thinking", bd.format.thinking},
                {"answer", bd.format.answer},
                {"non_repeat", bd.format.non_repeat}}},
              {"pairs", pairs},
              {"accuracy_total", bd.accuracy_total},
              {"total", bd.total},
              {"n_pred", bd.n_pred},
              {"n_gt", bd.n_gt}};
}

RewardConfig reward_config_from_json(const json& j) {
  RewardConfig cfg;
  cfg.bbox_iou_threshold = j.value("bbox_iou_threshold", cfg.bbox_iou_threshold);
  cfg.bbox_l1_threshold = j.value("bbox_l1_threshold", cfg.bbox_l1_threshold);
  cfg.point_l1_threshold = j.value("point_l1_threshold", cfg.point_l1_threshold);
  cfg.mask_scale = j.value("mask_scale", cfg.mask_scale);
  cfg.weight_thinking = j.value("weight_thinking", cfg.weight_thinking);
  cfg.weight_answer = j.value("weight_answer", cfg.weight_answer);
  cfg.weight_non_repeat = j.value("weight_non_repeat", cfg.weight_non_repeat);
  cfg.l1_sum_mode = j.value("l1_sum_mode", cfg.l1_sum_mode);
  cfg.no_target_accuracy = j.value("no_target_accuracy", cfg.no_target_accuracy);
  if (j.contains("matching_cost")) {
    std::string mc = j.at("matching_cost").get<std::string>();
    if (mc == "bbox_iou")
      cfg.matching_cost = MatchingCost::kBBoxIou;
    else if (mc == "mask_iou")
      cfg.matching_cost = MatchingCost::kMaskIou;
    else
      throw InputError("matching_cost must be bbox_iou or mask_iou");
  }
  if (j.contains("mask_tiers")) {
    cfg.mask_tiers.clear();
    for (const auto& t : j.at("mask_tiers"))
      cfg.mask_tiers.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    for (std::size_t i = 1; i < cfg.mask_tiers.size(); ++i) {
      if (cfg.mask_tiers[i].first <= cfg.mask_tiers[i - 1].first ||
          cfg.mask_tiers[i].second < cfg.mask_tiers[i - 1].second)
        throw InputError("mask tiers must have increasing bounds and "
                         "non-decreasing rewards");
    }
  }
  return cfg;
}

GrpoConfig grpo_config_from_json(const json& j) {
  GrpoConfig cfg;
  cfg.clip_epsilon = j.value("clip_epsilon", cfg.clip_epsilon);
  cfg.kl_beta = j.value("kl_beta", cfg.kl_beta);
  cfg.std_floor = j.value("std_floor", cfg.std_floor);
  if (j.value("sample_std", false)) cfg.std_mode = StdMode::kSample;
  return cfg;
}

VotingConfig voting_config_from_json(const json& j) {
  VotingConfig cfg;
  cfg.tau_iou = j.value("tau_iou", cfg.tau_iou);
  cfg.tau_vote = j.value("tau_vote", cfg.tau_vote);
  cfg.no_target_threshold = j.value("no_target_threshold", cfg.no_target_threshold);
  cfg.sample_count = j.value("sample_count", cfg.sample_count);
  return cfg;
}

json decision_to_json(const VoteDecision& d) {
  json out{{"schema", "v1"}};
  if (d.no_target) {
    out["decision"] = "no_target";
    return out;
  }
  out["decision"] = "mask";
  out["mask"] = mask_to_json(*d.mask);
  json clusters = json::array();
  for (const auto& cl : d.selected_clusters) {
    json members = json::array();
    for (const auto& m : cl.members)
      members.push_back({{"response_id", m.response_id},
                         {"pred_index", m.source_pred_index},
                         {"quality", m.quality}});
    clusters.push_back(
        {{"votes", cl.votes},
         {"vote_ratio", cl.vote_ratio},
         {"representative",
          {{"response_id", cl.representative.response_id},
           {"pred_index", cl.representative.source_pred_index}}},
         {"chosen",
          {{"response_id", cl.members.front().response_id},
           {"pred_index", cl.members.front().source_pred_index},
           {"quality", cl.members.front().quality}}},
         {"members", members}});
  }
  out["clusters"] = clusters;
  return out;
}

json report_to_json(const EvalReport& r) {
  json per_type = json::array();
  for (const auto& [t, m] : r.per_type)
    per_type.push_back({{"type", to_string(t)},
                        {"count", r.type_counts.at(t)},
                        {"giou", m.giou},
                        {"ciou", m.ciou}});
  return json{{"schema", "v1"},
              {"no_target_convention",
               "empty GT scores 1 for explicit no-target prediction, else 0"},
              {"overall",
               {{"count", r.overall_count},
                {"giou", r.overall.giou},
                {"ciou", r.overall.ciou}}},
              {"per_type", per_type}};
}

EvalSample eval_sample_from_json(const json& j) {
  EvalSample s;
  s.sample_id = j.value("sample_id", "");
  s.reasoning_type = reasoning_type_from_string(j.value("type", "none"));
  if (!j.contains("gt")) throw InputError("eval sample needs gt mask");
  s.gt_mask = mask_from_json(j.at("gt"));
  if (j.value("no_target", false)) {
    s.pred_is_no_target = true;
    s.pred_mask = Mask(s.gt_mask.dims());
  } else if (j.contains("pred")) {
    s.pred_mask = mask_from_json(j.at("pred"));
  } else {
    throw InputError("eval sample needs pred mask or no_target flag");
  }
  return s;
}

std::string config_hash(const json& config) {
  std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::string zero_variance_csv(const std::vector<ZeroVarianceRow>& rows) {
  std::string out = "n,zero_variance_fraction,any_correct_fraction\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + fmt(r.zero_variance_fraction) + "," +
           fmt(r.any_correct_fraction) + "\n";
  return out;
}

std::string voting_csv(const std::vector<VotingRow>& rows) {
  std::string out = "n_samples,voted_giou,single_giou\n";
  for (const auto& r : rows)
    out += std::to_string(r.n_samples) + "," + fmt(r.voted_giou) + "," +
           fmt(r.single_giou) + "\n";
  return out;
}

std::string rest_csv(const std::vector<RestRow>& rows) {
  std::string out =
      "pool_size,select_size,selected_has_correct,pool_has_correct\n";
  for (const auto& r : rows)
    out += std::to_string(r.pool_size) + "," + std::to_string(r.select_size) +
           "," + fmt(r.selected_has_correct_fraction) + "," +
           fmt(r.pool_has_correct_fraction) + "\n";
  return out;
}

}  // namespace rlvrseg
