#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rlvrseg/io.hpp"

namespace {

using nlohmann::json;
using namespace rlvrseg;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError("bad JSON in " + path);
  return j;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << body;
}

std::uint64_t effective_seed(std::uint64_t config_seed) {
  if (const char* env = std::getenv("RLVRSEG_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return config_seed;
}

std::vector<GtInstance> gts_from_record(const json& rec) {
  std::vector<GtInstance> gts;
  for (const auto& inst : rec.at("instances")) {
    GtInstance gt = GtInstance::from_mask(mask_from_json(inst.at("mask")));
    if (inst.contains("bbox")) {
      const auto& b = inst.at("bbox");
      gt.bbox = BBox(b[0].get<int>(), b[1].get<int>(), b[2].get<int>(),
                     b[3].get<int>());
    }
    if (inst.contains("point")) {
      const auto& p = inst.at("point");
      gt.point = {p[0].get<int>(), p[1].get<int>()};
    }
    gts.push_back(std::move(gt));
  }
  return gts;
}

int cmd_reward(const std::string& rollouts_path, const std::string& gts_path,
               const std::string& config_path, const std::string& out_path) {
  RewardConfig cfg;
  if (!config_path.empty())
    cfg = reward_config_from_json(load_json_file(config_path));

  auto rollouts = read_jsonl(rollouts_path);
  auto gt_records = read_jsonl(gts_path);
  std::map<std::string, const json*> gt_by_id;
  for (const auto& rec : gt_records)
    gt_by_id[rec.at("id").get<std::string>()] = &rec;

  std::vector<json> out;
  int failures = 0;
  for (const auto& rec : rollouts) {
    try {
      std::string id = rec.at("id").get<std::string>();
      auto it = gt_by_id.find(id);
      if (it == gt_by_id.end())
        throw InputError("rollout id " + id + " has no GT record");
      const json& gt_rec = *it->second;
      ImageDims dims(gt_rec.at("width").get<int>(),
                     gt_rec.at("height").get<int>());
      std::vector<GtInstance> gts = gts_from_record(gt_rec);

      std::string text = rec.at("text").get<std::string>();
      ParsedResponse parsed = parse_response(text, dims);
      FormatRewards fr = format_rewards(text, parsed);
      std::vector<Mask> masks;
      if (rec.contains("masks"))
        for (const auto& m : rec.at("masks"))
          masks.push_back(mask_from_json(m));

      RewardBreakdown bd = score_rollout(parsed, gts, masks, fr, cfg);
      json j = breakdown_to_json(bd);
      j["id"] = id;
      out.push_back(std::move(j));
    } catch (const std::exception& e) {
      ++failures;
      out.push_back(json{{"schema", "v1"},
                         {"id", rec.value("id", "")},
                         {"error", e.what()}});
    }
  }
  write_jsonl(out_path, out);
  if (!rollouts.empty() && failures == int(rollouts.size())) {
    std::cerr << "all " << failures << " rollout records failed\n";
    return kExitInput;
  }
  return kExitOk;
}

int cmd_advantage(const std::string& groups_path,
                  const std::string& config_path, const std::string& out_path,
                  int rest_m) {
  GrpoConfig cfg;
  if (!config_path.empty())
    cfg = grpo_config_from_json(load_json_file(config_path));

  std::vector<json> out;
  for (auto& rec : read_jsonl(groups_path)) {
    RolloutGroup group;
    group.rewards = rec.at("rewards").get<std::vector<double>>();
    if (rec.contains("ratios"))
      group.ratios = rec.at("ratios").get<std::vector<double>>();

    std::vector<double> adv = advantages(group, cfg);
    rec["schema"] = "v1";
    rec["advantages"] = adv;
    rec["degenerate"] = is_degenerate_group(group.rewards, cfg);
    if (group.ratios) {
      ObjectiveResult obj = grpo_objective(group, adv, cfg);
      rec["objective_terms"] = obj.terms;
      rec["objective_mean"] = obj.mean;
    }
    if (rest_m > 0) {
      rec["rest_selected"] =
          rest_select(adv, RestConfig{int(adv.size()), rest_m});
    }
    out.push_back(std::move(rec));
  }
  write_jsonl(out_path, out);
  return kExitOk;
}

int cmd_vote(const std::string& responses_path, const std::string& pool_path,
             const std::string& config_path, const std::string& out_path) {
  VotingConfig cfg;
  if (!config_path.empty())
    cfg = voting_config_from_json(load_json_file(config_path));

  auto response_records = read_jsonl(responses_path);
  std::vector<ParsedResponse> parsed(response_records.size());
  for (const auto& rec : response_records) {
    int id = rec.at("response_id").get<int>();
    if (id < 0 || id >= int(parsed.size()))
      throw InputError("response_id out of range: " + std::to_string(id));
    ImageDims dims(rec.at("width").get<int>(), rec.at("height").get<int>());
    parsed[std::size_t(id)] =
        parse_response(rec.at("text").get<std::string>(), dims);
  }

  std::vector<CandidateMask> pool;
  for (const auto& rec : read_jsonl(pool_path)) {
    CandidateMask c;
    c.response_id = rec.at("response_id").get<int>();
    c.source_pred_index = rec.at("pred_index").get<int>();
    c.quality = rec.at("quality").get<double>();
    c.mask = mask_from_json(rec.at("mask"));
    pool.push_back(std::move(c));
  }

  VoteDecision decision = aggregate(parsed, pool, cfg);
  write_text_file(out_path, decision_to_json(decision).dump(2) + "\n");
  return kExitOk;
}

int cmd_eval(const std::string& dataset_path, const std::string& out_path,
             bool print_table) {
  std::vector<EvalSample> samples;
  for (const auto& rec : read_jsonl(dataset_path))
    samples.push_back(eval_sample_from_json(rec));

  EvalReport rep = report(samples);
  write_text_file(out_path, report_to_json(rep).dump(2) + "\n");
  if (print_table) std::cout << report_table(rep);
  return kExitOk;
}

int cmd_simulate(const std::string& config_path,
                 const std::string& out_prefix) {
  json cfg = load_json_file(config_path);
  std::string experiment = cfg.at("experiment").get<std::string>();
  std::uint64_t seed = effective_seed(cfg.value("seed", std::uint64_t(0)));

  const json scn = cfg.value("scenes", json::object());
  SceneGenConfig sg;
  sg.dims = ImageDims(scn.value("width", 64), scn.value("height", 64));
  sg.min_instances = scn.value("min_instances", 1);
  sg.max_instances = scn.value("max_instances", 1);
  sg.difficulty = scn.value("difficulty", 0.0);
  sg.use_ellipses = scn.value("use_ellipses", true);
  int scene_count = scn.value("count", 100);
  std::vector<Scene> scenes = generate_scenes(scene_count, sg, seed);

  const json pj = cfg.value("predictor", json::object());
  PredictorConfig pcfg;
  pcfg.hit_prob = pj.value("hit_prob", pcfg.hit_prob);
  pcfg.coord_noise_sigma = pj.value("coord_noise_sigma", pcfg.coord_noise_sigma);
  pcfg.spurious_rate = pj.value("spurious_rate", pcfg.spurious_rate);
  pcfg.parse_fail_prob = pj.value("parse_fail_prob", pcfg.parse_fail_prob);
  pcfg.seed = seed + 1;

  const json mj = cfg.value("mask_stub", json::object());
  MaskStubConfig mcfg;
  mcfg.boundary_erosion_noise =
      mj.value("boundary_erosion_noise", mcfg.boundary_erosion_noise);
  mcfg.quality_noise_sigma =
      mj.value("quality_noise_sigma", mcfg.quality_noise_sigma);

  RewardConfig rcfg =
      reward_config_from_json(cfg.value("reward", json::object()));
  GrpoConfig gcfg = grpo_config_from_json(cfg.value("grpo", json::object()));
  VotingConfig vcfg =
      voting_config_from_json(cfg.value("voting", json::object()));

  json resolved = cfg;
  resolved["seed"] = seed;
  std::string hash = config_hash(resolved);

  std::string csv;
  json rows = json::array();
  if (experiment == "zero_variance") {
    auto n_values = cfg.at("n_values").get<std::vector<int>>();
    auto result =
        zero_variance_experiment(scenes, pcfg, mcfg, n_values, rcfg, gcfg);
    csv = zero_variance_csv(result);
    for (const auto& r : result)
      rows.push_back({{"n", r.n},
                      {"zero_variance_fraction", r.zero_variance_fraction},
                      {"any_correct_fraction", r.any_correct_fraction}});
  } else if (experiment == "voting") {
    auto n_values = cfg.at("n_values").get<std::vector<int>>();
    auto result = voting_experiment(scenes, pcfg, mcfg, n_values, vcfg);
    csv = voting_csv(result);
    for (const auto& r : result)
      rows.push_back({{"n_samples", r.n_samples},
                      {"voted_giou", r.voted_giou},
                      {"single_giou", r.single_giou}});
  } else if (experiment == "rest") {
    std::vector<std::pair<int, int>> variants;
    for (const auto& v : cfg.at("variants"))
      variants.emplace_back(v[0].get<int>(), v[1].get<int>());
    auto result = rest_experiment(scenes, pcfg, mcfg, variants, rcfg, gcfg);
    csv = rest_csv(result);
    for (const auto& r : result)
      rows.push_back(
          {{"pool_size", r.pool_size},
           {"select_size", r.select_size},
           {"selected_has_correct", r.selected_has_correct_fraction},
           {"pool_has_correct", r.pool_has_correct_fraction}});
  } else {
    throw InputError("unknown experiment: " + experiment);
  }

  write_text_file(out_prefix + ".csv", "# config_hash=" + hash + "\n" + csv);
  write_text_file(out_prefix + ".json",
                  json{{"schema", "v1"},
                       {"experiment", experiment},
                       {"config_hash", hash},
                       {"rows", rows}}
                          .dump(2) +
                      "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward, advantage, voting, and evaluation toolkit for "
               "mask-grounded RLVR pipelines"};
  app.require_subcommand(1);

  std::string rollouts, gts, config, out, groups, responses, pool, dataset;
  int rest_m = 0;
  bool table = false;

  auto* reward_cmd =
      app.add_subcommand("reward", "Score rollouts against GT instances");
  reward_cmd->add_option("--rollouts", rollouts)->required();
  reward_cmd->add_option("--gts", gts)->required();
  reward_cmd->add_option("--config", config);
  reward_cmd->add_option("--out", out)->required();

  auto* adv_cmd = app.add_subcommand(
      "advantage", "Group-normalized advantages and REST selection");
  adv_cmd->add_option("--groups", groups)->required();
  adv_cmd->add_option("--config", config);
  adv_cmd->add_option("--out", out)->required();
  adv_cmd->add_option("--rest-m", rest_m,
                      "Also emit REST-selected indices of this size");

  auto* vote_cmd =
      app.add_subcommand("vote", "Mask-level majority voting over responses");
  vote_cmd->add_option("--responses", responses)->required();
  vote_cmd->add_option("--pool", pool)->required();
  vote_cmd->add_option("--config", config);
  vote_cmd->add_option("--out", out)->required();

  auto* eval_cmd = app.add_subcommand("eval", "gIoU/cIoU evaluation report");
  eval_cmd->add_option("--dataset", dataset)->required();
  eval_cmd->add_option("--out", out)->required();
  eval_cmd->add_flag("--table", table, "Print the aligned-text table");

  auto* sim_cmd =
      app.add_subcommand("simulate", "Run a synthetic rollout experiment");
  sim_cmd->add_option("--config", config)->required();
  sim_cmd->add_option("--out-prefix", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (reward_cmd->parsed()) return cmd_reward(rollouts, gts, config, out);
    if (adv_cmd->parsed()) return cmd_advantage(groups, config, out, rest_m);
    if (vote_cmd->parsed()) return cmd_vote(responses, pool, config, out);
    if (eval_cmd->parsed()) return cmd_eval(dataset, out, table);
    if (sim_cmd->parsed()) return cmd_simulate(config, out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
