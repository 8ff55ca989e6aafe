#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlvrseg/geometry.hpp"
#include "rlvrseg/grpo.hpp"
#include "rlvrseg/metrics.hpp"
#include "rlvrseg/reward.hpp"
#include "rlvrseg/sim.hpp"
#include "rlvrseg/voting.hpp"

namespace rlvrseg {

// RLE JSON object: {"size": [height, width], "counts": [ints]}
nlohmann::json rle_to_json(const RleMask& r);
RleMask rle_from_json(const nlohmann::json& j);

nlohmann::json mask_to_json(const Mask& m);
Mask mask_from_json(const nlohmann::json& j);

std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::json>& records);

nlohmann::json breakdown_to_json(const RewardBreakdown& bd);

RewardConfig reward_config_from_json(const nlohmann::json& j);
GrpoConfig grpo_config_from_json(const nlohmann::json& j);
VotingConfig voting_config_from_json(const nlohmann::json& j);

nlohmann::json decision_to_json(const VoteDecision& d);

nlohmann::json report_to_json(const EvalReport& r);

EvalSample eval_sample_from_json(const nlohmann::json& j);

// FNV-1a over the canonical JSON dump; embedded in experiment outputs.
std::string config_hash(const nlohmann::json& config);

std::string zero_variance_csv(const std::vector<ZeroVarianceRow>& rows);
std::string voting_csv(const std::vector<VotingRow>& rows);
std::string rest_csv(const std::vector<RestRow>& rows);

}  // namespace rlvrseg
