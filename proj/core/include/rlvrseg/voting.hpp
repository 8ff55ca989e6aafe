#pragma once

#include <optional>
#include <vector>

#include "rlvrseg/geometry.hpp"
#include "rlvrseg/response.hpp"

namespace rlvrseg {

struct CandidateMask {
  int response_id = 0;
  int source_pred_index = 0;
  double quality = 0.0;  // SAM-style mask quality score
  Mask mask;
};

struct ResponseSummary {
  int response_id = 0;
  bool parse_ok = false;
  int predicted_count = 0;
  bool is_empty = false;
};

struct Cluster {
  CandidateMask representative;  // founder, never updated
  std::vector<CandidateMask> members;
  int votes = 0;  // distinct response_ids among members
  double vote_ratio = 0.0;
};

struct VotingConfig {
  double tau_iou = 0.85;
  double tau_vote = 0.2;
  double no_target_threshold = 0.5;
  int sample_count = 32;
};

struct TargetCount {
  bool no_target = false;
  int count = 0;
};

struct VoteDecision {
  bool no_target = false;
  std::optional<Mask> mask;
  std::vector<Cluster> selected_clusters;
};

std::pair<std::vector<ResponseSummary>, int> summarize_responses(
    const std::vector<ParsedResponse>& parsed);

// Greedy clustering in canonical candidate order: descending quality,
// ties by ascending (response_id, source_pred_index).
std::vector<Cluster> cluster_masks(const std::vector<CandidateMask>& pool,
                                   const VotingConfig& cfg);

TargetCount decide_target_count(const std::vector<ResponseSummary>& summaries,
                                const VotingConfig& cfg);

VoteDecision aggregate(const std::vector<ParsedResponse>& parsed,
                       const std::vector<CandidateMask>& pool,
                       const VotingConfig& cfg);

}  // namespace rlvrseg
