#include "rlvrseg/voting.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace rlvrseg {

std::pair<std::vector<ResponseSummary>, int> summarize_responses(
    const std::vector<ParsedResponse>& parsed) {
  std::vector<ResponseSummary> summaries;
  summaries.reserve(parsed.size());
  int n_valid = 0;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    ResponseSummary s;
    s.response_id = int(i);
    s.parse_ok = parsed[i].parse_ok;
    s.predicted_count = int(parsed[i].predictions.size());
    s.is_empty = parsed[i].is_empty_answer;
    if (s.parse_ok) ++n_valid;
    summaries.push_back(s);
  }
  return {summaries, n_valid};
}

std::vector<Cluster> cluster_masks(const std::vector<CandidateMask>& pool,
                                   const VotingConfig& cfg) {
  std::vector<const CandidateMask*> order;
  order.reserve(pool.size());
  for (const auto& c : pool) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [](const CandidateMask* a, const CandidateMask* b) {
                     if (a->quality != b->quality)
                       return a->quality > b->quality;
                     if (a->response_id != b->response_id)
                       return a->response_id < b->response_id;
                     return a->source_pred_index < b->source_pred_index;
                   });

  std::vector<Cluster> clusters;
  for (const CandidateMask* cand : order) {
    bool placed = false;
    for (Cluster& cl : clusters) {
      if (mask_iou(cand->mask, cl.representative.mask) >= cfg.tau_iou) {
        cl.members.push_back(*cand);
        placed = true;
        break;
      }
    }
    if (!placed) {
      Cluster cl;
      cl.representative = *cand;
      cl.members.push_back(*cand);
      clusters.push_back(std::move(cl));
    }
  }

  for (Cluster& cl : clusters) {
    std::set<int> responses;
    for (const auto& m : cl.members) responses.insert(m.response_id);
    cl.votes = int(responses.size());
  }
  return clusters;
}

TargetCount decide_target_count(const std::vector<ResponseSummary>& summaries,
                                const VotingConfig& cfg) {
  int n_valid = 0, n_empty = 0;
  std::map<int, int> count_freq;
  for (const auto& s : summaries) {
    if (!s.parse_ok) continue;
    ++n_valid;
    if (s.is_empty) {
      ++n_empty;
    } else {
      ++count_freq[s.predicted_count];
    }
  }
  if (n_valid == 0) throw NoValidResponses("no parseable responses");

  TargetCount out;
  if (double(n_empty) / n_valid >= cfg.no_target_threshold ||
      count_freq.empty()) {
    out.no_target = true;
    return out;
  }
  // Mode over non-empty counts; std::map iteration order breaks frequency
  // ties toward the smaller count.
  int best_count = 0, best_freq = 0;
  for (const auto& [count, freq] : count_freq) {
    if (freq > best_freq) {
      best_count = count;
      best_freq = freq;
    }
  }
  out.count = best_count;
  return out;
}

VoteDecision aggregate(const std::vector<ParsedResponse>& parsed,
                       const std::vector<CandidateMask>& pool,
                       const VotingConfig& cfg) {
  auto [summaries, n_valid] = summarize_responses(parsed);
  TargetCount target = decide_target_count(summaries, cfg);

  VoteDecision out;
  if (target.no_target) {
    out.no_target = true;
    return out;
  }
  if (pool.empty()) throw EmptyInput("non-empty target count but empty pool");

  std::vector<Cluster> clusters = cluster_masks(pool, cfg);
  for (Cluster& cl : clusters)
    cl.vote_ratio = double(cl.votes) / double(n_valid);

  std::vector<int> kept;
  for (int k = 0; k < int(clusters.size()); ++k)
    if (clusters[k].vote_ratio >= cfg.tau_vote) kept.push_back(k);
  if (kept.empty()) {
    // All clusters filtered out: fall back to the unfiltered set.
    kept.resize(clusters.size());
    std::iota(kept.begin(), kept.end(), 0);
  }

  // Rank by votes, ties by founding order.
  std::stable_sort(kept.begin(), kept.end(), [&](int a, int b) {
    return clusters[a].votes > clusters[b].votes;
  });
  int take = std::min(target.count, int(kept.size()));

  std::vector<Mask> chosen;
  for (int i = 0; i < take; ++i) {
    const Cluster& cl = clusters[kept[i]];
    const CandidateMask* best = &cl.members.front();
    for (const auto& m : cl.members) {
      if (m.quality > best->quality ||
          (m.quality == best->quality &&
           std::pair(m.response_id, m.source_pred_index) <
               std::pair(best->response_id, best->source_pred_index))) {
        best = &m;
      }
    }
    Cluster sel = cl;
    // Surface the chosen member first for provenance readers.
    std::swap(sel.members.front(),
              sel.members[std::size_t(best - cl.members.data())]);
    out.selected_clusters.push_back(std::move(sel));
    chosen.push_back(best->mask);
  }
  if (chosen.empty()) throw EmptyInput("no clusters available for selection");
  out.mask = mask_union(chosen);
  return out;
}

}  // namespace rlvrseg
