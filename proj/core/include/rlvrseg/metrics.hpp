#pragma once

#include <map>
#include <string>
#include <vector>

#include "rlvrseg/geometry.hpp"

namespace rlvrseg {

enum class ReasoningType { kPF, kCKI, kCR, kCMH, kNone };

const char* to_string(ReasoningType t);
ReasoningType reasoning_type_from_string(const std::string& s);

struct EvalSample {
  std::string sample_id;
  ReasoningType reasoning_type = ReasoningType::kNone;
  Mask gt_mask;
  Mask pred_mask;
  bool pred_is_no_target = false;
};

struct MetricPair {
  double giou = 0.0;
  double ciou = 0.0;
};

struct EvalReport {
  MetricPair overall;
  int overall_count = 0;
  // Keyed in Table-style order: PF, CKI, CR, CMH, then untyped.
  std::vector<std::pair<ReasoningType, MetricPair>> per_type;
  std::map<ReasoningType, int> type_counts;
};

// Per-sample IoU with the no-target convention: an empty GT scores 1
// against an explicit no-target prediction and 0 against anything else.
double sample_iou(const EvalSample& s);

double giou(const std::vector<EvalSample>& samples);
double ciou(const std::vector<EvalSample>& samples);

EvalReport report(const std::vector<EvalSample>& samples);

std::string report_table(const EvalReport& r);

}  // namespace rlvrseg
