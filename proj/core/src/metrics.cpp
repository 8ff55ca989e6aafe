#include "rlvrseg/metrics.hpp"

#include <iomanip>
#include <sstream>

namespace rlvrseg {

const char* to_string(ReasoningType t) {
  switch (t) {
    case ReasoningType::kPF: return "PF";
    case ReasoningType::kCKI: return "CKI";
    case ReasoningType::kCR: return "CR";
    case ReasoningType::kCMH: return "CMH";
    case ReasoningType::kNone: return "none";
  }
  return "none";
}

ReasoningType reasoning_type_from_string(const std::string& s) {
  if (s == "PF") return ReasoningType::kPF;
  if (s == "CKI") return ReasoningType::kCKI;
  if (s == "CR") return ReasoningType::kCR;
  if (s == "CMH") return ReasoningType::kCMH;
  if (s == "none" || s.empty()) return ReasoningType::kNone;
  throw InputError("unknown reasoning type: " + s);
}

namespace {

struct Areas {
  std::int64_t inter = 0;
  std::int64_t uni = 0;
};

Areas sample_areas(const EvalSample& s) {
  if (s.pred_is_no_target) {
    return {0, s.gt_mask.area()};
  }
  if (!(s.gt_mask.dims() == s.pred_mask.dims()))
    throw DimsMismatch("eval sample gt/pred dims differ");
  return {intersection_area(s.gt_mask, s.pred_mask),
          union_area(s.gt_mask, s.pred_mask)};
}

}  // namespace

double sample_iou(const EvalSample& s) {
  if (s.gt_mask.empty()) return s.pred_is_no_target ? 1.0 : 0.0;
  if (s.pred_is_no_target) return 0.0;
  return mask_iou(s.gt_mask, s.pred_mask);
}

double giou(const std::vector<EvalSample>& samples) {
  if (samples.empty()) throw EmptyInput("giou of empty sample list");
  double sum = 0.0;
  for (const auto& s : samples) sum += sample_iou(s);
  return sum / double(samples.size());
}

double ciou(const std::vector<EvalSample>& samples) {
  if (samples.empty()) throw EmptyInput("ciou of empty sample list");
  std::int64_t inter = 0, uni = 0;
  for (const auto& s : samples) {
    Areas a = sample_areas(s);
    inter += a.inter;
    uni += a.uni;
  }
  if (uni == 0) return 1.0;  // everything empty and correctly rejected
  return double(inter) / double(uni);
}

EvalReport report(const std::vector<EvalSample>& samples) {
  EvalReport r;
  r.overall_count = int(samples.size());
  if (!samples.empty()) {
    r.overall = {giou(samples), ciou(samples)};
  }
  const ReasoningType order[] = {ReasoningType::kPF, ReasoningType::kCKI,
                                 ReasoningType::kCR, ReasoningType::kCMH,
                                 ReasoningType::kNone};
  for (ReasoningType t : order) {
    std::vector<EvalSample> bucket;
    for (const auto& s : samples)
      if (s.reasoning_type == t) bucket.push_back(s);
    if (bucket.empty()) continue;
    r.per_type.emplace_back(t, MetricPair{giou(bucket), ciou(bucket)});
    r.type_counts[t] = int(bucket.size());
  }
  return r;
}

std::string report_table(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(10) << "type" << std::right << std::setw(8)
     << "count" << std::setw(10) << "gIoU" << std::setw(10) << "cIoU" << "\n";
  os << std::left << std::setw(10) << "overall" << std::right << std::setw(8)
     << r.overall_count << std::setw(10) << r.overall.giou << std::setw(10)
     << r.overall.ciou << "\n";
  for (const auto& [t, m] : r.per_type) {
    os << std::left << std::setw(10) << to_string(t) << std::right
       << std::setw(8) << r.type_counts.at(t) << std::setw(10) << m.giou
       << std::setw(10) << m.ciou << "\n";
  }
  os << "note: empty-GT samples score IoU 1 for an explicit no-target "
        "prediction, 0 otherwise\n";
  return os.str();
}

}  // namespace rlvrseg
