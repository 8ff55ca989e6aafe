#include "rlvrseg/response.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rlvrseg {

namespace {

using nlohmann::json;

// Occurrences of a tag pair; returns inner spans.
std::vector<std::string> extract_blocks(const std::string& text,
                                        const std::string& open,
                                        const std::string& close) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t a = text.find(open, pos);
    if (a == std::string::npos) break;
    std::size_t b = text.find(close, a + open.size());
    if (b == std::string::npos) break;
    out.push_back(text.substr(a + open.size(), b - a - open.size()));
    pos = b + close.size();
  }
  return out;
}

ParsedResponse fail(ParseErrorKind kind, std::string detail) {
  ParsedResponse r;
  r.parse_ok = false;
  r.error_kind = kind;
  r.parse_error = std::string(to_string(kind)) + ": " + std::move(detail);
  return r;
}

int clamp_coord(int v, int lo, int hi, bool& clamped) {
  if (v < lo || v > hi) {
    clamped = true;
    return std::clamp(v, lo, hi);
  }
  return v;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?' || c == '\n') {
      std::string t = trim(cur);
      if (!t.empty()) out.push_back(std::move(t));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  std::string t = trim(cur);
  if (!t.empty()) out.push_back(std::move(t));
  return out;
}

}  // namespace

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMissingThink: return "MissingThink";
    case ParseErrorKind::kMissingAnswer: return "MissingAnswer";
    case ParseErrorKind::kBadJson: return "BadJson";
    case ParseErrorKind::kBadArity: return "BadArity";
    case ParseErrorKind::kOutOfBounds: return "OutOfBounds";
  }
  return "Unknown";
}

ParsedResponse parse_response(const std::string& text, ImageDims dims,
                              LabelOrder /*order*/) {
  auto thinks = extract_blocks(text, "<think>", "</think>");
  if (thinks.size() != 1) {
    return fail(ParseErrorKind::kMissingThink,
                thinks.empty() ? "no think block" : "multiple think blocks");
  }
  auto answers = extract_blocks(text, "<answer>", "</answer>");
  if (answers.size() != 1) {
    return fail(ParseErrorKind::kMissingAnswer,
                answers.empty() ? "no answer block" : "multiple answer blocks");
  }

  json arr = json::parse(answers[0], nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    return fail(ParseErrorKind::kBadJson, "answer is not a JSON array");
  }

  ParsedResponse r;
  r.think_text = thinks[0];
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("label") ||
        !item.contains("bbox_2d") || !item.contains("point_2d")) {
      return fail(ParseErrorKind::kBadArity,
                  "prediction object missing required keys");
    }
    const auto& jl = item["label"];
    const auto& jb = item["bbox_2d"];
    const auto& jp = item["point_2d"];
    if (!jl.is_string() || !jb.is_array() || jb.size() != 4 ||
        !jp.is_array() || jp.size() != 2) {
      return fail(ParseErrorKind::kBadArity, "wrong field arity");
    }
    for (const auto& v : jb)
      if (!v.is_number_integer()) {
        return fail(ParseErrorKind::kBadArity, "non-integer bbox coordinate");
      }
    for (const auto& v : jp)
      if (!v.is_number_integer()) {
        return fail(ParseErrorKind::kBadArity, "non-integer point coordinate");
      }

    int x1 = clamp_coord(jb[0].get<int>(), 0, dims.width, r.coords_clamped);
    int y1 = clamp_coord(jb[1].get<int>(), 0, dims.height, r.coords_clamped);
    int x2 = clamp_coord(jb[2].get<int>(), 0, dims.width, r.coords_clamped);
    int y2 = clamp_coord(jb[3].get<int>(), 0, dims.height, r.coords_clamped);
    if (x1 > x2 || y1 > y2) {
      return fail(ParseErrorKind::kOutOfBounds, "inverted bbox corners");
    }
    Prediction p;
    p.label = jl.get<std::string>();
    p.bbox = BBox(x1, y1, x2, y2);
    p.point.x = clamp_coord(jp[0].get<int>(), 0, dims.width - 1, r.coords_clamped);
    p.point.y = clamp_coord(jp[1].get<int>(), 0, dims.height - 1, r.coords_clamped);
    r.predictions.push_back(std::move(p));
  }
  r.parse_ok = true;
  r.is_empty_answer = r.predictions.empty();
  return r;
}

FormatRewards format_rewards(const std::string& text,
                             const ParsedResponse& parsed,
                             int repeat_threshold) {
  FormatRewards fr;
  fr.answer = parsed.parse_ok ? 1 : 0;

  auto thinks = extract_blocks(text, "<think>", "</think>");
  fr.thinking = (thinks.size() == 1 && !trim(thinks[0]).empty()) ? 1 : 0;

  fr.non_repeat = 1;
  if (thinks.size() == 1) {
    std::map<std::string, int> freq;
    for (const auto& s : split_sentences(thinks[0])) {
      if (++freq[s] >= repeat_threshold) {
        fr.non_repeat = 0;
        break;
      }
    }
  }
  return fr;
}

std::string serialize_response(const std::string& think,
                               const std::vector<Prediction>& preds,
                               LabelOrder order) {
  std::ostringstream os;
  os << "<think>" << think << "</think><answer>[";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Prediction& p = preds[i];
    if (i) os << ", ";
    std::string label = json(p.label).dump();
    std::string bbox = "\"bbox_2d\": [" + std::to_string(p.bbox.x1) + "," +
                       std::to_string(p.bbox.y1) + "," +
                       std::to_string(p.bbox.x2) + "," +
                       std::to_string(p.bbox.y2) + "]";
    std::string point = "\"point_2d\": [" + std::to_string(p.point.x) + "," +
                        std::to_string(p.point.y) + "]";
    if (order == LabelOrder::kLabelFirst) {
      os << "{\"label\": " << label << ", " << bbox << ", " << point << "}";
    } else {
      os << "{" << bbox << ", " << point << ", \"label\": " << label << "}";
    }
  }
  os << "]</answer>";
  return os.str();
}

}  // namespace rlvrseg
