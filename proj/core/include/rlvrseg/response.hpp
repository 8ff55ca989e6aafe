#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlvrseg/geometry.hpp"

namespace rlvrseg {

// Serialization key order of the answer JSON objects. Parsing accepts either.
enum class LabelOrder { kLabelFirst, kLabelLast };

struct Prediction {
  std::string label;
  BBox bbox;
  Point point;

  bool operator==(const Prediction&) const = default;
};

enum class ParseErrorKind {
  kMissingThink,
  kMissingAnswer,
  kBadJson,
  kBadArity,
  kOutOfBounds,
};

const char* to_string(ParseErrorKind kind);

struct ParsedResponse {
  std::string think_text;
  std::vector<Prediction> predictions;
  bool is_empty_answer = false;
  bool parse_ok = false;
  bool coords_clamped = false;
  std::optional<ParseErrorKind> error_kind;
  std::string parse_error;
};

struct FormatRewards {
  int thinking = 0;
  int answer = 0;
  int non_repeat = 0;
};

ParsedResponse parse_response(const std::string& text, ImageDims dims,
                              LabelOrder order = LabelOrder::kLabelFirst);

// Sentence-level duplicate detection; a think sentence repeated
// `repeat_threshold` or more times forfeits the non-repeat reward.
FormatRewards format_rewards(const std::string& text,
                             const ParsedResponse& parsed,
                             int repeat_threshold = 3);

std::string serialize_response(const std::string& think,
                               const std::vector<Prediction>& preds,
                               LabelOrder order = LabelOrder::kLabelFirst);

}  // namespace rlvrseg
