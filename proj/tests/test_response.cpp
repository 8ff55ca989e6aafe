#include <doctest.h>

#include "rlvrseg/response.hpp"
#include "rlvrseg/sim.hpp"

using namespace rlvrseg;

namespace {

const ImageDims kDims(1000, 1000);

std::vector<Prediction> random_preds(Rng& rng, int max_count) {
  std::vector<Prediction> preds;
  int n = rng.uniform_int(0, max_count);
  for (int i = 0; i < n; ++i) {
    Prediction p;
    const char* words[] = {"chair", "train track", "the largest dog",
                           "a \"quoted\" thing", ""};
    p.label = words[rng.uniform_int(0, 4)];
    int x1 = rng.uniform_int(0, 900), y1 = rng.uniform_int(0, 900);
    p.bbox = BBox(x1, y1, rng.uniform_int(x1, 999), rng.uniform_int(y1, 999));
    p.point = {rng.uniform_int(p.bbox.x1, std::max(p.bbox.x1, p.bbox.x2 - 1)),
               rng.uniform_int(p.bbox.y1, std::max(p.bbox.y1, p.bbox.y2 - 1))};
    preds.push_back(std::move(p));
  }
  return preds;
}

}  // namespace

TEST_CASE("parse canonical single-prediction answer") {
  std::string text =
      "<think>t</think><answer>[{\"label\": \"chair\", \"bbox_2d\": "
      "[10,100,200,210], \"point_2d\": [30,110]}]</answer>";
  ParsedResponse r = parse_response(text, kDims);
  REQUIRE(r.parse_ok);
  REQUIRE(r.predictions.size() == 1);
  CHECK(r.predictions[0].label == "chair");
  CHECK(r.predictions[0].bbox == BBox(10, 100, 200, 210));
  CHECK(r.predictions[0].point == Point{30, 110});
  CHECK_FALSE(r.is_empty_answer);
  CHECK_FALSE(r.coords_clamped);
}

TEST_CASE("parse empty answer") {
  ParsedResponse r = parse_response("<think>t</think><answer>[]</answer>", kDims);
  CHECK(r.parse_ok);
  CHECK(r.is_empty_answer);
  CHECK(r.predictions.empty());
}

TEST_CASE("parse diagnostics") {
  auto kind = [](const std::string& text) {
    return parse_response(text, kDims).error_kind;
  };
  CHECK(kind("<answer>[]</answer>") == ParseErrorKind::kMissingThink);
  CHECK(kind("<think>a</think><think>b</think><answer>[]</answer>") ==
        ParseErrorKind::kMissingThink);
  CHECK(kind("<think>t</think>") == ParseErrorKind::kMissingAnswer);
  CHECK(kind("<think>t</think><answer>{not json</answer>") ==
        ParseErrorKind::kBadJson);
  CHECK(kind("<think>t</think><answer>{\"label\": \"x\"}</answer>") ==
        ParseErrorKind::kBadJson);
  CHECK(kind("<think>t</think><answer>[{\"label\": \"x\", \"bbox_2d\": "
             "[1,2,3], \"point_2d\": [1,2]}]</answer>") ==
        ParseErrorKind::kBadArity);
  CHECK(kind("<think>t</think><answer>[{\"label\": \"x\", \"bbox_2d\": "
             "[9,2,3,4], \"point_2d\": [1,2]}]</answer>") ==
        ParseErrorKind::kOutOfBounds);

  ParsedResponse bad = parse_response("<think>t</think>", kDims);
  CHECK_FALSE(bad.parse_ok);
  CHECK(bad.predictions.empty());
  CHECK_FALSE(bad.parse_error.empty());
}

TEST_CASE("out-of-range coordinates are clamped, not rejected") {
  std::string text =
      "<think>t</think><answer>[{\"label\": \"x\", \"bbox_2d\": "
      "[-5,0,1200,900], \"point_2d\": [1500,-3]}]</answer>";
  ParsedResponse r = parse_response(text, kDims);
  REQUIRE(r.parse_ok);
  CHECK(r.coords_clamped);
  CHECK(r.predictions[0].bbox == BBox(0, 0, 1000, 900));
  CHECK(r.predictions[0].point == Point{999, 0});
}

TEST_CASE("parsing accepts either key order") {
  std::string text =
      "<think>t</think><answer>[{\"bbox_2d\": [1,2,3,4], \"point_2d\": "
      "[1,2], \"label\": \"x\"}]</answer>";
  CHECK(parse_response(text, kDims, LabelOrder::kLabelFirst).parse_ok);
  CHECK(parse_response(text, kDims, LabelOrder::kLabelLast).parse_ok);
}

TEST_CASE("format rewards") {
  std::string good =
      "<think>First look. Then decide.</think><answer>[]</answer>";
  ParsedResponse pg = parse_response(good, kDims);
  FormatRewards fg = format_rewards(good, pg);
  CHECK(fg.thinking == 1);
  CHECK(fg.answer == 1);
  CHECK(fg.non_repeat == 1);

  std::string no_answer = "<think>hm</think>";
  FormatRewards fa = format_rewards(no_answer, parse_response(no_answer, kDims));
  CHECK(fa.answer == 0);
  CHECK(fa.thinking == 1);

  std::string repeat =
      "<think>Same thing. Same thing. Same thing. Same thing. Same "
      "thing.</think><answer>[]</answer>";
  FormatRewards fr = format_rewards(repeat, parse_response(repeat, kDims));
  CHECK(fr.non_repeat == 0);
  CHECK(fr.answer == 1);

  // threshold is configurable
  std::string twice = "<think>Same. Same.</think><answer>[]</answer>";
  CHECK(format_rewards(twice, parse_response(twice, kDims)).non_repeat == 1);
  CHECK(format_rewards(twice, parse_response(twice, kDims), 2).non_repeat == 0);

  std::string empty_think = "<think>  </think><answer>[]</answer>";
  CHECK(format_rewards(empty_think, parse_response(empty_think, kDims))
            .thinking == 0);
}

TEST_CASE("serialization canonical form") {
  Prediction p;
  p.label = "chair";
  p.bbox = BBox(10, 100, 200, 210);
  p.point = {30, 110};
  CHECK(serialize_response("t", {p}) ==
        "<think>t</think><answer>[{\"label\": \"chair\", \"bbox_2d\": "
        "[10,100,200,210], \"point_2d\": [30,110]}]</answer>");
  CHECK(serialize_response("t", {}) == "<think>t</think><answer>[]</answer>");
  CHECK(serialize_response("t", {p}, LabelOrder::kLabelLast) ==
        "<think>t</think><answer>[{\"bbox_2d\": [10,100,200,210], "
        "\"point_2d\": [30,110], \"label\": \"chair\"}]</answer>");
}

TEST_CASE("serialize/parse round trip, both orders") {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    std::vector<Prediction> preds = random_preds(rng, 5);
    LabelOrder order =
        rng.bernoulli(0.5) ? LabelOrder::kLabelFirst : LabelOrder::kLabelLast;
    std::string text = serialize_response("step by step", preds, order);
    ParsedResponse r = parse_response(text, kDims, order);
    REQUIRE(r.parse_ok);
    CHECK(r.think_text == "step by step");
    CHECK(r.predictions == preds);
    CHECK(r.is_empty_answer == preds.empty());
  }
}
