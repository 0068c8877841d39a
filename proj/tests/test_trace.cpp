#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "actlab/trace.hpp"
#include "oracles.hpp"

using namespace actlab;

TEST_CASE("well-formed trace parses fully") {
  const std::string raw =
      "<think>\n"
      "[frames 0-3] @athlete knees bend low\n"
      "\n"
      "[frames 4-7] legs push upward\n"
      "free-floating note\n"
      "</think>\n"
      "<answer>jump</answer>\n";
  const StructuredTrace t = parse_trace(raw);
  CHECK(t.format_ok);
  REQUIRE(t.steps.size() == 3u);
  CHECK(t.steps[0].index == 0);
  CHECK(t.steps[0].frame_window == FrameWindow{0, 4});  // inclusive 0-3
  CHECK(t.steps[0].text == "@athlete knees bend low");
  CHECK(t.steps[0].entities == std::vector<std::string>{"athlete"});
  CHECK(t.steps[1].frame_window == FrameWindow{4, 8});
  CHECK(t.steps[2].index == 2);
  CHECK(!t.steps[2].frame_window.has_value());
  CHECK(t.answer == "jump");
}

TEST_CASE("format_ok demands exactly one ordered think/answer pair") {
  CHECK(parse_trace("<think>\nx\n</think>\n<answer>a</answer>").format_ok);
  CHECK_FALSE(parse_trace("<think>x</think>").format_ok);
  CHECK_FALSE(parse_trace("<answer>a</answer>").format_ok);
  CHECK_FALSE(parse_trace("<answer>a</answer><think>x</think>").format_ok);
  CHECK_FALSE(
      parse_trace("<think>x</think><think>y</think><answer>a</answer>")
          .format_ok);
  CHECK_FALSE(
      parse_trace("<think>x</think><answer>a</answer><answer>b</answer>")
          .format_ok);
  CHECK_FALSE(parse_trace("").format_ok);
  // Malformed input still yields best-effort steps.
  const StructuredTrace t = parse_trace("<think>\nstep one\n</think>");
  CHECK_FALSE(t.format_ok);
  REQUIRE(t.steps.size() == 1u);
  CHECK(t.steps[0].text == "step one");
  CHECK(!t.answer.has_value());
}

TEST_CASE("frame markers are strict") {
  const auto step_of = [](const std::string& line) {
    const StructuredTrace t =
        parse_trace("<think>\n" + line + "\n</think>\n<answer>x</answer>");
    REQUIRE(t.steps.size() == 1u);
    return t.steps[0];
  };

  SUBCASE("inclusive bounds become a half-open window") {
    const TraceStep s = step_of("[frames 2-5] lift off");
    CHECK(s.frame_window == FrameWindow{2, 6});
    CHECK(s.text == "lift off");
  }
  SUBCASE("single frame") {
    CHECK(step_of("[frames 7-7] apex").frame_window == FrameWindow{7, 8});
  }
  SUBCASE("inverted marker is stripped without a window") {
    const TraceStep s = step_of("[frames 9-2] rewound");
    CHECK(!s.frame_window.has_value());
    CHECK(s.text == "rewound");
  }
  SUBCASE("marker-only line keeps an empty text") {
    CHECK(step_of("[frames 1-2]").text == "");
  }
  SUBCASE("ten-digit numbers are not markers") {
    const TraceStep s = step_of("[frames 1234567890-2] big");
    CHECK(!s.frame_window.has_value());
    CHECK(s.text == "[frames 1234567890-2] big");
  }
  SUBCASE("glued suffix is not a marker") {
    const TraceStep s = step_of("[frames 1-2]x tail");
    CHECK(!s.frame_window.has_value());
    CHECK(s.text == "[frames 1-2]x tail");
  }
  SUBCASE("missing dash is not a marker") {
    CHECK(!step_of("[frames 12] x").frame_window.has_value());
  }
  SUBCASE("marker must be leading") {
    const TraceStep s = step_of("before [frames 1-2] after");
    CHECK(!s.frame_window.has_value());
    CHECK(s.text == "before [frames 1-2] after");
  }
}

TEST_CASE("entities are lowercased, deduplicated, first-mention order") {
  const StructuredTrace t = parse_trace(
      "<think>\n@Runner passes @coach then @RUNNER waves; @ alone\n</think>\n"
      "<answer>run</answer>");
  REQUIRE(t.steps.size() == 1u);
  CHECK(t.steps[0].entities == std::vector<std::string>{"runner", "coach"});
  // A bare "@" is too short to be an entity but text is untouched.
  CHECK(t.steps[0].text == "@Runner passes @coach then @RUNNER waves; @ alone");
}

TEST_CASE("segment_text strips entity tokens and collapses whitespace") {
  TraceStep step;
  step.text = "@athlete  knees\tbend   low @floor";
  CHECK(segment_text(step) == "knees bend low");
  step.text = "@only @entities";
  CHECK(segment_text(step) == "");
  step.text = "plain words";
  CHECK(segment_text(step) == "plain words");
}

TEST_CASE("segments pairs step indices with cleaned text") {
  const StructuredTrace t = parse_trace(
      "<think>\n@a one\ntwo three\n</think>\n<answer>x</answer>");
  const auto segs = segments(t);
  REQUIRE(segs.size() == 2u);
  CHECK(segs[0] == std::pair<int, std::string>{0, "one"});
  CHECK(segs[1] == std::pair<int, std::string>{1, "two three"});
}

TEST_CASE("answer content is trimmed; empty answers become nullopt") {
  CHECK(parse_trace("<think>\nx\n</think>\n<answer>  jump \n</answer>").answer ==
        "jump");
  CHECK(!parse_trace("<think>\nx\n</think>\n<answer>   </answer>").answer
             .has_value());
  CHECK(!parse_trace("<think>\nx\n</think>\n<answer></answer>").answer
             .has_value());
}

TEST_CASE("emit_trace canonical form") {
  StructuredTrace t;
  t.format_ok = true;
  t.steps.push_back({0, "@athlete knees bend", FrameWindow{0, 4}, {"athlete"}});
  t.steps.push_back({1, "drift", std::nullopt, {}});
  t.answer = "jump";
  CHECK(emit_trace(t) ==
        "<think>\n"
        "[frames 0-3] @athlete knees bend\n"
        "drift\n"
        "</think>\n<answer>jump</answer>\n");
}

TEST_CASE("emit then parse is the identity on canonical traces") {
  std::mt19937_64 gen(2718);
  for (int i = 0; i < 200; ++i) {
    const StructuredTrace t = oracle::random_canonical_trace(gen);
    const std::string raw = emit_trace(t);
    const StructuredTrace back = parse_trace(raw);
    CHECK(back == t);
    CHECK(emit_trace(back) == raw);
  }
}
