#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "actlab/detection.hpp"
#include "actlab/embedding.hpp"
#include "actlab/errors.hpp"
#include "actlab/subaction.hpp"
#include "actlab/trace.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace actlab;

namespace {

SubActionLibrary bundled() {
  return SubActionLibrary::load_file(testutil::data_path("sample_library.json"));
}

StructuredTrace trace_of_lines(const std::vector<std::string>& lines) {
  StructuredTrace t;
  t.format_ok = true;
  for (const auto& line : lines) {
    TraceStep step;
    step.index = static_cast<int>(t.steps.size());
    step.text = line;
    t.steps.push_back(std::move(step));
  }
  return t;
}

// Reference detector: dense similarity per (phase, segment), earliest
// qualifying segment wins, entries in library order. detect() must agree
// bit for bit; its sparse dot products are required to change nothing.
DetectionResult brute_detect(const StructuredTrace& trace,
                             const SubActionLibrary& lib,
                             const std::optional<std::string>& filter,
                             const EmbedderConfig& cfg) {
  DetectionResult result;
  const auto segs = segments(trace);
  for (const auto& action : lib.actions()) {
    if (filter && action.name != *filter) continue;
    for (const auto& phase : action.phases) {
      for (const auto& [index, text] : segs) {
        const double sim = similarity_to_phase(text, phase, cfg);
        if (sim >= phase.threshold) {
          result.detections.push_back({action.name, phase.id, index, sim});
          break;
        }
      }
    }
  }
  return result;
}

}  // namespace

TEST_CASE("similarity_to_phase is the max over description variants") {
  SubActionPhase phase;
  phase.id = "p";
  phase.descriptions = {"alpha beta", "gamma delta"};
  const EmbedderConfig cfg{384, 0};
  const std::string text = "gamma delta";
  const double direct =
      std::max(cosine(embed(text, cfg), embed("alpha beta", cfg)),
               cosine(embed(text, cfg), embed("gamma delta", cfg)));
  CHECK(similarity_to_phase(text, phase, cfg) == direct);
  CHECK(similarity_to_phase(text, phase, cfg) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // No tokens on either side: cosine convention gives 0.
  CHECK(similarity_to_phase("???", phase, cfg) == 0.0);
}

TEST_CASE("exact phase text detects itself and nothing else") {
  const auto lib = bundled();
  const Detector detector(lib);
  for (const auto& action : lib.actions()) {
    std::vector<std::string> lines;
    for (const auto& phase : action.phases) {
      lines.push_back("@subject " + phase.descriptions[0]);
    }
    const auto result = detector.detect(trace_of_lines(lines));
    REQUIRE(result.detections.size() == action.phases.size());
    for (size_t i = 0; i < action.phases.size(); ++i) {
      const Detection& det = result.detections[i];
      CHECK(det.action == action.name);
      CHECK(det.phase_id == action.phases[i].id);
      CHECK(det.segment_index == static_cast<int>(i));
      CHECK(det.similarity == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("earliest qualifying segment wins even when a later one is closer") {
  std::vector<ActionDecomposition> actions(1);
  actions[0].name = "probe";
  actions[0].phases.push_back({"p", 0, {"alpha beta"}, 0.45});
  const auto lib = SubActionLibrary::from_actions(1, actions);
  const Detector detector(lib);
  // Step 0 overlaps by one token (cosine 0.5), step 1 matches exactly.
  const auto result =
      detector.detect(trace_of_lines({"alpha gamma", "alpha beta"}));
  REQUIRE(result.detections.size() == 1u);
  CHECK(result.detections[0].segment_index == 0);
  CHECK(result.detections[0].similarity == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("detections follow library order, not trace order") {
  const auto lib = bundled();
  const auto& action = lib.actions()[0];
  std::vector<std::string> lines;
  for (auto it = action.phases.rbegin(); it != action.phases.rend(); ++it) {
    lines.push_back(it->descriptions[0]);
  }
  const auto result = Detector(lib).detect(trace_of_lines(lines));
  REQUIRE(result.detections.size() == action.phases.size());
  const int n = static_cast<int>(action.phases.size());
  for (int i = 0; i < n; ++i) {
    CHECK(result.detections[i].phase_id == action.phases[i].id);
    CHECK(result.detections[i].segment_index == n - 1 - i);
  }
}

TEST_CASE("action filter restricts detection and rejects unknown names") {
  const auto lib = bundled();
  const Detector detector(lib);
  const auto trace = trace_of_lines(
      {lib.actions()[0].phases[0].descriptions[0],
       lib.actions()[1].phases[0].descriptions[0]});
  const auto all = detector.detect(trace);
  CHECK(all.detections.size() == 2u);
  const auto only = detector.detect(trace, lib.actions()[0].name);
  REQUIRE(only.detections.size() == 1u);
  CHECK(only.detections[0].action == lib.actions()[0].name);
  CHECK_THROWS_AS(detector.detect(trace, std::string("nope")),
                  UnknownActionError);
}

TEST_CASE("DetectionResult::find") {
  DetectionResult r;
  r.detections.push_back({"jump", "crouch", 1, 0.9});
  CHECK(r.find("jump", "crouch") != nullptr);
  CHECK(r.find("jump", "crouch")->segment_index == 1);
  CHECK(r.find("jump", "flight") == nullptr);
  CHECK(r.find("run", "crouch") == nullptr);
}

TEST_CASE("detector agrees bit for bit with the dense reference") {
  const auto lib = bundled();
  std::mt19937_64 gen(99);
  std::vector<std::string> all_descriptions;
  for (const auto& action : lib.actions()) {
    for (const auto& phase : action.phases) {
      for (const auto& d : phase.descriptions) all_descriptions.push_back(d);
    }
  }
  for (const EmbedderConfig cfg : {EmbedderConfig{384, 0},
                                   EmbedderConfig{384, 1469598103934665603ULL},
                                   EmbedderConfig{48, 0}}) {
    const Detector detector(lib, cfg);
    for (int i = 0; i < 30; ++i) {
      // Noisy segments: real descriptions mixed with random words.
      std::vector<std::string> lines;
      const int n_lines = 1 + static_cast<int>(gen() % 6);
      for (int s = 0; s < n_lines; ++s) {
        std::string line = all_descriptions[gen() % all_descriptions.size()];
        if (gen() % 2) line += " " + oracle::rand_phrase(gen, 1, 3);
        if (gen() % 3 == 0) line = "@subject " + line;
        lines.push_back(line);
      }
      const auto trace = trace_of_lines(lines);
      std::optional<std::string> filter;
      if (gen() % 4 == 0) {
        filter = lib.actions()[gen() % lib.actions().size()].name;
      }
      const auto fast = detector.detect(trace, filter);
      const auto slow = brute_detect(trace, lib, filter, cfg);
      REQUIRE(fast.detections.size() == slow.detections.size());
      for (size_t k = 0; k < fast.detections.size(); ++k) {
        CHECK(fast.detections[k] == slow.detections[k]);
      }
    }
  }
}

TEST_CASE("cross-phase description similarity stays under the threshold") {
  // The margin that makes exact-description traces precise: no description
  // of one phase reaches 0.75 against any other phase's descriptions. The
  // worst pair is a genuine single-token hash collision at 1/sqrt(2), so the
  // margin is thin but real under both bundled hash seeds.
  const auto lib = bundled();
  struct Tagged {
    int phase_key;
    EmbeddingVector vec;
  };
  for (const std::uint64_t seed : {0ULL, 1469598103934665603ULL}) {
    const EmbedderConfig cfg{384, seed};
    std::vector<Tagged> embedded;
    int key = 0;
    for (const auto& action : lib.actions()) {
      for (const auto& phase : action.phases) {
        for (const auto& d : phase.descriptions) {
          embedded.push_back({key, embed(d, cfg)});
        }
        ++key;
      }
    }
    double worst = -1.0;
    for (size_t i = 0; i < embedded.size(); ++i) {
      for (size_t j = i + 1; j < embedded.size(); ++j) {
        if (embedded[i].phase_key == embedded[j].phase_key) continue;
        worst = std::max(worst, cosine(embedded[i].vec, embedded[j].vec));
      }
    }
    CHECK(worst < 0.75);
    CHECK(worst == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("one-shot detect wrapper matches the detector") {
  const auto lib = bundled();
  const auto trace =
      trace_of_lines({lib.actions()[2].phases[1].descriptions[2]});
  const auto a = detect(trace, lib);
  const auto b = Detector(lib).detect(trace);
  REQUIRE(a.detections.size() == b.detections.size());
  for (size_t i = 0; i < a.detections.size(); ++i) {
    CHECK(a.detections[i] == b.detections[i]);
  }
}
