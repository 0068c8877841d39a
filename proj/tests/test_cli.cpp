#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "actlab/rng.hpp"
#include "util.hpp"

using nlohmann::ordered_json;
using testutil::data_path;
using testutil::run_cli;

namespace {

const std::string kLib = data_path("sample_library.json");

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("validate-lib reports the library stats") {
  const auto r = run_cli("validate-lib --lib " + kLib);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.empty());
  const auto doc = ordered_json::parse(r.out);
  CHECK(doc["actions"] == 10);
  CHECK(doc["phases"] == 40);
  CHECK(doc["descriptions"] == 160);
}

TEST_CASE("exit codes separate IO, validation and usage errors") {
  const auto missing = run_cli("validate-lib --lib /nonexistent/lib.json");
  CHECK(missing.exit_code == 1);
  CHECK(starts_with(missing.err, "error: "));

  const std::string dir = testutil::scratch_dir("cli_bad");
  testutil::write_file(dir + "/broken.json", "{ not json");
  const auto malformed = run_cli("validate-lib --lib " + dir + "/broken.json");
  CHECK(malformed.exit_code == 2);
  CHECK(starts_with(malformed.err, "error: "));
  std::filesystem::remove_all(dir);

  CHECK(run_cli("validate-lib --nope x").exit_code == 3);
  CHECK(run_cli("frobnicate").exit_code == 3);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("detect and score agree with the episode generator") {
  const std::string dir = testutil::scratch_dir("cli_detect");

  const auto ep = run_cli("episode --lib " + kLib + " --seed 5");
  REQUIRE(ep.exit_code == 0);
  const auto doc = ordered_json::parse(ep.out);
  const std::string label = doc["label"].get<std::string>();
  REQUIRE(doc["phase_windows"].size() == 4u);
  testutil::write_file(dir + "/windows.json", doc["phase_windows"].dump());

  const auto tr = run_cli("episode --lib " + kLib + " --seed 5 --trace");
  REQUIRE(tr.exit_code == 0);
  testutil::write_file(dir + "/trace.txt", tr.out);

  const auto det =
      run_cli("detect --lib " + kLib + " --trace " + dir + "/trace.txt");
  REQUIRE(det.exit_code == 0);
  const auto dets = ordered_json::parse(det.out)["detections"];
  REQUIRE(dets.size() == 4u);
  for (size_t i = 0; i < dets.size(); ++i) {
    CHECK(dets[i]["action"] == label);
    CHECK(dets[i]["segment"] == static_cast<int>(i));
    CHECK(dets[i]["similarity"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));
  }

  // Filtering to the true action changes nothing; an unknown one is an error.
  const auto filtered = run_cli("detect --lib " + kLib + " --trace " + dir +
                                "/trace.txt --action " + label);
  CHECK(filtered.exit_code == 0);
  CHECK(filtered.out == det.out);
  const auto unknown = run_cli("detect --lib " + kLib + " --trace " + dir +
                               "/trace.txt --action nosuch");
  CHECK(unknown.exit_code == 2);
  CHECK(starts_with(unknown.err, "error: "));

  const auto sc = run_cli("score --lib " + kLib + " --trace " + dir +
                          "/trace.txt --truth " + label + " --windows " + dir +
                          "/windows.json");
  REQUIRE(sc.exit_code == 0);
  const auto score = ordered_json::parse(sc.out);
  CHECK(score["r_task"].get<double>() == 1.0);
  CHECK(score["r_sub"].get<double>() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(score["s_seq"].get<double>() == 1.0);
  CHECK(score["s_cross"].get<double>() == 1.0);
  CHECK(score["s_bind"].get<double>() == 1.0);
  CHECK(score["s_temporal"].get<double>() == 1.0);
  CHECK(score["r_format"].get<double>() == 1.0);
  CHECK(score["r_total"].get<double>() == doctest::Approx(1.54).epsilon(1e-12));
  CHECK(score["detections"].size() == 4u);

  std::filesystem::remove_all(dir);
}

TEST_CASE("score rejects malformed windows files") {
  const std::string dir = testutil::scratch_dir("cli_windows");
  testutil::write_file(dir + "/trace.txt", "answer: jump\n");

  auto expect = [&](const std::string& body, const std::string& needle) {
    testutil::write_file(dir + "/w.json", body);
    const auto r = run_cli("score --lib " + kLib + " --trace " + dir +
                           "/trace.txt --truth jump --windows " + dir + "/w.json");
    CAPTURE(body);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(needle) != std::string::npos);
  };
  expect("[]", "windows: top level must be an object");
  expect(R"({"p": [3]})", "'p' must be a [start, end] integer pair");
  expect(R"({"p": [3, "x"]})", "'p' must be a [start, end] integer pair");
  expect(R"({"p": [3, 3]})", "'p' must satisfy 0 <= start < end");
  expect(R"({"p": [-1, 3]})", "'p' must satisfy 0 <= start < end");

  std::filesystem::remove_all(dir);
}

TEST_CASE("train, eval and report round-trip through the artifacts") {
  const std::string dir = testutil::scratch_dir("cli_train");
  const std::string run = dir + "/run";

  const auto tr = run_cli("train --config " + data_path("smoke_config.json") +
                          " --lib " + kLib + " --out " + run);
  REQUIRE(tr.exit_code == 0);
  CHECK(starts_with(tr.out, "final noisy mean_r_total "));
  CHECK(tr.out.find(" accuracy ") != std::string::npos);
  CHECK(tr.out.find("; summary " + run + "/summary.json") != std::string::npos);
  for (const char* name : {"config.json", "metrics.jsonl", "summary.json",
                           "checkpoint_final.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(run + "/" + name));
  }

  // Policy evaluation from the written checkpoint.
  const auto ev = run_cli("eval --checkpoint " + run +
                          "/checkpoint_final.json --lib " + kLib +
                          " --episodes 4 --seed 99 --records " + dir +
                          "/records.jsonl");
  REQUIRE(ev.exit_code == 0);
  const auto summary = ordered_json::parse(ev.out);
  CHECK(summary["episodes"] == 4);
  const auto records = lines_of(testutil::read_file(dir + "/records.jsonl"));
  REQUIRE(records.size() == 4u);
  const std::vector<std::string> kRecordFields = {
      "seed", "label", "predicted", "r_task",
      "r_sub", "s_temporal", "r_format", "r_total"};
  for (size_t i = 0; i < records.size(); ++i) {
    const auto rec = ordered_json::parse(records[i]);
    size_t f = 0;
    for (auto it = rec.begin(); it != rec.end(); ++it, ++f) {
      REQUIRE(f < kRecordFields.size());
      CHECK(it.key() == kRecordFields[f]);
    }
    CHECK(f == kRecordFields.size());
    CHECK(rec["seed"].get<std::uint64_t>() == actlab::derive_seed(99, i));
  }

  // Stage summary table.
  const auto rp = run_cli("report --run " + run);
  REQUIRE(rp.exit_code == 0);
  const auto table = lines_of(rp.out);
  REQUIRE(table.size() == 4u);
  CHECK(table[0] ==
        "stage\titers\tmean_r_total\tmean_r_task\tmean_r_sub\tmean_s_temporal"
        "\tmean_r_format\tkl\tclip_fraction\tgrad_norm_preclip\tloss");
  CHECK(starts_with(table[1], "1\t5\t"));
  CHECK(starts_with(table[2], "2\t10\t"));
  CHECK(starts_with(table[3], "3\t5\t"));

  // Against itself every stage delta is zero.
  const auto self = run_cli("report --run " + run + " --against " + run);
  REQUIRE(self.exit_code == 0);
  const auto self_table = lines_of(self.out);
  REQUIRE(self_table.size() == 4u);
  CHECK(self_table[0].find("\tdelta_mean_r_total") != std::string::npos);
  for (size_t i = 1; i < self_table.size(); ++i) {
    const auto& row = self_table[i];
    CHECK(row.substr(row.rfind('\t')) == "\t0.0");
  }

  CHECK(run_cli("report --run /nonexistent").exit_code == 1);

  std::filesystem::remove_all(dir);
}

TEST_CASE("brute-force baseline is exact on clean episodes") {
  const auto r = run_cli("eval --brute-force --lib " + kLib +
                         " --episodes 6 --seed 3 --frames 8");
  REQUIRE(r.exit_code == 0);
  const auto doc = ordered_json::parse(r.out);
  CHECK(doc["episodes"] == 6);
  CHECK(doc["accuracy"].get<double>() == 1.0);
  CHECK(doc["mean_r_task"].get<double>() == 1.0);
  // Answer-only trace: full task reward plus vacuous temporal and format.
  CHECK(doc["mean_r_total"].get<double>() ==
        doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("eval demands exactly one mode") {
  const auto neither = run_cli("eval --lib " + kLib + " --episodes 2");
  CHECK(neither.exit_code == 3);
  CHECK(neither.err.find("exactly one of --checkpoint and --brute-force") !=
        std::string::npos);

  const auto both = run_cli("eval --checkpoint x --brute-force --lib " + kLib);
  CHECK(both.exit_code == 3);
}

TEST_CASE("episode output is deterministic in the seed") {
  const auto a = run_cli("episode --lib " + kLib + " --seed 12 --frames 8");
  const auto b = run_cli("episode --lib " + kLib + " --seed 12 --frames 8");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const auto doc = ordered_json::parse(a.out);
  CHECK(doc["seed"] == 12);
  CHECK(doc["frames"].size() == 8u);
  CHECK(doc["phase_windows"].size() == 4u);

  const auto c = run_cli("episode --lib " + kLib + " --seed 13 --frames 8");
  CHECK(c.out != a.out);
}
