#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "actlab/embedding.hpp"
#include "actlab/rewards.hpp"

namespace actlab {

// Each command body is pure: options in, documents on `out`, diagnostics on
// `err`, exceptions mapped to the exit-code taxonomy (0 ok, 1 IO, 2
// validation, 3 config) by the command itself. The binary in tools/ only
// parses flags into these structs.

struct ValidateLibOptions {
  std::string lib_path;
};

struct DetectOptions {
  std::string lib_path;
  std::string trace_path;
  std::optional<std::string> action;
  EmbedderConfig embed{};
};

struct ScoreOptions {
  std::string lib_path;
  std::string trace_path;
  std::string truth_label;
  std::optional<std::string> windows_path;  // {"phase": [start, end)} JSON
  SubRewardParams sub_params{};
  TotalRewardWeights weights{};
  EmbedderConfig embed{};
};

struct TrainOptions {
  std::string config_path;
  std::string lib_path;
  std::string out_dir;
};

struct EvalOptions {
  std::optional<std::string> checkpoint_path;  // exactly one of this ...
  bool brute_force_baseline = false;           // ... or this
  std::string lib_path;
  int episodes = 50;
  std::uint64_t seed = 0;
  double noise_drop = 0.0;
  double noise_distract = 0.0;
  int frames = 16;  // baseline only; checkpoints carry their own
  EmbedderConfig embed{};
  std::optional<std::string> records_path;  // per-episode records as JSONL
};

struct ReportOptions {
  std::string run_dir;
  std::optional<std::string> against_dir;
};

struct EpisodeOptions {
  std::string lib_path;
  std::uint64_t seed = 0;
  int frames = 16;
  double noise_drop = 0.0;
  double noise_distract = 0.0;
  bool emit_trace = false;  // print the oracle trace instead of the episode
};

int cmd_validate_lib(const ValidateLibOptions& opt, std::ostream& out,
                     std::ostream& err);
int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreOptions& opt, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err);
int cmd_episode(const EpisodeOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace actlab
