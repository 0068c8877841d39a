#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "actlab/embedding.hpp"
#include "actlab/rewards.hpp"

namespace actlab {

struct StageConfig {
  int iterations = 0;
  double learning_rate = 0.0;
  friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

struct NoiseConfig {
  double drop = 0.0;
  double distract = 0.0;
  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

struct AblationConfig {
  bool disable_sub_reward = false;
  bool disable_temporal_reward = false;
  bool disable_format_reward = false;
  bool skip_stage1 = false;
  bool skip_stage2 = false;
  friend bool operator==(const AblationConfig&, const AblationConfig&) = default;
};

// Every field has a default; config files may set any subset. Parsing is
// strict: an unknown key anywhere is a ConfigError naming the key.
struct TrainConfig {
  std::uint64_t seed = 0;
  int frames = 16;
  int batch_size = 8;
  EmbedderConfig embed{};
  NoiseConfig noise{};
  StageConfig stage1{300, 0.1};
  StageConfig stage2{900, 0.5};
  StageConfig stage3{300, 0.05};
  double clip_eps = 0.2;
  double kl_coef = 0.04;
  int group_size = 4;
  double max_grad_norm = 5.0;
  SubRewardParams sub_rewards{};
  TotalRewardWeights weights{};
  AblationConfig ablation{};
  int eval_episodes = 50;

  static TrainConfig parse(std::string_view text);
  static TrainConfig load_file(const std::string& path);
  // Canonical form: every key present, fixed order, two-space indent,
  // trailing newline. parse(serialize()) round-trips exactly.
  std::string serialize() const;
  void validate() const;  // throws ConfigError

  bool stage1_enabled() const { return stage1.iterations > 0 && !ablation.skip_stage1; }
  bool stage2_enabled() const { return stage2.iterations > 0 && !ablation.skip_stage2; }
  bool stage3_enabled() const { return stage3.iterations > 0; }
  // Reward weights actually optimized: ablation flags zero single terms.
  TotalRewardWeights training_weights() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace actlab
