#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "actlab/config.hpp"
#include "actlab/detection.hpp"
#include "actlab/environment.hpp"
#include "actlab/policy.hpp"
#include "actlab/rewards.hpp"
#include "actlab/rng.hpp"
#include "actlab/scoring.hpp"

namespace actlab {

// Group-relative advantages: (r - mean) / (popstd + 1e-8). A group whose
// rewards are all equal yields exact zeros, not noise amplified off the
// epsilon. Needs at least two completions.
std::vector<double> compute_advantages(const std::vector<double>& rewards);

// min(ratio*adv, clamp(ratio, 1-eps, 1+eps)*adv).
double ppo_clip_objective(double ratio, double advantage, double clip_eps);

struct StepSettings {
  double clip_eps = 0.2;
  double kl_coef = 0.04;
  int group_size = 4;
  double max_grad_norm = 5.0;
  double learning_rate = 0.05;
  SubRewardParams sub_params{};
  TotalRewardWeights reward_weights{};
};

struct Prompt {
  Observation obs;
  GroundTruthAnnotation truth;
};

// One metrics row per optimization step; mean_* average over every completion
// in the step.
struct StepMetrics {
  double mean_r_total = 0.0;
  double mean_r_task = 0.0;
  double mean_r_sub = 0.0;
  double mean_s_temporal = 0.0;
  double mean_r_format = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm_preclip = 0.0;
  double loss = 0.0;
};

struct CompletionDebug {
  TraceChoice choice;  // logps = behaviour log-probs at sampling time
  double reward = 0.0;
  double advantage = 0.0;
};

// Everything needed to replay the step's arithmetic from outside.
struct StepDebug {
  PolicyParams params_before;
  std::vector<std::vector<CompletionDebug>> groups;  // [prompt][completion]
  double surrogate_loss = 0.0;
  double kl_term = 0.0;
  double max_ratio_dev = 0.0;  // max |ratio - 1| seen while re-scoring
  double grad_norm_postclip = 0.0;
};

// One T-GRPO update: per prompt sample group_size completions, score them as
// full traces, normalize rewards within the group, then apply a single
// full-batch clipped-surrogate step with a KL penalty toward ref. Because the
// update happens once per batch of rollouts, importance ratios are exactly 1
// and nothing clips; the clip machinery matters when steps are replayed
// against stale behaviour log-probs.
StepMetrics tgrpo_step(PolicyParams& params, const PolicyParams& ref,
                       const ActionSpace& space, const Detector& detector,
                       const std::vector<Prompt>& prompts,
                       const StepSettings& settings, Rng& rng,
                       StepDebug* debug = nullptr);

struct SupervisedExample {
  Observation obs;
  TraceChoice target;
};

// Cross-entropy on the reference decisions: loss = -mean total logprob, plain
// SGD, no clipping. Returns the loss; grad_norm receives the global gradient
// norm when given.
double supervised_step(PolicyParams& params,
                       const std::vector<SupervisedExample>& batch,
                       double learning_rate, double* grad_norm = nullptr);

// The reference decisions for an episode: slot m takes the m-th phase of the
// truth action with the grid window of best IoU against its truth window
// (lowest index on ties); surplus slots take SKIP; answer = truth label.
TraceChoice oracle_choice(const Episode& episode, const ActionSpace& space,
                          const PolicyShape& shape,
                          const std::vector<FrameWindow>& grid,
                          const SubActionLibrary& lib);

struct EvalSummary {
  int episodes = 0;
  double accuracy = 0.0;  // mean r_task
  double mean_r_total = 0.0;
  double mean_r_task = 0.0;
  double mean_r_sub = 0.0;
  double mean_s_temporal = 0.0;
  double mean_r_format = 0.0;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::string label;
  std::string predicted;
  RewardBreakdown breakdown;
};

// Greedy decoding over a fixed episode set: episode i uses seed
// derive_seed(seed_base, i) with base_spec's frames and noise. Always scores
// with the weights it is given (evaluation never applies training ablations).
EvalSummary evaluate_policy(const PolicyParams& params, const ActionSpace& space,
                            const Detector& detector,
                            const EpisodeSpec& base_spec, int episodes,
                            std::uint64_t seed_base,
                            const SubRewardParams& sub_params,
                            const TotalRewardWeights& weights,
                            std::vector<EpisodeRecord>* records = nullptr);

struct RunArtifacts {
  std::string run_dir;
  std::string config_path;
  std::string metrics_path;
  std::string summary_path;
  std::string final_checkpoint;
  std::map<int, std::string> stage_checkpoints;
  EvalSummary final_noisy;
  EvalSummary final_clean;
};

// Full curriculum: stage 1 supervised on zeroed observations, stage 2
// supervised on real ones, stage 3 T-GRPO against a reference frozen at the
// stage boundary. Writes config.json, metrics.jsonl (one row per iteration),
// per-stage and final checkpoints and summary.json under out_dir. Every
// random draw derives from config.seed, so a rerun reproduces the artifacts
// byte for byte.
RunArtifacts train(const TrainConfig& config, const SubActionLibrary& lib,
                   const std::string& out_dir);

}  // namespace actlab
