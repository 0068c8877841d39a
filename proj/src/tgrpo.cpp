#include "actlab/tgrpo.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "actlab/errors.hpp"
#include "actlab/temporal.hpp"

namespace actlab {

namespace {

using nlohmann::ordered_json;

// Seed-derivation tags; every stream a run draws from is keyed off
// (config.seed, tag, ...), so streams never alias across stages.
constexpr std::uint64_t kTagStage1 = 1;
constexpr std::uint64_t kTagStage2 = 2;
constexpr std::uint64_t kTagStage3 = 3;
constexpr std::uint64_t kTagRollout = 4;
constexpr std::uint64_t kTagEvalNoisy = 5;
constexpr std::uint64_t kTagEvalClean = 6;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing: " + path);
}

}  // namespace

std::vector<double> compute_advantages(const std::vector<double>& rewards) {
  if (rewards.size() < 2) {
    throw TooFewCompletionsError(
        "compute_advantages: need at least two completions, got " +
        std::to_string(rewards.size()));
  }
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) return std::vector<double>(rewards.size(), 0.0);
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rewards.size());
  const double denom = std::sqrt(var) + 1e-8;
  std::vector<double> adv(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / denom;
  return adv;
}

double ppo_clip_objective(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

StepMetrics tgrpo_step(PolicyParams& params, const PolicyParams& ref,
                       const ActionSpace& space, const Detector& detector,
                       const std::vector<Prompt>& prompts,
                       const StepSettings& settings, Rng& rng,
                       StepDebug* debug) {
  if (prompts.empty()) throw InvariantViolationError("tgrpo_step: no prompts");
  if (!(params.shape == ref.shape)) {
    throw DimensionMismatchError("tgrpo_step: reference policy shape differs");
  }
  const int group = settings.group_size;
  if (group < 2) {
    throw TooFewCompletionsError("tgrpo_step: group_size must be at least 2");
  }

  if (debug) {
    debug->params_before = params;
    debug->groups.clear();
    debug->max_ratio_dev = 0.0;
  }

  const size_t n_prompts = prompts.size();
  const size_t decisions = 2 * static_cast<size_t>(params.shape.slots) + 1;
  const double n_dec =
      static_cast<double>(n_prompts) * group * static_cast<double>(decisions);

  // Rollouts, in a fixed prompt-major order so rng consumption is canonical.
  std::vector<std::vector<TraceChoice>> choices(n_prompts);
  std::vector<std::vector<double>> rewards(n_prompts);
  StepMetrics metrics;
  for (size_t p = 0; p < n_prompts; ++p) {
    const auto grid = window_grid(prompts[p].obs.frames, params.shape.windows);
    choices[p].reserve(group);
    rewards[p].reserve(group);
    for (int g = 0; g < group; ++g) {
      TraceChoice choice = sample_trace(params, prompts[p].obs, rng);
      StructuredTrace trace = render_trace(choice, space, grid);
      ScoreResult scored = score_trace(trace, prompts[p].truth, detector,
                                       settings.sub_params,
                                       settings.reward_weights);
      metrics.mean_r_total += scored.breakdown.r_total;
      metrics.mean_r_task += scored.breakdown.r_task;
      metrics.mean_r_sub += scored.breakdown.r_sub;
      metrics.mean_s_temporal += scored.breakdown.s_temporal;
      metrics.mean_r_format += scored.breakdown.r_format;
      rewards[p].push_back(scored.breakdown.r_total);
      choices[p].push_back(std::move(choice));
    }
  }
  const double n_completions = static_cast<double>(n_prompts) * group;
  metrics.mean_r_total /= n_completions;
  metrics.mean_r_task /= n_completions;
  metrics.mean_r_sub /= n_completions;
  metrics.mean_s_temporal /= n_completions;
  metrics.mean_r_format /= n_completions;

  std::vector<std::vector<double>> advantages(n_prompts);
  for (size_t p = 0; p < n_prompts; ++p) {
    advantages[p] = compute_advantages(rewards[p]);
  }

  // Clipped surrogate. The behaviour log-probs were recorded at sampling time
  // from these same parameters, so each ratio re-derives to exactly 1 here;
  // the clip path only bites when callers replay with stale choices.
  PolicyParams grad = make_policy(params.shape);
  double surrogate_sum = 0.0;
  size_t clip_count = 0;
  std::vector<double> per_decision;
  std::vector<double> coefs(decisions);
  for (size_t p = 0; p < n_prompts; ++p) {
    for (int g = 0; g < group; ++g) {
      const TraceChoice& choice = choices[p][g];
      logprob(params, prompts[p].obs, choice, &per_decision);
      const double adv = advantages[p][g];
      for (size_t d = 0; d < decisions; ++d) {
        const double ratio = std::exp(per_decision[d] - choice.logps[d]);
        const double clipped =
            std::clamp(ratio, 1.0 - settings.clip_eps, 1.0 + settings.clip_eps);
        const double v_plain = ratio * adv;
        const double v_clip = clipped * adv;
        surrogate_sum += std::min(v_plain, v_clip);
        if (v_clip < v_plain) {
          ++clip_count;
          coefs[d] = 0.0;  // min takes the constant branch
        } else {
          coefs[d] = adv * ratio;
        }
        if (debug) {
          debug->max_ratio_dev =
              std::max(debug->max_ratio_dev, std::abs(ratio - 1.0));
        }
      }
      accumulate_policy_grad(params, prompts[p].obs, choice, coefs,
                             -1.0 / n_dec, grad);
    }
  }

  double kl_sum = 0.0;
  for (size_t p = 0; p < n_prompts; ++p) {
    kl_sum += kl_divergence_grad(params, ref, prompts[p].obs,
                                 settings.kl_coef / static_cast<double>(n_prompts),
                                 grad);
  }
  const double kl_mean = kl_sum / static_cast<double>(n_prompts);
  const double surrogate_loss = -surrogate_sum / n_dec;
  metrics.kl = kl_mean;
  metrics.clip_fraction = static_cast<double>(clip_count) / n_dec;
  metrics.loss = surrogate_loss + settings.kl_coef * kl_mean;

  metrics.grad_norm_preclip = global_norm(grad);
  if (metrics.grad_norm_preclip > settings.max_grad_norm) {
    scale_params(grad, settings.max_grad_norm / metrics.grad_norm_preclip);
  }

  if (debug) {
    debug->groups.resize(n_prompts);
    for (size_t p = 0; p < n_prompts; ++p) {
      debug->groups[p].resize(group);
      for (int g = 0; g < group; ++g) {
        debug->groups[p][g] = {choices[p][g], rewards[p][g], advantages[p][g]};
      }
    }
    debug->surrogate_loss = surrogate_loss;
    debug->kl_term = settings.kl_coef * kl_mean;
    debug->grad_norm_postclip = global_norm(grad);
  }

  add_scaled(params, grad, -settings.learning_rate);
  return metrics;
}

double supervised_step(PolicyParams& params,
                       const std::vector<SupervisedExample>& batch,
                       double learning_rate, double* grad_norm) {
  if (batch.empty()) throw InvariantViolationError("supervised_step: empty batch");
  const size_t decisions = 2 * static_cast<size_t>(params.shape.slots) + 1;
  const std::vector<double> ones(decisions, 1.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  PolicyParams grad = make_policy(params.shape);
  double loss = 0.0;
  for (const SupervisedExample& ex : batch) {
    loss -= logprob(params, ex.obs, ex.target) * inv;
    accumulate_policy_grad(params, ex.obs, ex.target, ones, -inv, grad);
  }
  if (grad_norm) *grad_norm = global_norm(grad);
  add_scaled(params, grad, -learning_rate);
  return loss;
}

TraceChoice oracle_choice(const Episode& episode, const ActionSpace& space,
                          const PolicyShape& shape,
                          const std::vector<FrameWindow>& grid,
                          const SubActionLibrary& lib) {
  const auto& phases = lib.phases_of(episode.truth.label);
  const int skip = static_cast<int>(space.symbols().size());
  TraceChoice choice;
  choice.phase_choice.resize(static_cast<size_t>(shape.slots));
  choice.window_choice.resize(static_cast<size_t>(shape.slots));
  for (int m = 0; m < shape.slots; ++m) {
    if (m < static_cast<int>(phases.size())) {
      const int sym = space.symbol_index(episode.truth.label, phases[m].id);
      if (sym < 0) {
        throw InvariantViolationError("oracle_choice: symbol missing for " +
                                      episode.truth.label + "/" + phases[m].id);
      }
      const auto it = episode.truth.phase_windows.find(phases[m].id);
      if (it == episode.truth.phase_windows.end()) {
        throw InvariantViolationError("oracle_choice: truth window missing for " +
                                      phases[m].id);
      }
      int best_window = 0;
      double best_iou = -1.0;
      for (size_t w = 0; w < grid.size(); ++w) {
        const double iou = interval_iou(grid[w], it->second);
        if (iou > best_iou) {
          best_iou = iou;
          best_window = static_cast<int>(w);
        }
      }
      choice.phase_choice[static_cast<size_t>(m)] = sym;
      choice.window_choice[static_cast<size_t>(m)] = best_window;
    } else {
      choice.phase_choice[static_cast<size_t>(m)] = skip;
      choice.window_choice[static_cast<size_t>(m)] =
          m % static_cast<int>(grid.size());
    }
  }
  const int answer = space.label_index(episode.truth.label);
  if (answer < 0) {
    throw InvariantViolationError("oracle_choice: label missing from space: " +
                                  episode.truth.label);
  }
  choice.answer_choice = answer;
  return choice;
}

EvalSummary evaluate_policy(const PolicyParams& params, const ActionSpace& space,
                            const Detector& detector,
                            const EpisodeSpec& base_spec, int episodes,
                            std::uint64_t seed_base,
                            const SubRewardParams& sub_params,
                            const TotalRewardWeights& weights,
                            std::vector<EpisodeRecord>* records) {
  EvalSummary out;
  out.episodes = episodes;
  if (episodes <= 0) return out;
  const SubActionLibrary& lib = detector.library();
  const auto grid = window_grid(base_spec.frames, params.shape.windows);
  for (int i = 0; i < episodes; ++i) {
    EpisodeSpec spec = base_spec;
    spec.seed = derive_seed(seed_base, static_cast<std::uint64_t>(i));
    const Episode episode = generate_episode(lib, spec);
    const Observation obs = featurize(episode.video, detector.config());
    const TraceChoice choice = greedy_trace(params, obs);
    const StructuredTrace trace = render_trace(choice, space, grid);
    const ScoreResult scored =
        score_trace(trace, episode.truth, detector, sub_params, weights);
    out.accuracy += scored.breakdown.r_task;
    out.mean_r_total += scored.breakdown.r_total;
    out.mean_r_task += scored.breakdown.r_task;
    out.mean_r_sub += scored.breakdown.r_sub;
    out.mean_s_temporal += scored.breakdown.s_temporal;
    out.mean_r_format += scored.breakdown.r_format;
    if (records) {
      records->push_back({spec.seed, episode.truth.label,
                          trace.answer.value_or(""), scored.breakdown});
    }
  }
  const double n = static_cast<double>(episodes);
  out.accuracy /= n;
  out.mean_r_total /= n;
  out.mean_r_task /= n;
  out.mean_r_sub /= n;
  out.mean_s_temporal /= n;
  out.mean_r_format /= n;
  return out;
}

RunArtifacts train(const TrainConfig& config, const SubActionLibrary& lib,
                   const std::string& out_dir) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create run directory " + out_dir + ": " + ec.message());
  }

  RunArtifacts art;
  art.run_dir = out_dir;
  art.config_path = out_dir + "/config.json";
  write_text(art.config_path, config.serialize());

  const ActionSpace space(lib);
  const Detector detector(lib, config.embed);
  const PolicyShape shape = make_shape(space, config.embed.dims);
  PolicyParams params = make_policy(shape);
  const auto grid = window_grid(config.frames, shape.windows);
  const TotalRewardWeights train_weights = config.training_weights();

  art.metrics_path = out_dir + "/metrics.jsonl";
  std::ofstream metrics_out(art.metrics_path, std::ios::binary | std::ios::trunc);
  if (!metrics_out) throw IoError("cannot open for writing: " + art.metrics_path);

  auto emit_metrics = [&](int stage, int iter, const StepMetrics& m) {
    ordered_json line;
    line["stage"] = stage;
    line["iter"] = iter;
    line["mean_r_total"] = m.mean_r_total;
    line["mean_r_task"] = m.mean_r_task;
    line["mean_r_sub"] = m.mean_r_sub;
    line["mean_s_temporal"] = m.mean_s_temporal;
    line["mean_r_format"] = m.mean_r_format;
    line["kl"] = m.kl;
    line["clip_fraction"] = m.clip_fraction;
    line["grad_norm_preclip"] = m.grad_norm_preclip;
    line["loss"] = m.loss;
    metrics_out << line.dump() << "\n";
  };

  auto eval_block = [](const EvalSummary& s) {
    ordered_json block;
    block["episodes"] = s.episodes;
    block["accuracy"] = s.accuracy;
    block["mean_r_total"] = s.mean_r_total;
    block["mean_r_task"] = s.mean_r_task;
    block["mean_r_sub"] = s.mean_r_sub;
    block["mean_s_temporal"] = s.mean_s_temporal;
    block["mean_r_format"] = s.mean_r_format;
    return block;
  };

  ordered_json evaluations = ordered_json::array();
  // The evaluation sets are fixed functions of config.seed alone, so every
  // point scores the same held-out episodes and comparisons stay paired.
  auto run_eval = [&](const std::string& point) {
    EpisodeSpec noisy;
    noisy.frames = config.frames;
    noisy.noise_drop = config.noise.drop;
    noisy.noise_distract = config.noise.distract;
    EpisodeSpec clean;
    clean.frames = config.frames;
    const EvalSummary ns = evaluate_policy(
        params, space, detector, noisy, config.eval_episodes,
        derive_seed(config.seed, kTagEvalNoisy), config.sub_rewards,
        config.weights, nullptr);
    const EvalSummary cs = evaluate_policy(
        params, space, detector, clean, config.eval_episodes,
        derive_seed(config.seed, kTagEvalClean), config.sub_rewards,
        config.weights, nullptr);
    ordered_json entry;
    entry["point"] = point;
    entry["noisy"] = eval_block(ns);
    entry["clean"] = eval_block(cs);
    evaluations.push_back(std::move(entry));
    art.final_noisy = ns;
    art.final_clean = cs;
  };
  run_eval("initial");

  auto checkpoint_stage = [&](int stage) {
    const std::string path =
        out_dir + "/checkpoint_stage" + std::to_string(stage) + ".json";
    save_checkpoint(params, space, config.frames, config.embed, path);
    art.stage_checkpoints[stage] = path;
    run_eval("stage" + std::to_string(stage));
  };

  // The supervised stages imitate oracle traces on clean episodes — they are
  // the curated-demonstration phases of the curriculum. Only stage 3 sees the
  // configured noise, so the RL stage owns noise adaptation and its gains
  // stay measurable on the noisy held-out set.
  auto supervised_stage = [&](int stage, std::uint64_t tag,
                              const StageConfig& sc, bool zero_obs) {
    for (int it = 0; it < sc.iterations; ++it) {
      std::vector<SupervisedExample> batch;
      std::vector<GroundTruthAnnotation> truths;
      batch.reserve(static_cast<size_t>(config.batch_size));
      truths.reserve(static_cast<size_t>(config.batch_size));
      for (int i = 0; i < config.batch_size; ++i) {
        EpisodeSpec spec;
        spec.frames = config.frames;
        spec.seed = derive_seed(config.seed, tag, static_cast<std::uint64_t>(it),
                                static_cast<std::uint64_t>(i));
        Episode episode = generate_episode(lib, spec);
        Observation obs = featurize(episode.video, config.embed);
        if (zero_obs) obs = zeroed(obs);
        SupervisedExample ex;
        ex.target = oracle_choice(episode, space, shape, grid, lib);
        ex.obs = std::move(obs);
        batch.push_back(std::move(ex));
        truths.push_back(std::move(episode.truth));
      }
      StepMetrics m;
      m.loss = supervised_step(params, batch, sc.learning_rate,
                               &m.grad_norm_preclip);
      // Reward columns track the post-update greedy policy on this batch.
      for (size_t i = 0; i < batch.size(); ++i) {
        const TraceChoice choice = greedy_trace(params, batch[i].obs);
        const StructuredTrace trace = render_trace(choice, space, grid);
        const ScoreResult scored = score_trace(trace, truths[i], detector,
                                               config.sub_rewards, train_weights);
        m.mean_r_total += scored.breakdown.r_total;
        m.mean_r_task += scored.breakdown.r_task;
        m.mean_r_sub += scored.breakdown.r_sub;
        m.mean_s_temporal += scored.breakdown.s_temporal;
        m.mean_r_format += scored.breakdown.r_format;
      }
      const double n = static_cast<double>(batch.size());
      m.mean_r_total /= n;
      m.mean_r_task /= n;
      m.mean_r_sub /= n;
      m.mean_s_temporal /= n;
      m.mean_r_format /= n;
      emit_metrics(stage, it, m);
    }
    checkpoint_stage(stage);
  };

  if (config.stage1_enabled()) supervised_stage(1, kTagStage1, config.stage1, true);
  if (config.stage2_enabled()) supervised_stage(2, kTagStage2, config.stage2, false);

  if (config.stage3_enabled()) {
    const PolicyParams ref = params;  // KL anchor frozen at the boundary
    StepSettings settings;
    settings.clip_eps = config.clip_eps;
    settings.kl_coef = config.kl_coef;
    settings.group_size = config.group_size;
    settings.max_grad_norm = config.max_grad_norm;
    settings.learning_rate = config.stage3.learning_rate;
    settings.sub_params = config.sub_rewards;
    settings.reward_weights = train_weights;
    for (int it = 0; it < config.stage3.iterations; ++it) {
      std::vector<Prompt> prompts;
      prompts.reserve(static_cast<size_t>(config.batch_size));
      for (int i = 0; i < config.batch_size; ++i) {
        EpisodeSpec spec;
        spec.frames = config.frames;
        spec.noise_drop = config.noise.drop;
        spec.noise_distract = config.noise.distract;
        spec.seed = derive_seed(config.seed, kTagStage3,
                                static_cast<std::uint64_t>(it),
                                static_cast<std::uint64_t>(i));
        Episode episode = generate_episode(lib, spec);
        Prompt prompt;
        prompt.obs = featurize(episode.video, config.embed);
        prompt.truth = std::move(episode.truth);
        prompts.push_back(std::move(prompt));
      }
      Rng rollout(derive_seed(config.seed, kTagRollout,
                              static_cast<std::uint64_t>(it)));
      const StepMetrics m =
          tgrpo_step(params, ref, space, detector, prompts, settings, rollout);
      emit_metrics(3, it, m);
    }
    checkpoint_stage(3);
  }

  metrics_out.flush();
  if (!metrics_out) throw IoError("failed writing: " + art.metrics_path);
  metrics_out.close();

  art.final_checkpoint = out_dir + "/checkpoint_final.json";
  save_checkpoint(params, space, config.frames, config.embed,
                  art.final_checkpoint);

  ordered_json summary;
  summary["evaluations"] = evaluations;
  summary["final"] = evaluations.back();
  art.summary_path = out_dir + "/summary.json";
  write_text(art.summary_path, summary.dump(2) + "\n");
  return art;
}

}  // namespace actlab
