#include <iostream>

#include <CLI11.hpp>

#include "actlab/cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sub-action reasoning laboratory"};
  app.require_subcommand(1);

  actlab::ValidateLibOptions validate_opt;
  auto* validate =
      app.add_subcommand("validate-lib", "Load a sub-action library, check its "
                                         "invariants and print its stats");
  validate->add_option("--lib", validate_opt.lib_path, "library JSON file")
      ->required();

  actlab::DetectOptions detect_opt;
  auto* detect =
      app.add_subcommand("detect", "Detect sub-action phases in a trace");
  detect->add_option("--lib", detect_opt.lib_path, "library JSON file")
      ->required();
  detect->add_option("--trace", detect_opt.trace_path, "trace text file")
      ->required();
  detect->add_option("--action", detect_opt.action,
                     "restrict detection to one action");
  detect->add_option("--dims", detect_opt.embed.dims, "embedding dimensions")
      ->capture_default_str();
  detect->add_option("--hash-seed", detect_opt.embed.hash_seed,
                     "embedding hash seed")
      ->capture_default_str();

  actlab::ScoreOptions score_opt;
  auto* score = app.add_subcommand(
      "score", "Score a trace against a ground-truth label and windows");
  score->add_option("--lib", score_opt.lib_path, "library JSON file")->required();
  score->add_option("--trace", score_opt.trace_path, "trace text file")
      ->required();
  score->add_option("--truth", score_opt.truth_label, "ground-truth label")
      ->required();
  score->add_option("--windows", score_opt.windows_path,
                    "ground-truth phase windows JSON ({\"phase\": [start, "
                    "end]}, end exclusive)");
  score->add_option("--alpha", score_opt.sub_params.alpha,
                    "sub-action detection credit")
      ->capture_default_str();
  score->add_option("--beta", score_opt.sub_params.beta,
                    "false-positive penalty")
      ->capture_default_str();
  score->add_option("--gamma", score_opt.sub_params.gamma, "ordering bonus")
      ->capture_default_str();
  score->add_option("--lambda1", score_opt.weights.lambda1,
                    "sub-action reward weight")
      ->capture_default_str();
  score->add_option("--lambda2", score_opt.weights.lambda2,
                    "temporal consistency weight")
      ->capture_default_str();
  score->add_option("--lambda3", score_opt.weights.lambda3, "format weight")
      ->capture_default_str();
  score->add_option("--dims", score_opt.embed.dims, "embedding dimensions")
      ->capture_default_str();
  score->add_option("--hash-seed", score_opt.embed.hash_seed,
                    "embedding hash seed")
      ->capture_default_str();

  actlab::TrainOptions train_opt;
  auto* train =
      app.add_subcommand("train", "Run the training curriculum from a config");
  train->add_option("--config", train_opt.config_path, "config JSON file")
      ->required();
  train->add_option("--lib", train_opt.lib_path, "library JSON file")
      ->required();
  train->add_option("--out", train_opt.out_dir, "run output directory")
      ->required();

  actlab::EvalOptions eval_opt;
  auto* eval =
      app.add_subcommand("eval", "Greedy evaluation of a checkpoint (or the "
                                 "brute-force baseline) on fresh episodes");
  eval->add_option("--checkpoint", eval_opt.checkpoint_path,
                   "policy checkpoint JSON");
  eval->add_flag("--brute-force", eval_opt.brute_force_baseline,
                 "evaluate the nearest-action baseline instead of a policy");
  eval->add_option("--lib", eval_opt.lib_path, "library JSON file")->required();
  eval->add_option("--episodes", eval_opt.episodes, "number of episodes")
      ->capture_default_str();
  eval->add_option("--seed", eval_opt.seed, "episode seed base")
      ->capture_default_str();
  eval->add_option("--noise-drop", eval_opt.noise_drop,
                   "per-keyword drop probability")
      ->capture_default_str();
  eval->add_option("--noise-distract", eval_opt.noise_distract,
                   "expected distractor keywords per frame")
      ->capture_default_str();
  eval->add_option("--frames", eval_opt.frames,
                   "frames per episode (baseline mode only)")
      ->capture_default_str();
  eval->add_option("--dims", eval_opt.embed.dims,
                   "embedding dimensions (baseline mode only)")
      ->capture_default_str();
  eval->add_option("--hash-seed", eval_opt.embed.hash_seed,
                   "embedding hash seed (baseline mode only)")
      ->capture_default_str();
  eval->add_option("--records", eval_opt.records_path,
                   "write per-episode records to this JSONL file");

  actlab::ReportOptions report_opt;
  auto* report = app.add_subcommand(
      "report", "Tabulate per-stage final metrics of a run as TSV");
  report->add_option("--run", report_opt.run_dir, "run directory")->required();
  report->add_option("--against", report_opt.against_dir,
                     "second run directory; adds a delta_mean_r_total column");

  actlab::EpisodeOptions episode_opt;
  auto* episode = app.add_subcommand(
      "episode", "Generate one synthetic episode (or its oracle trace)");
  episode->add_option("--lib", episode_opt.lib_path, "library JSON file")
      ->required();
  episode->add_option("--seed", episode_opt.seed, "episode seed")
      ->capture_default_str();
  episode->add_option("--frames", episode_opt.frames, "frames per episode")
      ->capture_default_str();
  episode->add_option("--noise-drop", episode_opt.noise_drop,
                      "per-keyword drop probability")
      ->capture_default_str();
  episode->add_option("--noise-distract", episode_opt.noise_distract,
                      "expected distractor keywords per frame")
      ->capture_default_str();
  episode->add_flag("--trace", episode_opt.emit_trace,
                    "print the oracle trace instead of the episode JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 3;  // bad flags are config errors
  }

  if (validate->parsed()) {
    return actlab::cmd_validate_lib(validate_opt, std::cout, std::cerr);
  }
  if (detect->parsed()) return actlab::cmd_detect(detect_opt, std::cout, std::cerr);
  if (score->parsed()) return actlab::cmd_score(score_opt, std::cout, std::cerr);
  if (train->parsed()) return actlab::cmd_train(train_opt, std::cout, std::cerr);
  if (eval->parsed()) return actlab::cmd_eval(eval_opt, std::cout, std::cerr);
  if (report->parsed()) return actlab::cmd_report(report_opt, std::cout, std::cerr);
  if (episode->parsed()) {
    return actlab::cmd_episode(episode_opt, std::cout, std::cerr);
  }
  return 3;
}
