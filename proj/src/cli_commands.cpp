#include "actlab/cli_commands.hpp"

#include <array>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "actlab/config.hpp"
#include "actlab/detection.hpp"
#include "actlab/environment.hpp"
#include "actlab/errors.hpp"
#include "actlab/policy.hpp"
#include "actlab/rng.hpp"
#include "actlab/scoring.hpp"
#include "actlab/subaction.hpp"
#include "actlab/tgrpo.hpp"
#include "actlab/trace.hpp"

namespace actlab {
namespace {

using nlohmann::ordered_json;

// Exit-code taxonomy: 0 success, 1 IO, 2 validation, 3 config.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    body();
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading: " + path);
  return buf.str();
}

// Shortest round-trip formatting, same as the JSON writers use.
std::string fmt_number(double v) { return ordered_json(v).dump(); }

ordered_json detections_json(const DetectionResult& result) {
  ordered_json arr = ordered_json::array();
  for (const Detection& d : result.detections) {
    ordered_json item;
    item["action"] = d.action;
    item["phase"] = d.phase_id;
    item["segment"] = d.segment_index;
    item["similarity"] = d.similarity;
    arr.push_back(std::move(item));
  }
  return arr;
}

// {"phase_id": [start, end)} with integer half-open frame ranges.
std::map<std::string, FrameWindow, std::less<>> parse_windows(
    const std::string& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedFileError("windows: " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    throw MalformedFileError("windows: top level must be an object");
  }
  std::map<std::string, FrameWindow, std::less<>> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& v = it.value();
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer()) {
      throw MalformedFileError("windows: '" + it.key() +
                               "' must be a [start, end] integer pair");
    }
    const int start = v[0].get<int>();
    const int end = v[1].get<int>();
    if (start < 0 || end <= start) {
      throw MalformedFileError("windows: '" + it.key() +
                               "' must satisfy 0 <= start < end");
    }
    out.emplace(it.key(), FrameWindow{start, end});
  }
  return out;
}

ordered_json summary_json(const EvalSummary& s) {
  ordered_json doc;
  doc["episodes"] = s.episodes;
  doc["accuracy"] = s.accuracy;
  doc["mean_r_total"] = s.mean_r_total;
  doc["mean_r_task"] = s.mean_r_task;
  doc["mean_r_sub"] = s.mean_r_sub;
  doc["mean_s_temporal"] = s.mean_s_temporal;
  doc["mean_r_format"] = s.mean_r_format;
  return doc;
}

void write_records(const std::string& path,
                   const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const EpisodeRecord& r : records) {
    ordered_json line;
    line["seed"] = r.seed;
    line["label"] = r.label;
    line["predicted"] = r.predicted;
    line["r_task"] = r.breakdown.r_task;
    line["r_sub"] = r.breakdown.r_sub;
    line["s_temporal"] = r.breakdown.s_temporal;
    line["r_format"] = r.breakdown.r_format;
    line["r_total"] = r.breakdown.r_total;
    out << line.dump() << "\n";
  }
  out.flush();
  if (!out) throw IoError("failed writing: " + path);
}

// Answer-only evaluation against the nearest-library-action classifier; the
// scored trace carries the predicted label and nothing else.
EvalSummary baseline_eval(const SubActionLibrary& lib, const Detector& detector,
                          const EpisodeSpec& base_spec, int episodes,
                          std::uint64_t seed_base,
                          std::vector<EpisodeRecord>* records) {
  EvalSummary out;
  out.episodes = episodes;
  if (episodes <= 0) return out;
  for (int i = 0; i < episodes; ++i) {
    EpisodeSpec spec = base_spec;
    spec.seed = derive_seed(seed_base, static_cast<std::uint64_t>(i));
    const Episode episode = generate_episode(lib, spec);
    StructuredTrace trace;
    trace.answer = brute_force_label(episode.video, lib, detector.config());
    trace.format_ok = true;
    const ScoreResult scored = score_trace(trace, episode.truth, detector);
    out.accuracy += scored.breakdown.r_task;
    out.mean_r_total += scored.breakdown.r_total;
    out.mean_r_task += scored.breakdown.r_task;
    out.mean_r_sub += scored.breakdown.r_sub;
    out.mean_s_temporal += scored.breakdown.s_temporal;
    out.mean_r_format += scored.breakdown.r_format;
    if (records) {
      records->push_back({spec.seed, episode.truth.label, *trace.answer,
                          scored.breakdown});
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

constexpr std::array<const char*, 11> kMetricsFields = {
    "stage",          "iter",          "mean_r_total",      "mean_r_task",
    "mean_r_sub",     "mean_s_temporal", "mean_r_format",   "kl",
    "clip_fraction",  "grad_norm_preclip", "loss"};

struct StageAgg {
  int iters = 0;
  ordered_json last;
};

// Strict line-by-line read of a metrics stream; diagnostics carry the
// 1-based line number.
std::map<int, StageAgg> read_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::map<int, StageAgg> by_stage;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedFileError(where + ": " + e.what());
    }
    if (!rec.is_object()) {
      throw MalformedFileError(where + ": record must be an object");
    }
    for (auto it = rec.begin(); it != rec.end(); ++it) {
      bool known = false;
      for (const char* f : kMetricsFields) known = known || it.key() == f;
      if (!known) {
        throw MalformedFileError(where + ": unknown field '" + it.key() + "'");
      }
    }
    for (const char* f : kMetricsFields) {
      if (!rec.contains(f)) {
        throw MalformedFileError(where + ": missing field '" + std::string(f) +
                                 "'");
      }
    }
    if (!rec["stage"].is_number_integer() || !rec["iter"].is_number_integer()) {
      throw MalformedFileError(where + ": stage and iter must be integers");
    }
    for (size_t f = 2; f < kMetricsFields.size(); ++f) {
      if (!rec[kMetricsFields[f]].is_number()) {
        throw MalformedFileError(where + ": field '" +
                                 std::string(kMetricsFields[f]) +
                                 "' must be a number");
      }
    }
    StageAgg& agg = by_stage[rec["stage"].get<int>()];
    ++agg.iters;
    agg.last = std::move(rec);
  }
  if (in.bad()) throw IoError("failed reading: " + path);
  return by_stage;
}

}  // namespace

int cmd_validate_lib(const ValidateLibOptions& opt, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    const SubActionLibrary lib = SubActionLibrary::load_file(opt.lib_path);
    const LibraryStats stats = lib.stats();
    ordered_json doc;
    doc["actions"] = stats.n_actions;
    doc["phases"] = stats.n_phases;
    doc["descriptions"] = stats.n_descriptions;
    out << doc.dump(2) << "\n";
  });
}

int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SubActionLibrary lib = SubActionLibrary::load_file(opt.lib_path);
    const StructuredTrace trace = parse_trace(read_file(opt.trace_path));
    const Detector detector(lib, opt.embed);
    const DetectionResult result = detector.detect(trace, opt.action);
    ordered_json doc;
    doc["detections"] = detections_json(result);
    out << doc.dump(2) << "\n";
  });
}

int cmd_score(const ScoreOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SubActionLibrary lib = SubActionLibrary::load_file(opt.lib_path);
    const StructuredTrace trace = parse_trace(read_file(opt.trace_path));
    GroundTruthAnnotation truth;
    truth.label = opt.truth_label;
    if (opt.windows_path) truth.phase_windows = parse_windows(*opt.windows_path);
    const Detector detector(lib, opt.embed);
    const ScoreResult scored =
        score_trace(trace, truth, detector, opt.sub_params, opt.weights);
    ordered_json doc;
    doc["r_task"] = scored.breakdown.r_task;
    doc["r_sub"] = scored.breakdown.r_sub;
    doc["s_seq"] = scored.seq;
    doc["s_cross"] = scored.cross;
    doc["s_bind"] = scored.bind;
    doc["s_temporal"] = scored.breakdown.s_temporal;
    doc["r_format"] = scored.breakdown.r_format;
    doc["r_total"] = scored.breakdown.r_total;
    doc["detections"] = detections_json(scored.detections);
    out << doc.dump(2) << "\n";
  });
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TrainConfig config = TrainConfig::load_file(opt.config_path);
    const SubActionLibrary lib = SubActionLibrary::load_file(opt.lib_path);
    const RunArtifacts art = train(config, lib, opt.out_dir);
    out << "final noisy mean_r_total " << fmt_number(art.final_noisy.mean_r_total)
        << " accuracy " << fmt_number(art.final_noisy.accuracy) << "; summary "
        << art.summary_path << "\n";
  });
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.checkpoint_path.has_value() == opt.brute_force_baseline) {
      throw ConfigError(
          "eval: exactly one of --checkpoint and --brute-force is required");
    }
    if (opt.episodes < 0) throw ConfigError("eval: episodes must be non-negative");
    if (!(opt.noise_drop >= 0.0 && opt.noise_drop <= 1.0)) {
      throw ConfigError("eval: noise-drop must lie in [0,1]");
    }
    if (!(opt.noise_distract >= 0.0)) {
      throw ConfigError("eval: noise-distract must be non-negative");
    }
    const SubActionLibrary lib = SubActionLibrary::load_file(opt.lib_path);
    EpisodeSpec base;
    base.noise_drop = opt.noise_drop;
    base.noise_distract = opt.noise_distract;
    std::vector<EpisodeRecord> records;
    std::vector<EpisodeRecord>* rec = opt.records_path ? &records : nullptr;
    EvalSummary summary;
    if (opt.checkpoint_path) {
      const Checkpoint ck = load_checkpoint(*opt.checkpoint_path);
      const ActionSpace space(lib);
      verify_checkpoint(ck, space);
      const Detector detector(lib, ck.embed);
      base.frames = ck.frames;
      summary = evaluate_policy(ck.params, space, detector, base, opt.episodes,
                                opt.seed, {}, {}, rec);
    } else {
      if (opt.frames < 1) throw ConfigError("eval: frames must be positive");
      const Detector detector(lib, opt.embed);
      base.frames = opt.frames;
      summary = baseline_eval(lib, detector, base, opt.episodes, opt.seed, rec);
    }
    if (opt.records_path) write_records(*opt.records_path, records);
    out << summary_json(summary).dump(2) << "\n";
  });
}

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto rows = read_metrics(opt.run_dir + "/metrics.jsonl");
    std::optional<std::map<int, StageAgg>> against;
    if (opt.against_dir) {
      against = read_metrics(*opt.against_dir + "/metrics.jsonl");
    }
    out << "stage\titers";
    for (size_t f = 2; f < kMetricsFields.size(); ++f) {
      out << "\t" << kMetricsFields[f];
    }
    if (against) out << "\tdelta_mean_r_total";
    out << "\n";
    for (const auto& [stage, agg] : rows) {
      out << stage << "\t" << agg.iters;
      for (size_t f = 2; f < kMetricsFields.size(); ++f) {
        out << "\t" << agg.last.at(kMetricsFields[f]).dump();
      }
      if (against) {
        const auto it = against->find(stage);
        if (it == against->end()) {
          out << "\t-";
        } else {
          const double delta =
              agg.last.at("mean_r_total").get<double>() -
              it->second.last.at("mean_r_total").get<double>();
          out << "\t" << fmt_number(delta);
        }
      }
      out << "\n";
    }
  });
}

int cmd_episode(const EpisodeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.frames < 1) throw ConfigError("episode: frames must be positive");
    if (!(opt.noise_drop >= 0.0 && opt.noise_drop <= 1.0)) {
      throw ConfigError("episode: noise-drop must lie in [0,1]");
    }
    if (!(opt.noise_distract >= 0.0)) {
      throw ConfigError("episode: noise-distract must be non-negative");
    }
    const SubActionLibrary lib = SubActionLibrary::load_file(opt.lib_path);
    EpisodeSpec spec;
    spec.frames = opt.frames;
    spec.noise_drop = opt.noise_drop;
    spec.noise_distract = opt.noise_distract;
    spec.seed = opt.seed;
    const Episode episode = generate_episode(lib, spec);
    if (opt.emit_trace) {
      out << emit_trace(oracle_trace(episode, lib));
      return;
    }
    ordered_json doc;
    doc["seed"] = opt.seed;
    doc["label"] = episode.truth.label;
    ordered_json windows = ordered_json::object();
    for (const auto& [phase, window] : episode.truth.phase_windows) {
      windows[phase] = {window.start, window.end};
    }
    doc["phase_windows"] = std::move(windows);
    ordered_json frames = ordered_json::array();
    for (const auto& bag : episode.video.frames) frames.push_back(bag);
    doc["frames"] = std::move(frames);
    out << doc.dump(2) << "\n";
  });
}

}  // namespace actlab
