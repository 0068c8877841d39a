#include "actlab/environment.hpp"

#include <algorithm>

#include "actlab/errors.hpp"

namespace actlab {

std::vector<FrameWindow> partition_windows(int total, int k) {
  if (k < 1 || total < k) {
    throw InvariantViolationError("partition_windows: cannot split " +
                                  std::to_string(total) + " frames into " +
                                  std::to_string(k) + " windows");
  }
  const int width = total / k;
  std::vector<FrameWindow> windows;
  windows.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int start = i * width;
    const int end = i == k - 1 ? total : (i + 1) * width;
    windows.push_back(FrameWindow{start, end});
  }
  return windows;
}

Episode generate_episode(const SubActionLibrary& lib, const EpisodeSpec& spec,
                         Rng& rng) {
  const auto& actions = lib.actions();
  const ActionDecomposition& chosen =
      actions[static_cast<size_t>(rng.uniform_int(static_cast<int>(actions.size())))];
  const std::vector<SubActionPhase>& phases = chosen.phases;
  const std::vector<FrameWindow> windows =
      partition_windows(spec.frames, static_cast<int>(phases.size()));

  Episode episode;
  episode.truth.label = chosen.name;
  for (size_t i = 0; i < phases.size(); ++i) {
    episode.truth.phase_windows.emplace(phases[i].id, windows[i]);
  }

  std::vector<const std::string*> distractor_pool;
  for (const ActionDecomposition& action : actions) {
    if (&action == &chosen) continue;
    for (const SubActionPhase& phase : action.phases) {
      for (const std::string& d : phase.descriptions) distractor_pool.push_back(&d);
    }
  }

  episode.video.frames.resize(static_cast<size_t>(spec.frames));
  for (int t = 0; t < spec.frames; ++t) {
    size_t phase_idx = 0;
    while (t >= windows[phase_idx].end) ++phase_idx;
    std::vector<std::string>& bag = episode.video.frames[static_cast<size_t>(t)];
    for (const std::string& d : phases[phase_idx].descriptions) {
      if (rng.uniform() >= spec.noise_drop) bag.push_back(d);
    }
    const int distractors = rng.poisson(spec.noise_distract);
    for (int j = 0; j < distractors && !distractor_pool.empty(); ++j) {
      bag.push_back(
          *distractor_pool[static_cast<size_t>(
              rng.uniform_int(static_cast<int>(distractor_pool.size())))]);
    }
  }
  return episode;
}

Episode generate_episode(const SubActionLibrary& lib, const EpisodeSpec& spec) {
  Rng rng(spec.seed);
  return generate_episode(lib, spec, rng);
}

StructuredTrace oracle_trace(const Episode& episode, const SubActionLibrary& lib) {
  const std::vector<SubActionPhase>& phases = lib.phases_of(episode.truth.label);
  StructuredTrace trace;
  for (size_t i = 0; i < phases.size(); ++i) {
    TraceStep step;
    step.index = static_cast<int>(i);
    step.text = "@subject " + phases[i].descriptions.front();
    step.frame_window = episode.truth.phase_windows.at(phases[i].id);
    step.entities = {"subject"};
    trace.steps.push_back(std::move(step));
  }
  trace.answer = episode.truth.label;
  trace.format_ok = true;
  return trace;
}

std::string brute_force_label(const SyntheticVideo& video,
                              const SubActionLibrary& lib,
                              const EmbedderConfig& cfg) {
  std::vector<EmbeddingVector> frame_vecs;
  frame_vecs.reserve(video.frames.size());
  for (const std::vector<std::string>& bag : video.frames) {
    std::string joined;
    for (const std::string& kw : bag) {
      if (!joined.empty()) joined += ' ';
      joined += kw;
    }
    frame_vecs.push_back(embed(joined, cfg));
  }

  std::vector<const ActionDecomposition*> sorted;
  for (const ActionDecomposition& action : lib.actions()) sorted.push_back(&action);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->name < b->name; });

  std::string best_name;
  double best_score = 0.0;
  bool first = true;
  for (const ActionDecomposition* action : sorted) {
    double score = 0.0;
    for (const EmbeddingVector& fv : frame_vecs) {
      double best_sim = 0.0;
      bool any = false;
      for (const SubActionPhase& phase : action->phases) {
        for (const std::string& d : phase.descriptions) {
          const double sim = cosine(fv, embed(d, cfg));
          if (!any || sim > best_sim) {
            best_sim = sim;
            any = true;
          }
        }
      }
      if (any) score += best_sim;
    }
    if (first || score > best_score) {
      best_score = score;
      best_name = action->name;
      first = false;
    }
  }
  return best_name;
}

}  // namespace actlab
