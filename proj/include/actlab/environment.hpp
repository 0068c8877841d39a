#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actlab/embedding.hpp"
#include "actlab/rng.hpp"
#include "actlab/subaction.hpp"
#include "actlab/temporal.hpp"
#include "actlab/trace.hpp"

namespace actlab {

struct SyntheticVideo {
  std::vector<std::vector<std::string>> frames;  // keyword bag per frame
  friend bool operator==(const SyntheticVideo&, const SyntheticVideo&) = default;
};

struct EpisodeSpec {
  int frames = 16;
  double noise_drop = 0.0;      // probability of dropping a true keyword per frame
  double noise_distract = 0.0;  // expected foreign keywords per frame (Poisson)
  std::uint64_t seed = 0;
};

struct Episode {
  SyntheticVideo video;
  GroundTruthAnnotation truth;
  friend bool operator==(const Episode&, const Episode&) = default;
};

// Contiguous cover of [0, total): k windows of floor(total/k) frames each,
// the last absorbing the remainder. Requires total >= k >= 1.
std::vector<FrameWindow> partition_windows(int total, int k);

// Uniform label, contiguous per-phase windows in canonical order, per-frame
// keyword bags = the phase's descriptions minus dropped ones plus Poisson
// distractors drawn from other actions' descriptions.
Episode generate_episode(const SubActionLibrary& lib, const EpisodeSpec& spec,
                         Rng& rng);
// Convenience overload seeding a fresh Rng from spec.seed.
Episode generate_episode(const SubActionLibrary& lib, const EpisodeSpec& spec);

// One step per phase in canonical order, carrying the true window, the
// @subject entity and the phase's first description; answer = true label.
StructuredTrace oracle_trace(const Episode& episode, const SubActionLibrary& lib);

// argmax over actions of sum over frames of the best description similarity
// to the frame's keyword-bag embedding; ties go to the lexicographically
// smallest action name.
std::string brute_force_label(const SyntheticVideo& video,
                              const SubActionLibrary& lib,
                              const EmbedderConfig& cfg = {});

}  // namespace actlab
