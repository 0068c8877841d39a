#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actlab/embedding.hpp"
#include "actlab/subaction.hpp"
#include "actlab/trace.hpp"

namespace actlab {

struct Detection {
  std::string action;
  std::string phase_id;
  int segment_index = 0;  // earliest qualifying segment
  double similarity = 0.0;
  friend bool operator==(const Detection&, const Detection&) = default;
};

// At most one entry per (action, phase_id). Entries follow library action
// order, then phase order.
struct DetectionResult {
  std::vector<Detection> detections;
  const Detection* find(std::string_view action, std::string_view phase_id) const;
};

// max over the phase's description variants of cosine(embed(text), embed(d)).
double similarity_to_phase(std::string_view text, const SubActionPhase& phase,
                           const EmbedderConfig& cfg = {});

// Precomputes description embeddings for one library so repeated detection
// only embeds the trace segments. Similarities are bit-identical to the plain
// cosine(embed(segment), embed(description)) path: descriptions are stored
// sparsely in ascending bucket order, and zero terms drop out of a
// left-to-right IEEE sum without changing it. The library must outlive the
// detector.
class Detector {
 public:
  explicit Detector(const SubActionLibrary& lib, EmbedderConfig cfg = {});

  // A phase is detected iff some segment reaches its threshold; the earliest
  // such segment and its similarity are recorded.
  DetectionResult detect(const StructuredTrace& trace,
                         const std::optional<std::string>& action_filter =
                             std::nullopt) const;

  const SubActionLibrary& library() const { return *lib_; }
  const EmbedderConfig& config() const { return cfg_; }

 private:
  struct SparseVec {
    std::vector<std::pair<int, double>> entries;  // ascending bucket index
    double norm2 = 0.0;
  };
  struct PhaseEntry {
    const SubActionPhase* phase = nullptr;
    std::vector<SparseVec> descriptions;
  };
  struct ActionEntry {
    const ActionDecomposition* action = nullptr;
    std::vector<PhaseEntry> phases;
  };

  const SubActionLibrary* lib_;
  EmbedderConfig cfg_;
  std::vector<ActionEntry> actions_;
};

// One-shot convenience wrapper around Detector.
DetectionResult detect(const StructuredTrace& trace, const SubActionLibrary& lib,
                       const std::optional<std::string>& action_filter = std::nullopt,
                       const EmbedderConfig& cfg = {});

}  // namespace actlab
