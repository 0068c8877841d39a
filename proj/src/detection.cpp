#include "actlab/detection.hpp"

#include <cmath>

#include "actlab/errors.hpp"

namespace actlab {

namespace {

double norm2_of(const EmbeddingVector& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  return n2;
}

// Mirrors cosine()'s left-to-right accumulation; entries hold every nonzero
// bucket in ascending order, so the skipped zero terms leave the sum bitwise
// unchanged.
double sparse_cosine(const EmbeddingVector& a, double a_norm2,
                     const std::vector<std::pair<int, double>>& entries,
                     double b_norm2) {
  if (a_norm2 == 0.0 || b_norm2 == 0.0) return 0.0;
  double dot = 0.0;
  for (const auto& [bucket, value] : entries) {
    dot += a[static_cast<size_t>(bucket)] * value;
  }
  return dot / (std::sqrt(a_norm2) * std::sqrt(b_norm2));
}

}  // namespace

const Detection* DetectionResult::find(std::string_view action,
                                       std::string_view phase_id) const {
  for (const Detection& d : detections) {
    if (d.action == action && d.phase_id == phase_id) return &d;
  }
  return nullptr;
}

double similarity_to_phase(std::string_view text, const SubActionPhase& phase,
                           const EmbedderConfig& cfg) {
  const EmbeddingVector segment = embed(std::string(text), cfg);
  double best = -1.0;
  for (const std::string& description : phase.descriptions) {
    const double sim = cosine(segment, embed(description, cfg));
    if (sim > best) best = sim;
  }
  return best;
}

Detector::Detector(const SubActionLibrary& lib, EmbedderConfig cfg)
    : lib_(&lib), cfg_(cfg) {
  for (const ActionDecomposition& action : lib.actions()) {
    ActionEntry entry;
    entry.action = &action;
    for (const SubActionPhase& phase : action.phases) {
      PhaseEntry pe;
      pe.phase = &phase;
      for (const std::string& description : phase.descriptions) {
        const EmbeddingVector dense = embed(description, cfg_);
        SparseVec sv;
        sv.norm2 = norm2_of(dense);
        for (size_t i = 0; i < dense.size(); ++i) {
          if (dense[i] != 0.0) sv.entries.emplace_back(static_cast<int>(i), dense[i]);
        }
        pe.descriptions.push_back(std::move(sv));
      }
      entry.phases.push_back(std::move(pe));
    }
    actions_.push_back(std::move(entry));
  }
}

DetectionResult Detector::detect(const StructuredTrace& trace,
                                 const std::optional<std::string>& action_filter) const {
  if (action_filter && !lib_->find(*action_filter)) {
    throw UnknownActionError("unknown action '" + *action_filter + "'");
  }

  struct Segment {
    EmbeddingVector vec;
    double norm2 = 0.0;
  };
  std::vector<Segment> segs;
  segs.reserve(trace.steps.size());
  for (const TraceStep& step : trace.steps) {
    Segment s;
    s.vec = embed(segment_text(step), cfg_);
    s.norm2 = norm2_of(s.vec);
    segs.push_back(std::move(s));
  }

  DetectionResult result;
  for (const ActionEntry& action : actions_) {
    if (action_filter && action.action->name != *action_filter) continue;
    for (const PhaseEntry& pe : action.phases) {
      for (size_t i = 0; i < segs.size(); ++i) {
        double best = -1.0;
        for (const SparseVec& desc : pe.descriptions) {
          const double sim =
              sparse_cosine(segs[i].vec, segs[i].norm2, desc.entries, desc.norm2);
          if (sim > best) best = sim;
        }
        if (best >= pe.phase->threshold) {
          result.detections.push_back(Detection{action.action->name,
                                                pe.phase->id,
                                                trace.steps[i].index, best});
          break;  // earliest qualifying segment wins
        }
      }
    }
  }
  return result;
}

DetectionResult detect(const StructuredTrace& trace, const SubActionLibrary& lib,
                       const std::optional<std::string>& action_filter,
                       const EmbedderConfig& cfg) {
  return Detector(lib, cfg).detect(trace, action_filter);
}

}  // namespace actlab
