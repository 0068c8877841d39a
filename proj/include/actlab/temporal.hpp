#pragma once

#include <map>
#include <string>
#include <vector>

#include "actlab/detection.hpp"
#include "actlab/subaction.hpp"
#include "actlab/trace.hpp"

namespace actlab {

struct GroundTruthAnnotation {
  std::string label;
  std::map<std::string, FrameWindow, std::less<>> phase_windows;
  friend bool operator==(const GroundTruthAnnotation&,
                         const GroundTruthAnnotation&) = default;
};

// Kendall tau-a: (concordant - discordant) / (n(n-1)/2). Pairs tied in either
// list contribute zero to the numerator.
double kendall_tau(const std::vector<double>& xs, const std::vector<double>& ys);

double interval_iou(const FrameWindow& a, const FrameWindow& b);

// Rank agreement between step order and window starts over timestamped steps,
// mapped to [0,1]; fewer than two timestamped steps is vacuous and scores 1.
double s_seq(const StructuredTrace& trace);

// Mean IoU between each detected truth-action phase's claimed window (the
// window on its detection step) and the ground-truth window for that phase.
// A detection whose step carries no window contributes 0; no detected phase
// with a ground-truth window is vacuous and scores 1.
double s_bind(const StructuredTrace& trace, const DetectionResult& detections,
              const GroundTruthAnnotation& truth);

// Modal-claim entity consistency. A step's claimed action is defined when the
// detections at that step all belong to one action; an entity mentioned in at
// least two claim-bearing steps scores (modal claim count / claim count).
// Mean over such entities; none is vacuous and scores 1.
double s_cross(const StructuredTrace& trace, const DetectionResult& detections,
               const SubActionLibrary& lib);

// Arithmetic mean of the three components; inputs must lie in [0,1].
double s_temporal(double seq, double cross, double bind);

}  // namespace actlab
