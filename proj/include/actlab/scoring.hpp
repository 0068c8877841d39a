#pragma once

#include "actlab/detection.hpp"
#include "actlab/rewards.hpp"
#include "actlab/temporal.hpp"

namespace actlab {

struct ScoreResult {
  RewardBreakdown breakdown;
  double seq = 0.0;
  double cross = 0.0;
  double bind = 0.0;
  DetectionResult detections;
};

// Full reward pipeline for one trace against one annotation: detection,
// graduated sub-action reward, the three temporal components, format and
// task rewards, composed into R_total.
ScoreResult score_trace(const StructuredTrace& trace,
                        const GroundTruthAnnotation& truth,
                        const Detector& detector,
                        const SubRewardParams& sub_params = {},
                        const TotalRewardWeights& weights = {});

}  // namespace actlab
