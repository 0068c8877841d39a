#include "actlab/scoring.hpp"

namespace actlab {

ScoreResult score_trace(const StructuredTrace& trace,
                        const GroundTruthAnnotation& truth,
                        const Detector& detector,
                        const SubRewardParams& sub_params,
                        const TotalRewardWeights& weights) {
  ScoreResult result;
  result.detections = detector.detect(trace);
  const double task = r_task(trace.answer, truth.label);
  const double sub =
      r_sub(result.detections, truth.label, detector.library(), sub_params);
  result.seq = s_seq(trace);
  result.cross = s_cross(trace, result.detections, detector.library());
  result.bind = s_bind(trace, result.detections, truth);
  const double temporal = s_temporal(result.seq, result.cross, result.bind);
  const double format = r_format(trace);
  result.breakdown = r_total(task, sub, temporal, format, weights);
  return result;
}

}  // namespace actlab
