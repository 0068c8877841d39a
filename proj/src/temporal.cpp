#include "actlab/temporal.hpp"

#include <algorithm>
#include <set>

#include "actlab/errors.hpp"

namespace actlab {

double kendall_tau(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw LengthMismatchError("kendall_tau: lists have sizes " +
                              std::to_string(xs.size()) + " and " +
                              std::to_string(ys.size()));
  }
  const size_t n = xs.size();
  if (n < 2) throw TooShortError("kendall_tau: need at least 2 elements");
  long long num = 0;
  for (size_t i = 0; i + 1 < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const int sx = xs[i] < xs[j] ? 1 : (xs[i] > xs[j] ? -1 : 0);
      const int sy = ys[i] < ys[j] ? 1 : (ys[i] > ys[j] ? -1 : 0);
      num += sx * sy;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(num) / pairs;
}

double interval_iou(const FrameWindow& a, const FrameWindow& b) {
  const int lo = std::max(a.start, b.start);
  const int hi = std::min(a.end, b.end);
  const int inter = hi > lo ? hi - lo : 0;
  const int uni = a.length() + b.length() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double s_seq(const StructuredTrace& trace) {
  std::vector<double> order;
  std::vector<double> starts;
  for (const TraceStep& step : trace.steps) {
    if (step.frame_window) {
      order.push_back(static_cast<double>(step.index));
      starts.push_back(static_cast<double>(step.frame_window->start));
    }
  }
  if (order.size() < 2) return 1.0;
  return (kendall_tau(order, starts) + 1.0) / 2.0;
}

double s_bind(const StructuredTrace& trace, const DetectionResult& detections,
              const GroundTruthAnnotation& truth) {
  double sum = 0.0;
  int count = 0;
  for (const Detection& d : detections.detections) {
    if (d.action != truth.label) continue;
    const auto it = truth.phase_windows.find(d.phase_id);
    if (it == truth.phase_windows.end()) continue;
    ++count;
    if (d.segment_index < 0 ||
        d.segment_index >= static_cast<int>(trace.steps.size())) {
      continue;  // counts as an ungrounded claim
    }
    const auto& window = trace.steps[static_cast<size_t>(d.segment_index)].frame_window;
    if (window) sum += interval_iou(*window, it->second);
  }
  if (count == 0) return 1.0;
  return sum / static_cast<double>(count);
}

double s_cross(const StructuredTrace& trace, const DetectionResult& detections,
               const SubActionLibrary& lib) {
  (void)lib;  // action ownership already resolved inside each Detection
  // Claimed action per step: defined iff exactly one action is detected there.
  std::map<int, std::set<std::string>> actions_at;
  for (const Detection& d : detections.detections) {
    actions_at[d.segment_index].insert(d.action);
  }
  std::map<int, std::string> claim_at;
  for (const auto& [idx, actions] : actions_at) {
    if (actions.size() == 1) claim_at[idx] = *actions.begin();
  }

  std::map<std::string, std::vector<std::string>> entity_claims;
  for (const TraceStep& step : trace.steps) {
    const auto it = claim_at.find(step.index);
    if (it == claim_at.end()) continue;
    for (const std::string& entity : step.entities) {
      entity_claims[entity].push_back(it->second);
    }
  }

  double sum = 0.0;
  int entities = 0;
  for (const auto& [entity, claims] : entity_claims) {
    if (claims.size() < 2) continue;
    std::map<std::string, int> counts;
    int modal = 0;
    for (const std::string& claim : claims) {
      modal = std::max(modal, ++counts[claim]);
    }
    sum += static_cast<double>(modal) / static_cast<double>(claims.size());
    ++entities;
  }
  if (entities == 0) return 1.0;
  return sum / static_cast<double>(entities);
}

double s_temporal(double seq, double cross, double bind) {
  for (double v : {seq, cross, bind}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw OutOfRangeError("s_temporal: component " + std::to_string(v) +
                            " outside [0,1]");
    }
  }
  return (seq + cross + bind) / 3.0;
}

}  // namespace actlab
