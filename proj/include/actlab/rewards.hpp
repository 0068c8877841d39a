#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "actlab/detection.hpp"
#include "actlab/subaction.hpp"
#include "actlab/trace.hpp"

namespace actlab {

struct SubRewardParams {
  double alpha = 0.6;  // correct-detection credit
  double beta = 0.2;   // false-positive penalty
  double gamma = 0.2;  // ordering bonus
  friend bool operator==(const SubRewardParams&, const SubRewardParams&) = default;
};

struct TotalRewardWeights {
  double lambda1 = 0.3;  // sub-action reward
  double lambda2 = 0.2;  // temporal consistency
  double lambda3 = 0.1;  // format
  friend bool operator==(const TotalRewardWeights&, const TotalRewardWeights&) = default;
};

struct RewardBreakdown {
  double r_task = 0.0;
  double r_sub = 0.0;
  double s_temporal = 0.0;
  double r_format = 0.0;
  double r_total = 0.0;
  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// Normalized Kendall ordering agreement over the ids common to both lists.
// Empty intersection scores 0, a singleton scores 1, otherwise (tau+1)/2 with
// ties in detected position contributing zero. Ids must be unique per list.
double ordering_score(const std::vector<std::pair<std::string, int>>& detected,
                      const std::vector<std::string>& truth_order);
// Positional convenience overload (detected ranks = list positions).
double ordering_score(const std::vector<std::string>& detected_order,
                      const std::vector<std::string>& truth_order);

// alpha*|D|/|S*| - beta*|F|/|S*| + gamma*P where D are detected phases of the
// truth action, F are detections of any other action, and P the ordering
// score of D against the canonical phase order.
double r_sub(const DetectionResult& result, std::string_view truth_action,
             const SubActionLibrary& lib, const SubRewardParams& params = {});

// 1 when the answer matches the truth label after trim and ASCII case-fold.
double r_task(const std::optional<std::string>& answer, std::string_view truth);

double r_format(const StructuredTrace& trace);

// r_task + lambda1*r_sub + lambda2*s_temporal + lambda3*r_format, with every
// input echoed in the breakdown.
RewardBreakdown r_total(double task, double sub, double temporal, double format,
                        const TotalRewardWeights& weights = {});

}  // namespace actlab
