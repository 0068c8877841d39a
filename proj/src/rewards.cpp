#include "actlab/rewards.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "actlab/errors.hpp"
#include "actlab/temporal.hpp"

namespace actlab {

namespace {

void check_unique(const std::vector<std::string>& ids, const char* which) {
  std::set<std::string_view> seen;
  for (const std::string& id : ids) {
    if (!seen.insert(id).second) {
      throw DuplicateIdsError(std::string("ordering_score: duplicate id '") +
                              id + "' in " + which + " list");
    }
  }
}

std::string fold(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' ||
                   s[e - 1] == '\n')) {
    --e;
  }
  std::string out(s.substr(b, e - b));
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

}  // namespace

double ordering_score(const std::vector<std::pair<std::string, int>>& detected,
                      const std::vector<std::string>& truth_order) {
  {
    std::set<std::string_view> seen;
    for (const auto& [id, idx] : detected) {
      if (!seen.insert(id).second) {
        throw DuplicateIdsError("ordering_score: duplicate id '" + id +
                                "' in detected list");
      }
    }
  }
  check_unique(truth_order, "truth");

  std::map<std::string_view, int> truth_rank;
  for (size_t i = 0; i < truth_order.size(); ++i) {
    truth_rank[truth_order[i]] = static_cast<int>(i);
  }

  std::vector<double> xs;  // detected position (segment index)
  std::vector<double> ys;  // canonical rank
  for (const auto& [id, idx] : detected) {
    const auto it = truth_rank.find(id);
    if (it == truth_rank.end()) continue;
    xs.push_back(static_cast<double>(idx));
    ys.push_back(static_cast<double>(it->second));
  }
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return 1.0;
  return (kendall_tau(xs, ys) + 1.0) / 2.0;
}

double ordering_score(const std::vector<std::string>& detected_order,
                      const std::vector<std::string>& truth_order) {
  std::vector<std::pair<std::string, int>> detected;
  detected.reserve(detected_order.size());
  for (size_t i = 0; i < detected_order.size(); ++i) {
    detected.emplace_back(detected_order[i], static_cast<int>(i));
  }
  return ordering_score(detected, truth_order);
}

double r_sub(const DetectionResult& result, std::string_view truth_action,
             const SubActionLibrary& lib, const SubRewardParams& params) {
  const std::vector<SubActionPhase>& phases = lib.phases_of(truth_action);
  const double s_star = static_cast<double>(phases.size());

  std::vector<std::pair<std::string, int>> detected;
  int false_positives = 0;
  for (const Detection& d : result.detections) {
    if (d.action == truth_action) {
      detected.emplace_back(d.phase_id, d.segment_index);
    } else {
      ++false_positives;
    }
  }
  std::stable_sort(detected.begin(), detected.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });

  std::vector<std::string> truth_order;
  truth_order.reserve(phases.size());
  for (const SubActionPhase& phase : phases) truth_order.push_back(phase.id);

  const double p = ordering_score(detected, truth_order);
  return params.alpha * (static_cast<double>(detected.size()) / s_star) -
         params.beta * (static_cast<double>(false_positives) / s_star) +
         params.gamma * p;
}

double r_task(const std::optional<std::string>& answer, std::string_view truth) {
  if (!answer) return 0.0;
  return fold(*answer) == fold(truth) ? 1.0 : 0.0;
}

double r_format(const StructuredTrace& trace) {
  return trace.format_ok ? 1.0 : 0.0;
}

RewardBreakdown r_total(double task, double sub, double temporal, double format,
                        const TotalRewardWeights& weights) {
  RewardBreakdown out;
  out.r_task = task;
  out.r_sub = sub;
  out.s_temporal = temporal;
  out.r_format = format;
  out.r_total = task + weights.lambda1 * sub + weights.lambda2 * temporal +
                weights.lambda3 * format;
  return out;
}

}  // namespace actlab
