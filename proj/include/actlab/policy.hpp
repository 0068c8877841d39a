#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "actlab/embedding.hpp"
#include "actlab/environment.hpp"
#include "actlab/rng.hpp"
#include "actlab/subaction.hpp"
#include "actlab/trace.hpp"

namespace actlab {

struct Observation {
  int frames = 0;
  int feature_dim = 0;
  std::vector<double> features;  // frames x feature_dim, row-major
  std::vector<double> pooled;    // feature_dim, mean over frames
  double at(int t, int f) const {
    return features[static_cast<size_t>(t) * static_cast<size_t>(feature_dim) +
                    static_cast<size_t>(f)];
  }
};

// Row t = embedding of frame t's keyword bag (joined with spaces).
Observation featurize(const SyntheticVideo& video, const EmbedderConfig& cfg = {});
// Same shape with every feature zeroed; the stage-1 "text-only" view.
Observation zeroed(const Observation& obs);

struct PhaseSymbol {
  std::string action;
  std::string phase_id;
  std::string description;  // first variant, used when rendering
  int phase_position = 0;   // 0-based position in the action's phase list
};

// Fixed decision vocabulary derived from a library: labels sorted by name,
// phase symbols in (label order, phase order).
class ActionSpace {
 public:
  explicit ActionSpace(const SubActionLibrary& lib);
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<PhaseSymbol>& symbols() const { return symbols_; }
  int label_index(std::string_view name) const;  // -1 when unknown
  int symbol_index(std::string_view action, std::string_view phase_id) const;

 private:
  std::vector<std::string> labels_;
  std::vector<PhaseSymbol> symbols_;
};

struct PolicyShape {
  int slots = 4;
  int phase_options = 0;  // symbol count + 1; the last option is SKIP
  int windows = 4;
  int labels = 0;
  int context_dim = 0;  // feature_dim + 1 trailing constant bias input
  friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
  std::int64_t param_count() const;
};

PolicyShape make_shape(const ActionSpace& space, int feature_dim, int slots = 4,
                       int windows = 4);

// Linear-softmax heads, flattened row-major as [slot][option][context].
struct PolicyParams {
  PolicyShape shape;
  std::vector<double> phase_head;
  std::vector<double> window_head;
  std::vector<double> answer_head;
  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

PolicyParams make_policy(const PolicyShape& shape);  // zero-initialized

// Elementwise helpers shared by the optimizers: dst += scale * src, in-place
// scaling, and the global L2 norm across all three heads.
void add_scaled(PolicyParams& dst, const PolicyParams& src, double scale);
void scale_params(PolicyParams& params, double factor);
double global_norm(const PolicyParams& params);

// One categorical decision per slot for phase symbol and window, then the
// answer. logps holds log-probabilities in decision order: slot0 phase,
// slot0 window, slot1 phase, ..., answer (2*slots + 1 entries).
struct TraceChoice {
  std::vector<int> phase_choice;
  std::vector<int> window_choice;
  int answer_choice = 0;
  std::vector<double> logps;
  double total_logp() const;
  friend bool operator==(const TraceChoice&, const TraceChoice&) = default;
};

// The candidate windows: partition_windows(frames, windows).
std::vector<FrameWindow> window_grid(int frames, int windows = 4);

// Slot m's context is the mean feature row over grid window m (mod the grid
// size) with a trailing 1; the answer context is the pooled row with a
// trailing 1.
std::vector<double> slot_context(const Observation& obs,
                                 const std::vector<FrameWindow>& grid, int slot);
std::vector<double> answer_context(const Observation& obs);

TraceChoice sample_trace(const PolicyParams& params, const Observation& obs,
                         Rng& rng);
// Argmax decoding; ties resolve to the lowest option index.
TraceChoice greedy_trace(const PolicyParams& params, const Observation& obs);

// Exact sum of per-decision categorical log-probabilities. When per_decision
// is given it receives the 2*slots+1 individual values.
double logprob(const PolicyParams& params, const Observation& obs,
               const TraceChoice& choice,
               std::vector<double>* per_decision = nullptr);

// Analytic gradient of logprob with respect to every parameter.
PolicyParams grad_logprob(const PolicyParams& params, const Observation& obs,
                          const TraceChoice& choice);

// accum += scale * sum_d coefs[d] * grad logp_d, one coefficient per decision
// in TraceChoice order. The workhorse behind both training objectives.
void accumulate_policy_grad(const PolicyParams& params, const Observation& obs,
                            const TraceChoice& choice,
                            const std::vector<double>& coefs, double scale,
                            PolicyParams& accum);

// Sum over every decision slot of KL(softmax_p || softmax_q) under obs.
double kl_divergence(const PolicyParams& p, const PolicyParams& q,
                     const Observation& obs);
// Same value; also adds scale * dKL/dp into accum.
double kl_divergence_grad(const PolicyParams& p, const PolicyParams& q,
                          const Observation& obs, double scale,
                          PolicyParams& accum);

// Canonical rendering: each non-SKIP slot emits one step carrying its grid
// window, the @subject entity and the symbol's description; the answer names
// the chosen label.
StructuredTrace render_trace(const TraceChoice& choice, const ActionSpace& space,
                             const std::vector<FrameWindow>& grid);

struct Checkpoint {
  PolicyParams params;
  int frames = 0;
  EmbedderConfig embed;
  std::vector<std::string> labels;
  std::vector<std::string> symbols;  // "action/phase_id"
};

std::string serialize_checkpoint(const PolicyParams& params,
                                 const ActionSpace& space, int frames,
                                 const EmbedderConfig& embed);
Checkpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const PolicyParams& params, const ActionSpace& space,
                     int frames, const EmbedderConfig& embed,
                     const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
// Throws InvariantViolation when the checkpoint vocabulary does not match the
// space rebuilt from the library in use.
void verify_checkpoint(const Checkpoint& ck, const ActionSpace& space);

}  // namespace actlab
