#include "actlab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "actlab/errors.hpp"

namespace actlab {

namespace {

using nlohmann::ordered_json;

void check_obs(const PolicyShape& shape, const Observation& obs) {
  if (obs.feature_dim + 1 != shape.context_dim) {
    throw DimensionMismatchError(
        "observation feature dim " + std::to_string(obs.feature_dim) +
        " does not fit context dim " + std::to_string(shape.context_dim));
  }
  if (obs.frames < shape.windows) {
    throw DimensionMismatchError("observation has " + std::to_string(obs.frames) +
                                 " frames but the policy uses " +
                                 std::to_string(shape.windows) + " windows");
  }
}

void check_choice(const PolicyShape& shape, const TraceChoice& choice) {
  if (static_cast<int>(choice.phase_choice.size()) != shape.slots ||
      static_cast<int>(choice.window_choice.size()) != shape.slots) {
    throw IndexOutOfRangeError("choice does not cover " +
                               std::to_string(shape.slots) + " slots");
  }
  for (int m = 0; m < shape.slots; ++m) {
    if (choice.phase_choice[static_cast<size_t>(m)] < 0 ||
        choice.phase_choice[static_cast<size_t>(m)] >= shape.phase_options) {
      throw IndexOutOfRangeError("phase choice out of range in slot " +
                                 std::to_string(m));
    }
    if (choice.window_choice[static_cast<size_t>(m)] < 0 ||
        choice.window_choice[static_cast<size_t>(m)] >= shape.windows) {
      throw IndexOutOfRangeError("window choice out of range in slot " +
                                 std::to_string(m));
    }
  }
  if (choice.answer_choice < 0 || choice.answer_choice >= shape.labels) {
    throw IndexOutOfRangeError("answer choice out of range");
  }
}

// Stable log-softmax of head row block `w` (options x context) applied to ctx.
std::vector<double> log_softmax(const double* w, int options,
                                const std::vector<double>& ctx) {
  const int c = static_cast<int>(ctx.size());
  std::vector<double> z(static_cast<size_t>(options), 0.0);
  for (int o = 0; o < options; ++o) {
    double dot = 0.0;
    const double* row = w + static_cast<size_t>(o) * static_cast<size_t>(c);
    for (int i = 0; i < c; ++i) dot += row[i] * ctx[static_cast<size_t>(i)];
    z[static_cast<size_t>(o)] = dot;
  }
  double zmax = z[0];
  for (double v : z) zmax = std::max(zmax, v);
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - zmax);
  const double lse = zmax + std::log(sum);
  for (double& v : z) v -= lse;
  return z;
}

int sample_from(const std::vector<double>& logp, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (size_t o = 0; o < logp.size(); ++o) {
    cum += std::exp(logp[o]);
    if (u < cum) return static_cast<int>(o);
  }
  return static_cast<int>(logp.size()) - 1;
}

int argmax_of(const std::vector<double>& v) {
  int best = 0;
  for (size_t o = 1; o < v.size(); ++o) {
    if (v[o] > v[static_cast<size_t>(best)]) best = static_cast<int>(o);
  }
  return best;
}

// Enumerates the 2*slots+1 decisions in canonical order, handing each
// visitor the head block, option count, chosen option and context.
template <typename Params, typename Fn>
void for_each_decision(Params& params, const Observation& obs,
                       const TraceChoice& choice, Fn&& fn) {
  const PolicyShape& shape = params.shape;
  const std::vector<FrameWindow> grid = window_grid(obs.frames, shape.windows);
  const size_t c = static_cast<size_t>(shape.context_dim);
  int decision = 0;
  for (int m = 0; m < shape.slots; ++m) {
    const std::vector<double> ctx = slot_context(obs, grid, m);
    fn(decision++,
       params.phase_head.data() +
           static_cast<size_t>(m) * static_cast<size_t>(shape.phase_options) * c,
       shape.phase_options, choice.phase_choice[static_cast<size_t>(m)], ctx);
    fn(decision++,
       params.window_head.data() +
           static_cast<size_t>(m) * static_cast<size_t>(shape.windows) * c,
       shape.windows, choice.window_choice[static_cast<size_t>(m)], ctx);
  }
  fn(decision, params.answer_head.data(), shape.labels, choice.answer_choice,
     answer_context(obs));
}

}  // namespace

Observation featurize(const SyntheticVideo& video, const EmbedderConfig& cfg) {
  Observation obs;
  obs.frames = static_cast<int>(video.frames.size());
  obs.feature_dim = cfg.dims;
  obs.features.resize(static_cast<size_t>(obs.frames) * static_cast<size_t>(cfg.dims));
  obs.pooled.assign(static_cast<size_t>(cfg.dims), 0.0);
  for (int t = 0; t < obs.frames; ++t) {
    std::string joined;
    for (const std::string& kw : video.frames[static_cast<size_t>(t)]) {
      if (!joined.empty()) joined += ' ';
      joined += kw;
    }
    const EmbeddingVector row = embed(joined, cfg);
    std::copy(row.begin(), row.end(),
              obs.features.begin() +
                  static_cast<size_t>(t) * static_cast<size_t>(cfg.dims));
    for (int f = 0; f < cfg.dims; ++f) obs.pooled[static_cast<size_t>(f)] += row[static_cast<size_t>(f)];
  }
  if (obs.frames > 0) {
    for (double& v : obs.pooled) v /= static_cast<double>(obs.frames);
  }
  return obs;
}

Observation zeroed(const Observation& obs) {
  Observation out;
  out.frames = obs.frames;
  out.feature_dim = obs.feature_dim;
  out.features.assign(obs.features.size(), 0.0);
  out.pooled.assign(obs.pooled.size(), 0.0);
  return out;
}

ActionSpace::ActionSpace(const SubActionLibrary& lib) {
  for (const ActionDecomposition& action : lib.actions()) {
    labels_.push_back(action.name);
  }
  std::sort(labels_.begin(), labels_.end());
  for (const std::string& name : labels_) {
    const std::vector<SubActionPhase>& phases = lib.phases_of(name);
    for (size_t i = 0; i < phases.size(); ++i) {
      symbols_.push_back(PhaseSymbol{name, phases[i].id,
                                     phases[i].descriptions.front(),
                                     static_cast<int>(i)});
    }
  }
}

int ActionSpace::label_index(std::string_view name) const {
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int ActionSpace::symbol_index(std::string_view action,
                              std::string_view phase_id) const {
  for (size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].action == action && symbols_[i].phase_id == phase_id) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::int64_t PolicyShape::param_count() const {
  const std::int64_t c = context_dim;
  return static_cast<std::int64_t>(slots) * phase_options * c +
         static_cast<std::int64_t>(slots) * windows * c +
         static_cast<std::int64_t>(labels) * c;
}

PolicyShape make_shape(const ActionSpace& space, int feature_dim, int slots,
                       int windows) {
  PolicyShape shape;
  shape.slots = slots;
  shape.phase_options = static_cast<int>(space.symbols().size()) + 1;
  shape.windows = windows;
  shape.labels = static_cast<int>(space.labels().size());
  shape.context_dim = feature_dim + 1;
  return shape;
}

PolicyParams make_policy(const PolicyShape& shape) {
  PolicyParams params;
  params.shape = shape;
  const size_t c = static_cast<size_t>(shape.context_dim);
  params.phase_head.assign(static_cast<size_t>(shape.slots) *
                               static_cast<size_t>(shape.phase_options) * c,
                           0.0);
  params.window_head.assign(static_cast<size_t>(shape.slots) *
                                static_cast<size_t>(shape.windows) * c,
                            0.0);
  params.answer_head.assign(static_cast<size_t>(shape.labels) * c, 0.0);
  return params;
}

void add_scaled(PolicyParams& dst, const PolicyParams& src, double scale) {
  if (dst.shape != src.shape) throw DimensionMismatchError("add_scaled: shape mismatch");
  for (size_t i = 0; i < dst.phase_head.size(); ++i) dst.phase_head[i] += scale * src.phase_head[i];
  for (size_t i = 0; i < dst.window_head.size(); ++i) dst.window_head[i] += scale * src.window_head[i];
  for (size_t i = 0; i < dst.answer_head.size(); ++i) dst.answer_head[i] += scale * src.answer_head[i];
}

void scale_params(PolicyParams& params, double factor) {
  for (double& v : params.phase_head) v *= factor;
  for (double& v : params.window_head) v *= factor;
  for (double& v : params.answer_head) v *= factor;
}

double global_norm(const PolicyParams& params) {
  double n2 = 0.0;
  for (double v : params.phase_head) n2 += v * v;
  for (double v : params.window_head) n2 += v * v;
  for (double v : params.answer_head) n2 += v * v;
  return std::sqrt(n2);
}

double TraceChoice::total_logp() const {
  double sum = 0.0;
  for (double lp : logps) sum += lp;
  return sum;
}

std::vector<FrameWindow> window_grid(int frames, int windows) {
  return partition_windows(frames, windows);
}

std::vector<double> slot_context(const Observation& obs,
                                 const std::vector<FrameWindow>& grid, int slot) {
  const FrameWindow& w = grid[static_cast<size_t>(slot) % grid.size()];
  std::vector<double> ctx(static_cast<size_t>(obs.feature_dim) + 1, 0.0);
  for (int t = w.start; t < w.end; ++t) {
    for (int f = 0; f < obs.feature_dim; ++f) {
      ctx[static_cast<size_t>(f)] += obs.at(t, f);
    }
  }
  const double count = static_cast<double>(w.length());
  for (int f = 0; f < obs.feature_dim; ++f) ctx[static_cast<size_t>(f)] /= count;
  ctx.back() = 1.0;
  return ctx;
}

std::vector<double> answer_context(const Observation& obs) {
  std::vector<double> ctx(static_cast<size_t>(obs.feature_dim) + 1, 0.0);
  std::copy(obs.pooled.begin(), obs.pooled.end(), ctx.begin());
  ctx.back() = 1.0;
  return ctx;
}

TraceChoice sample_trace(const PolicyParams& params, const Observation& obs,
                         Rng& rng) {
  check_obs(params.shape, obs);
  const PolicyShape& shape = params.shape;
  const std::vector<FrameWindow> grid = window_grid(obs.frames, shape.windows);
  const size_t c = static_cast<size_t>(shape.context_dim);

  TraceChoice choice;
  for (int m = 0; m < shape.slots; ++m) {
    const std::vector<double> ctx = slot_context(obs, grid, m);
    std::vector<double> lp = log_softmax(
        params.phase_head.data() +
            static_cast<size_t>(m) * static_cast<size_t>(shape.phase_options) * c,
        shape.phase_options, ctx);
    int pick = sample_from(lp, rng);
    choice.phase_choice.push_back(pick);
    choice.logps.push_back(lp[static_cast<size_t>(pick)]);

    lp = log_softmax(params.window_head.data() +
                         static_cast<size_t>(m) * static_cast<size_t>(shape.windows) * c,
                     shape.windows, ctx);
    pick = sample_from(lp, rng);
    choice.window_choice.push_back(pick);
    choice.logps.push_back(lp[static_cast<size_t>(pick)]);
  }
  const std::vector<double> lp =
      log_softmax(params.answer_head.data(), shape.labels, answer_context(obs));
  choice.answer_choice = sample_from(lp, rng);
  choice.logps.push_back(lp[static_cast<size_t>(choice.answer_choice)]);
  return choice;
}

TraceChoice greedy_trace(const PolicyParams& params, const Observation& obs) {
  check_obs(params.shape, obs);
  const PolicyShape& shape = params.shape;
  const std::vector<FrameWindow> grid = window_grid(obs.frames, shape.windows);
  const size_t c = static_cast<size_t>(shape.context_dim);

  TraceChoice choice;
  for (int m = 0; m < shape.slots; ++m) {
    const std::vector<double> ctx = slot_context(obs, grid, m);
    std::vector<double> lp = log_softmax(
        params.phase_head.data() +
            static_cast<size_t>(m) * static_cast<size_t>(shape.phase_options) * c,
        shape.phase_options, ctx);
    int pick = argmax_of(lp);
    choice.phase_choice.push_back(pick);
    choice.logps.push_back(lp[static_cast<size_t>(pick)]);

    lp = log_softmax(params.window_head.data() +
                         static_cast<size_t>(m) * static_cast<size_t>(shape.windows) * c,
                     shape.windows, ctx);
    pick = argmax_of(lp);
    choice.window_choice.push_back(pick);
    choice.logps.push_back(lp[static_cast<size_t>(pick)]);
  }
  const std::vector<double> lp =
      log_softmax(params.answer_head.data(), shape.labels, answer_context(obs));
  choice.answer_choice = argmax_of(lp);
  choice.logps.push_back(lp[static_cast<size_t>(choice.answer_choice)]);
  return choice;
}

double logprob(const PolicyParams& params, const Observation& obs,
               const TraceChoice& choice, std::vector<double>* per_decision) {
  check_obs(params.shape, obs);
  check_choice(params.shape, choice);
  if (per_decision) {
    per_decision->assign(static_cast<size_t>(2 * params.shape.slots + 1), 0.0);
  }
  double total = 0.0;
  for_each_decision(params, obs, choice,
                    [&](int decision, const double* head, int options, int chosen,
                        const std::vector<double>& ctx) {
                      const std::vector<double> lp = log_softmax(head, options, ctx);
                      const double v = lp[static_cast<size_t>(chosen)];
                      total += v;
                      if (per_decision) (*per_decision)[static_cast<size_t>(decision)] = v;
                    });
  return total;
}

void accumulate_policy_grad(const PolicyParams& params, const Observation& obs,
                            const TraceChoice& choice,
                            const std::vector<double>& coefs, double scale,
                            PolicyParams& accum) {
  check_obs(params.shape, obs);
  check_choice(params.shape, choice);
  if (accum.shape != params.shape) {
    throw DimensionMismatchError("gradient accumulator shape mismatch");
  }
  if (coefs.size() != static_cast<size_t>(2 * params.shape.slots + 1)) {
    throw LengthMismatchError("expected one coefficient per decision");
  }
  const size_t c = static_cast<size_t>(params.shape.context_dim);
  for_each_decision(
      params, obs, choice,
      [&](int decision, const double* head, int options, int chosen,
          const std::vector<double>& ctx) {
        const std::vector<double> lp = log_softmax(head, options, ctx);
        const double k = coefs[static_cast<size_t>(decision)] * scale;
        double* out = nullptr;
        if (decision == 2 * params.shape.slots) {
          out = accum.answer_head.data();
        } else if (decision % 2 == 0) {
          out = accum.phase_head.data() +
                static_cast<size_t>(decision / 2) *
                    static_cast<size_t>(params.shape.phase_options) * c;
        } else {
          out = accum.window_head.data() +
                static_cast<size_t>(decision / 2) *
                    static_cast<size_t>(params.shape.windows) * c;
        }
        for (int o = 0; o < options; ++o) {
          const double w =
              k * ((o == chosen ? 1.0 : 0.0) - std::exp(lp[static_cast<size_t>(o)]));
          double* row = out + static_cast<size_t>(o) * c;
          for (size_t i = 0; i < c; ++i) row[i] += w * ctx[i];
        }
      });
}

PolicyParams grad_logprob(const PolicyParams& params, const Observation& obs,
                          const TraceChoice& choice) {
  PolicyParams grad = make_policy(params.shape);
  const std::vector<double> ones(static_cast<size_t>(2 * params.shape.slots + 1), 1.0);
  accumulate_policy_grad(params, obs, choice, ones, 1.0, grad);
  return grad;
}

namespace {

// Shared straight path for KL value and gradient; accum may be null.
double kl_impl(const PolicyParams& p, const PolicyParams& q, const Observation& obs,
               double scale, PolicyParams* accum) {
  if (p.shape != q.shape) throw DimensionMismatchError("kl_divergence: shape mismatch");
  check_obs(p.shape, obs);
  const PolicyShape& shape = p.shape;
  const std::vector<FrameWindow> grid = window_grid(obs.frames, shape.windows);
  const size_t c = static_cast<size_t>(shape.context_dim);

  double total = 0.0;
  auto one_slot = [&](const double* wp, const double* wq, int options,
                      const std::vector<double>& ctx, double* out) {
    const std::vector<double> lp = log_softmax(wp, options, ctx);
    const std::vector<double> lq = log_softmax(wq, options, ctx);
    double kl = 0.0;
    for (int o = 0; o < options; ++o) {
      kl += std::exp(lp[static_cast<size_t>(o)]) *
            (lp[static_cast<size_t>(o)] - lq[static_cast<size_t>(o)]);
    }
    total += kl;
    if (out) {
      for (int o = 0; o < options; ++o) {
        const double po = std::exp(lp[static_cast<size_t>(o)]);
        const double a = lp[static_cast<size_t>(o)] - lq[static_cast<size_t>(o)];
        const double w = scale * po * (a - kl);
        double* row = out + static_cast<size_t>(o) * c;
        for (size_t i = 0; i < c; ++i) row[i] += w * ctx[i];
      }
    }
  };

  for (int m = 0; m < shape.slots; ++m) {
    const std::vector<double> ctx = slot_context(obs, grid, m);
    const size_t p_off = static_cast<size_t>(m) * static_cast<size_t>(shape.phase_options) * c;
    one_slot(p.phase_head.data() + p_off, q.phase_head.data() + p_off,
             shape.phase_options, ctx,
             accum ? accum->phase_head.data() + p_off : nullptr);
    const size_t w_off = static_cast<size_t>(m) * static_cast<size_t>(shape.windows) * c;
    one_slot(p.window_head.data() + w_off, q.window_head.data() + w_off,
             shape.windows, ctx,
             accum ? accum->window_head.data() + w_off : nullptr);
  }
  const std::vector<double> ctx = answer_context(obs);
  one_slot(p.answer_head.data(), q.answer_head.data(), shape.labels, ctx,
           accum ? accum->answer_head.data() : nullptr);
  return total;
}

}  // namespace

double kl_divergence(const PolicyParams& p, const PolicyParams& q,
                     const Observation& obs) {
  return kl_impl(p, q, obs, 0.0, nullptr);
}

double kl_divergence_grad(const PolicyParams& p, const PolicyParams& q,
                          const Observation& obs, double scale,
                          PolicyParams& accum) {
  if (accum.shape != p.shape) {
    throw DimensionMismatchError("kl gradient accumulator shape mismatch");
  }
  return kl_impl(p, q, obs, scale, &accum);
}

StructuredTrace render_trace(const TraceChoice& choice, const ActionSpace& space,
                             const std::vector<FrameWindow>& grid) {
  StructuredTrace trace;
  const int skip = static_cast<int>(space.symbols().size());
  for (size_t m = 0; m < choice.phase_choice.size(); ++m) {
    const int pick = choice.phase_choice[m];
    if (pick == skip) continue;
    if (pick < 0 || pick > skip) {
      throw IndexOutOfRangeError("phase choice out of range in slot " +
                                 std::to_string(m));
    }
    const PhaseSymbol& symbol = space.symbols()[static_cast<size_t>(pick)];
    const int w = choice.window_choice[m];
    if (w < 0 || w >= static_cast<int>(grid.size())) {
      throw IndexOutOfRangeError("window choice out of range in slot " +
                                 std::to_string(m));
    }
    TraceStep step;
    step.index = static_cast<int>(trace.steps.size());
    step.text = "@subject " + symbol.description;
    step.frame_window = grid[static_cast<size_t>(w)];
    step.entities = {"subject"};
    trace.steps.push_back(std::move(step));
  }
  if (choice.answer_choice < 0 ||
      choice.answer_choice >= static_cast<int>(space.labels().size())) {
    throw IndexOutOfRangeError("answer choice out of range");
  }
  trace.answer = space.labels()[static_cast<size_t>(choice.answer_choice)];
  trace.format_ok = true;
  return trace;
}

std::string serialize_checkpoint(const PolicyParams& params,
                                 const ActionSpace& space, int frames,
                                 const EmbedderConfig& embed) {
  const PolicyShape& shape = params.shape;
  if (shape.context_dim != embed.dims + 1 ||
      shape.phase_options != static_cast<int>(space.symbols().size()) + 1 ||
      shape.labels != static_cast<int>(space.labels().size())) {
    throw InvariantViolationError("checkpoint: params do not match space/embedder");
  }
  ordered_json doc;
  doc["version"] = 1;
  doc["frames"] = frames;
  doc["embed"] = {{"dims", embed.dims}, {"hash_seed", embed.hash_seed}};
  doc["slots"] = shape.slots;
  doc["windows"] = shape.windows;
  doc["context_dim"] = shape.context_dim;
  doc["labels"] = space.labels();
  ordered_json symbols = ordered_json::array();
  for (const PhaseSymbol& s : space.symbols()) {
    symbols.push_back(s.action + "/" + s.phase_id);
  }
  doc["symbols"] = std::move(symbols);
  doc["phase_head"] = params.phase_head;
  doc["window_head"] = params.window_head;
  doc["answer_head"] = params.answer_head;
  return doc.dump(2) + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedFileError(std::string("checkpoint: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedFileError("checkpoint: not an object");
  static const char* kKeys[] = {"version", "frames",  "embed",      "slots",
                                "windows", "context_dim", "labels", "symbols",
                                "phase_head", "window_head", "answer_head"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const char* k : kKeys) known = known || it.key() == k;
    if (!known) throw MalformedFileError("checkpoint: unknown key '" + it.key() + "'");
  }
  auto need = [&](const char* key) -> const ordered_json& {
    auto it = doc.find(key);
    if (it == doc.end()) {
      throw MalformedFileError(std::string("checkpoint: missing key '") + key + "'");
    }
    return *it;
  };
  if (!need("version").is_number_integer() || need("version").get<int>() != 1) {
    throw MalformedFileError("checkpoint: unsupported version");
  }

  Checkpoint ck;
  ck.frames = need("frames").get<int>();
  const ordered_json& embed = need("embed");
  if (!embed.is_object() || !embed.contains("dims") || !embed.contains("hash_seed")) {
    throw MalformedFileError("checkpoint: bad embed block");
  }
  ck.embed.dims = embed["dims"].get<int>();
  ck.embed.hash_seed = embed["hash_seed"].get<std::uint64_t>();

  PolicyShape shape;
  shape.slots = need("slots").get<int>();
  shape.windows = need("windows").get<int>();
  shape.context_dim = need("context_dim").get<int>();
  ck.labels = need("labels").get<std::vector<std::string>>();
  ck.symbols = need("symbols").get<std::vector<std::string>>();
  shape.labels = static_cast<int>(ck.labels.size());
  shape.phase_options = static_cast<int>(ck.symbols.size()) + 1;
  if (shape.context_dim != ck.embed.dims + 1 || shape.slots < 1 ||
      shape.windows < 1 || shape.labels < 1) {
    throw MalformedFileError("checkpoint: inconsistent shape fields");
  }

  ck.params = make_policy(shape);
  auto read_block = [&](const char* key, std::vector<double>& dst) {
    const std::vector<double> values = need(key).get<std::vector<double>>();
    if (values.size() != dst.size()) {
      throw MalformedFileError(std::string("checkpoint: '") + key + "' holds " +
                               std::to_string(values.size()) + " values, expected " +
                               std::to_string(dst.size()));
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw MalformedFileError(std::string("checkpoint: non-finite value in '") +
                                 key + "'");
      }
    }
    dst = values;
  };
  read_block("phase_head", ck.params.phase_head);
  read_block("window_head", ck.params.window_head);
  read_block("answer_head", ck.params.answer_head);
  return ck;
}

void save_checkpoint(const PolicyParams& params, const ActionSpace& space,
                     int frames, const EmbedderConfig& embed,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out << serialize_checkpoint(params, space, frames, embed);
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading checkpoint: " + path);
  return parse_checkpoint(buf.str());
}

void verify_checkpoint(const Checkpoint& ck, const ActionSpace& space) {
  if (ck.labels != space.labels()) {
    throw InvariantViolationError("checkpoint labels do not match the library");
  }
  std::vector<std::string> expected;
  expected.reserve(space.symbols().size());
  for (const PhaseSymbol& s : space.symbols()) {
    expected.push_back(s.action + "/" + s.phase_id);
  }
  if (ck.symbols != expected) {
    throw InvariantViolationError("checkpoint symbols do not match the library");
  }
}

}  // namespace actlab
