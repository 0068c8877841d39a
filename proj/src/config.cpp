#include "actlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "actlab/errors.hpp"

namespace actlab {

namespace {

using nlohmann::ordered_json;

void reject_unknown(const ordered_json& obj,
                    std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

const ordered_json* maybe(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

int read_int(const ordered_json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

double read_double(const ordered_json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

bool read_bool(const ordered_json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
  return v.get<bool>();
}

std::uint64_t read_seed(const ordered_json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  throw ConfigError(where + ": expected a non-negative integer");
}

StageConfig read_stage(const ordered_json& v, const std::string& where,
                       StageConfig defaults) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown(v, {"iterations", "learning_rate"}, where);
  StageConfig stage = defaults;
  if (const auto* p = maybe(v, "iterations")) stage.iterations = read_int(*p, where + ".iterations");
  if (const auto* p = maybe(v, "learning_rate")) stage.learning_rate = read_double(*p, where + ".learning_rate");
  return stage;
}

}  // namespace

TrainConfig TrainConfig::parse(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc,
                 {"seed", "frames", "batch_size", "embed", "noise", "stage1",
                  "stage2", "stage3", "clip_eps", "kl_coef", "group_size",
                  "max_grad_norm", "rewards", "ablation", "eval_episodes"},
                 "config");

  TrainConfig cfg;
  if (const auto* p = maybe(doc, "seed")) cfg.seed = read_seed(*p, "config.seed");
  if (const auto* p = maybe(doc, "frames")) cfg.frames = read_int(*p, "config.frames");
  if (const auto* p = maybe(doc, "batch_size")) cfg.batch_size = read_int(*p, "config.batch_size");
  if (const auto* p = maybe(doc, "embed")) {
    if (!p->is_object()) throw ConfigError("config.embed: expected an object");
    reject_unknown(*p, {"dims", "hash_seed"}, "config.embed");
    if (const auto* q = maybe(*p, "dims")) cfg.embed.dims = read_int(*q, "config.embed.dims");
    if (const auto* q = maybe(*p, "hash_seed")) cfg.embed.hash_seed = read_seed(*q, "config.embed.hash_seed");
  }
  if (const auto* p = maybe(doc, "noise")) {
    if (!p->is_object()) throw ConfigError("config.noise: expected an object");
    reject_unknown(*p, {"drop", "distract"}, "config.noise");
    if (const auto* q = maybe(*p, "drop")) cfg.noise.drop = read_double(*q, "config.noise.drop");
    if (const auto* q = maybe(*p, "distract")) cfg.noise.distract = read_double(*q, "config.noise.distract");
  }
  if (const auto* p = maybe(doc, "stage1")) cfg.stage1 = read_stage(*p, "config.stage1", cfg.stage1);
  if (const auto* p = maybe(doc, "stage2")) cfg.stage2 = read_stage(*p, "config.stage2", cfg.stage2);
  if (const auto* p = maybe(doc, "stage3")) cfg.stage3 = read_stage(*p, "config.stage3", cfg.stage3);
  if (const auto* p = maybe(doc, "clip_eps")) cfg.clip_eps = read_double(*p, "config.clip_eps");
  if (const auto* p = maybe(doc, "kl_coef")) cfg.kl_coef = read_double(*p, "config.kl_coef");
  if (const auto* p = maybe(doc, "group_size")) cfg.group_size = read_int(*p, "config.group_size");
  if (const auto* p = maybe(doc, "max_grad_norm")) cfg.max_grad_norm = read_double(*p, "config.max_grad_norm");
  if (const auto* p = maybe(doc, "rewards")) {
    if (!p->is_object()) throw ConfigError("config.rewards: expected an object");
    reject_unknown(*p, {"alpha", "beta", "gamma", "lambda1", "lambda2", "lambda3"},
                   "config.rewards");
    if (const auto* q = maybe(*p, "alpha")) cfg.sub_rewards.alpha = read_double(*q, "config.rewards.alpha");
    if (const auto* q = maybe(*p, "beta")) cfg.sub_rewards.beta = read_double(*q, "config.rewards.beta");
    if (const auto* q = maybe(*p, "gamma")) cfg.sub_rewards.gamma = read_double(*q, "config.rewards.gamma");
    if (const auto* q = maybe(*p, "lambda1")) cfg.weights.lambda1 = read_double(*q, "config.rewards.lambda1");
    if (const auto* q = maybe(*p, "lambda2")) cfg.weights.lambda2 = read_double(*q, "config.rewards.lambda2");
    if (const auto* q = maybe(*p, "lambda3")) cfg.weights.lambda3 = read_double(*q, "config.rewards.lambda3");
  }
  if (const auto* p = maybe(doc, "ablation")) {
    if (!p->is_object()) throw ConfigError("config.ablation: expected an object");
    reject_unknown(*p,
                   {"disable_sub_reward", "disable_temporal_reward",
                    "disable_format_reward", "skip_stage1", "skip_stage2"},
                   "config.ablation");
    if (const auto* q = maybe(*p, "disable_sub_reward")) cfg.ablation.disable_sub_reward = read_bool(*q, "config.ablation.disable_sub_reward");
    if (const auto* q = maybe(*p, "disable_temporal_reward")) cfg.ablation.disable_temporal_reward = read_bool(*q, "config.ablation.disable_temporal_reward");
    if (const auto* q = maybe(*p, "disable_format_reward")) cfg.ablation.disable_format_reward = read_bool(*q, "config.ablation.disable_format_reward");
    if (const auto* q = maybe(*p, "skip_stage1")) cfg.ablation.skip_stage1 = read_bool(*q, "config.ablation.skip_stage1");
    if (const auto* q = maybe(*p, "skip_stage2")) cfg.ablation.skip_stage2 = read_bool(*q, "config.ablation.skip_stage2");
  }
  if (const auto* p = maybe(doc, "eval_episodes")) cfg.eval_episodes = read_int(*p, "config.eval_episodes");

  cfg.validate();
  return cfg;
}

TrainConfig TrainConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file: " + path);
  return parse(buf.str());
}

std::string TrainConfig::serialize() const {
  ordered_json doc;
  doc["seed"] = seed;
  doc["frames"] = frames;
  doc["batch_size"] = batch_size;
  doc["embed"] = {{"dims", embed.dims}, {"hash_seed", embed.hash_seed}};
  doc["noise"] = {{"drop", noise.drop}, {"distract", noise.distract}};
  doc["stage1"] = {{"iterations", stage1.iterations}, {"learning_rate", stage1.learning_rate}};
  doc["stage2"] = {{"iterations", stage2.iterations}, {"learning_rate", stage2.learning_rate}};
  doc["stage3"] = {{"iterations", stage3.iterations}, {"learning_rate", stage3.learning_rate}};
  doc["clip_eps"] = clip_eps;
  doc["kl_coef"] = kl_coef;
  doc["group_size"] = group_size;
  doc["max_grad_norm"] = max_grad_norm;
  doc["rewards"] = {{"alpha", sub_rewards.alpha},   {"beta", sub_rewards.beta},
                    {"gamma", sub_rewards.gamma},   {"lambda1", weights.lambda1},
                    {"lambda2", weights.lambda2},   {"lambda3", weights.lambda3}};
  doc["ablation"] = {{"disable_sub_reward", ablation.disable_sub_reward},
                     {"disable_temporal_reward", ablation.disable_temporal_reward},
                     {"disable_format_reward", ablation.disable_format_reward},
                     {"skip_stage1", ablation.skip_stage1},
                     {"skip_stage2", ablation.skip_stage2}};
  doc["eval_episodes"] = eval_episodes;
  return doc.dump(2) + "\n";
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (frames < 4) fail("frames must be at least 4");
  if (batch_size < 1) fail("batch_size must be positive");
  if (embed.dims < 2) fail("embed.dims must be at least 2");
  if (!(noise.drop >= 0.0 && noise.drop <= 1.0)) fail("noise.drop must lie in [0,1]");
  if (!(noise.distract >= 0.0) || !std::isfinite(noise.distract)) {
    fail("noise.distract must be finite and non-negative");
  }
  for (const auto& [stage, name] :
       {std::pair{&stage1, "stage1"}, {&stage2, "stage2"}, {&stage3, "stage3"}}) {
    if (stage->iterations < 0) fail(std::string(name) + ".iterations must be non-negative");
    if (!(stage->learning_rate >= 0.0) || !std::isfinite(stage->learning_rate)) {
      fail(std::string(name) + ".learning_rate must be finite and non-negative");
    }
  }
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) fail("clip_eps must lie in (0,1)");
  if (!(kl_coef >= 0.0) || !std::isfinite(kl_coef)) fail("kl_coef must be finite and non-negative");
  if (group_size < 2) fail("group_size must be at least 2");
  if (!(max_grad_norm > 0.0) || !std::isfinite(max_grad_norm)) fail("max_grad_norm must be positive");
  for (const auto& [value, name] :
       {std::pair{sub_rewards.alpha, "rewards.alpha"},
        {sub_rewards.beta, "rewards.beta"},
        {sub_rewards.gamma, "rewards.gamma"},
        {weights.lambda1, "rewards.lambda1"},
        {weights.lambda2, "rewards.lambda2"},
        {weights.lambda3, "rewards.lambda3"}}) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      fail(std::string(name) + " must be finite and non-negative");
    }
  }
  if (eval_episodes < 0) fail("eval_episodes must be non-negative");
}

TotalRewardWeights TrainConfig::training_weights() const {
  TotalRewardWeights w = weights;
  if (ablation.disable_sub_reward) w.lambda1 = 0.0;
  if (ablation.disable_temporal_reward) w.lambda2 = 0.0;
  if (ablation.disable_format_reward) w.lambda3 = 0.0;
  return w;
}

}  // namespace actlab
