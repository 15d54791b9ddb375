#include "influencerrank/config.hpp"

#include <set>

#include "influencerrank/errors.hpp"

namespace infrank {

using nlohmann::json;

namespace {

// Reads known keys from `j` into fields; any key not consumed is an error.
class Reader {
 public:
  Reader(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j_.is_object()) throw ContractError(scope_ + ": expected an object");
  }

  template <typename T>
  void operator()(const char* key, T& field) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      field = it->get<T>();
    } catch (const json::exception&) {
      throw ContractError(scope_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ContractError(scope_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const WorldConfig& c) {
  return {{"n_influencers", c.n_influencers}, {"n_hashtags", c.n_hashtags},
          {"n_objects", c.n_objects},         {"n_other_users", c.n_other_users},
          {"n_windows", c.n_windows},         {"posts_per_window", c.posts_per_window},
          {"rho", c.rho},                     {"noise", c.noise},
          {"trending_boost", c.trending_boost}, {"base_logit", c.base_logit},
          {"seed", c.seed}};
}

json to_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim},   {"d_embed", c.d_embed},
          {"gcn_layers", c.gcn_layers}, {"gcn_hidden", c.gcn_hidden},
          {"gru_hidden", c.gru_hidden}, {"attention_hidden", c.attention_hidden},
          {"mlp_hidden", c.mlp_hidden}, {"dropout", c.dropout},
          {"seed", c.seed}};
}

json to_json(const TrainConfig& c) {
  return {{"list_size", c.list_size},
          {"lists_per_batch", c.lists_per_batch},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batches_per_epoch", c.batches_per_epoch},
          {"seed", c.seed},
          {"history", c.history},
          {"target_offset", c.target_offset},
          {"validation_fraction", c.validation_fraction},
          {"validate_every", c.validate_every},
          {"record_wall_time", c.record_wall_time}};
}

json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"out_dir", c.out_dir},
          {"data_dir", c.data_dir},
          {"checkpoint", c.checkpoint},
          {"report_dir", c.report_dir},
          {"eval_k", c.eval_k},
          {"rbp_p", c.rbp_p},
          {"min_freq", c.min_freq},
          {"seeds", c.seeds},
          {"checkpoint_every", c.checkpoint_every},
          {"world", to_json(c.world)},
          {"model", to_json(c.model)},
          {"train", to_json(c.train)}};
}

WorldConfig world_config_from_json(const json& j) {
  WorldConfig c;
  Reader r(j, "world");
  r("n_influencers", c.n_influencers);
  r("n_hashtags", c.n_hashtags);
  r("n_objects", c.n_objects);
  r("n_other_users", c.n_other_users);
  r("n_windows", c.n_windows);
  r("posts_per_window", c.posts_per_window);
  r("rho", c.rho);
  r("noise", c.noise);
  r("trending_boost", c.trending_boost);
  r("base_logit", c.base_logit);
  r("seed", c.seed);
  r.finish();
  return c;
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  Reader r(j, "model");
  r("input_dim", c.input_dim);
  r("d_embed", c.d_embed);
  r("gcn_layers", c.gcn_layers);
  r("gcn_hidden", c.gcn_hidden);
  r("gru_hidden", c.gru_hidden);
  r("attention_hidden", c.attention_hidden);
  r("mlp_hidden", c.mlp_hidden);
  r("dropout", c.dropout);
  r("seed", c.seed);
  r.finish();
  return c;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  Reader r(j, "train");
  r("list_size", c.list_size);
  r("lists_per_batch", c.lists_per_batch);
  r("learning_rate", c.learning_rate);
  r("epochs", c.epochs);
  r("batches_per_epoch", c.batches_per_epoch);
  r("seed", c.seed);
  r("history", c.history);
  r("target_offset", c.target_offset);
  r("validation_fraction", c.validation_fraction);
  r("validate_every", c.validate_every);
  r("record_wall_time", c.record_wall_time);
  r.finish();
  return c;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  r("seed", c.seed);
  r("out_dir", c.out_dir);
  r("data_dir", c.data_dir);
  r("checkpoint", c.checkpoint);
  r("report_dir", c.report_dir);
  r("eval_k", c.eval_k);
  r("rbp_p", c.rbp_p);
  r("min_freq", c.min_freq);
  r("seeds", c.seeds);
  r("checkpoint_every", c.checkpoint_every);
  if (const json* w = r.child("world")) c.world = world_config_from_json(*w);
  if (const json* m = r.child("model")) c.model = model_config_from_json(*m);
  if (const json* t = r.child("train")) c.train = train_config_from_json(*t);
  r.finish();
  return c;
}

std::filesystem::path RunConfig::data_path() const {
  return data_dir.empty() ? std::filesystem::path(out_dir) / "data" : std::filesystem::path(data_dir);
}

std::filesystem::path RunConfig::checkpoint_path() const {
  return checkpoint.empty() ? std::filesystem::path(out_dir) / "model.ckpt"
                            : std::filesystem::path(checkpoint);
}

std::filesystem::path RunConfig::report_path() const {
  return report_dir.empty() ? std::filesystem::path(out_dir) : std::filesystem::path(report_dir);
}

void RunConfig::resolve() {
  world.seed = seed;
  model.seed = seed;
  train.seed = seed;
  world.validate();
  model.validate();
  train.validate();
  if (eval_k.empty()) throw ContractError("config: eval_k must not be empty");
  for (auto k : eval_k)
    if (k == 0) throw ContractError("config: eval_k entries must be >= 1");
  if (!(rbp_p > 0.0 && rbp_p < 1.0)) throw ContractError("config: rbp_p must lie in (0, 1)");
  if (!(min_freq >= 0.0)) throw ContractError("config: min_freq must be >= 0");
  if (seeds == 0) throw ContractError("config: seeds must be >= 1");
}

RunConfig resolve_run_config(const std::vector<json>& patches) {
  json merged = to_json(RunConfig{});
  for (const auto& p : patches) {
    if (!p.is_object()) throw ContractError("config: patch must be a JSON object");
    merged.merge_patch(p);
  }
  RunConfig c = run_config_from_json(merged);
  c.resolve();
  return c;
}

}  // namespace infrank
