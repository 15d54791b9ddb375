#include "influencerrank/influencerrank.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "influencerrank/checkpoint.hpp"
#include "influencerrank/commands.hpp"
#include "influencerrank/errors.hpp"

struct ir_config {
  std::vector<nlohmann::json> patches;
  infrank::RunConfig resolved;
};

struct ir_world {
  infrank::Dataset dataset;
};

struct ir_model {
  infrank::Checkpoint checkpoint;
};

namespace {

thread_local std::string last_error;

ir_status fail(ir_status code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <typename F>
ir_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return IR_OK;
  } catch (const infrank::ContractError& e) {
    return fail(IR_USAGE, e.what());
  } catch (const infrank::DataError& e) {
    return fail(IR_DATA, e.what());
  } catch (const infrank::NumericalError& e) {
    return fail(IR_NUMERICAL, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(IR_USAGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IR_INTERNAL, e.what());
  } catch (...) {
    return fail(IR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw infrank::ContractError(std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* ir_last_error(void) { return last_error.c_str(); }

void ir_string_free(char* s) { std::free(s); }

const char* ir_version(void) { return "1.0.0"; }

ir_status ir_config_create(ir_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto cfg = std::make_unique<ir_config>();
    cfg->resolved = infrank::resolve_run_config({});
    *out = cfg.release();
  });
}

ir_status ir_config_merge_json(ir_config* cfg, const char* json) {
  return guarded([&] {
    require(cfg, "config");
    require(json, "json");
    auto patch = nlohmann::json::parse(json, nullptr, false);
    if (patch.is_discarded() || !patch.is_object())
      throw infrank::ContractError("config patch is not a JSON object");
    auto patches = cfg->patches;
    patches.push_back(std::move(patch));
    cfg->resolved = infrank::resolve_run_config(patches);
    cfg->patches = std::move(patches);
  });
}

ir_status ir_config_merge_file(ir_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    std::ifstream in(path);
    if (!in) throw infrank::DataError(std::string("cannot open config file ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    auto patch = nlohmann::json::parse(text.str(), nullptr, false);
    if (patch.is_discarded() || !patch.is_object())
      throw infrank::DataError(std::string("config file ") + path + " is not a JSON object");
    auto patches = cfg->patches;
    patches.push_back(std::move(patch));
    cfg->resolved = infrank::resolve_run_config(patches);
    cfg->patches = std::move(patches);
  });
}

ir_status ir_config_to_json(const ir_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = dup_string(infrank::to_json(cfg->resolved).dump(2));
  });
}

void ir_config_destroy(ir_config* cfg) { delete cfg; }

ir_status ir_cmd_generate(const ir_config* cfg) {
  return guarded([&] {
    require(cfg, "config");
    infrank::cmd_generate(cfg->resolved);
  });
}

ir_status ir_cmd_train(const ir_config* cfg) {
  return guarded([&] {
    require(cfg, "config");
    infrank::cmd_train(cfg->resolved);
  });
}

ir_status ir_cmd_eval(const ir_config* cfg, const char* score_source) {
  return guarded([&] {
    require(cfg, "config");
    infrank::cmd_eval(cfg->resolved, score_source ? score_source : "model");
  });
}

ir_status ir_cmd_ablate(const ir_config* cfg, const char* variant) {
  return guarded([&] {
    require(cfg, "config");
    require(variant, "variant");
    infrank::cmd_ablate(cfg->resolved, variant);
  });
}

ir_status ir_cmd_sweep(const ir_config* cfg, const char* axis) {
  return guarded([&] {
    require(cfg, "config");
    require(axis, "axis");
    infrank::cmd_sweep(cfg->resolved, axis);
  });
}

ir_status ir_cmd_gradcheck(const ir_config* cfg, int corrupt, double* max_rel_error) {
  if (max_rel_error) *max_rel_error = 0.0;
  return guarded([&] {
    require(cfg, "config");
    auto s = infrank::gradcheck_tiny_model(cfg->resolved.seed, corrupt != 0);
    if (max_rel_error) *max_rel_error = s.result.max_rel_error;
    if (!(s.result.max_rel_error < infrank::kGradCheckThreshold))
      throw infrank::NumericalError(infrank::gradcheck_failure(s));
  });
}

ir_status ir_world_generate(const ir_config* cfg, ir_world** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    auto w = std::make_unique<ir_world>();
    w->dataset = infrank::dataset_from_world(infrank::generate_world(cfg->resolved.world));
    *out = w.release();
  });
}

ir_status ir_world_load(const char* dir, ir_world** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto w = std::make_unique<ir_world>();
    w->dataset = infrank::load_dataset(dir);
    *out = w.release();
  });
}

ir_status ir_world_save(const ir_world* world, const char* dir) {
  return guarded([&] {
    require(world, "world");
    require(dir, "dir");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw infrank::DataError(std::string("cannot create directory ") + dir);
    infrank::write_profiles(std::filesystem::path(dir) / "profiles.jsonl", world->dataset.profiles);
    infrank::write_posts(std::filesystem::path(dir) / "posts.jsonl", world->dataset.posts);
  });
}

size_t ir_world_influencer_count(const ir_world* world) { return world ? world->dataset.profiles.size() : 0; }
size_t ir_world_post_count(const ir_world* world) { return world ? world->dataset.posts.size() : 0; }
size_t ir_world_window_count(const ir_world* world) { return world ? world->dataset.n_windows : 0; }
void ir_world_destroy(ir_world* world) { delete world; }

ir_status ir_model_load(const char* checkpoint, ir_model** out) {
  return guarded([&] {
    require(checkpoint, "checkpoint");
    require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<ir_model>();
    m->checkpoint = infrank::load_checkpoint(checkpoint);
    *out = m.release();
  });
}

size_t ir_model_parameter_count(const ir_model* model) {
  if (!model) return 0;
  size_t n = 0;
  for (const auto& t : model->checkpoint.params.tensors) n += t.size();
  return n;
}

ir_status ir_model_predict(const ir_model* model, const ir_world* world, const ir_config* cfg,
                           double* scores, size_t n) {
  return guarded([&] {
    require(model, "model");
    require(world, "world");
    require(cfg, "config");
    require(scores, "scores");
    infrank::NetworkOptions opts;
    opts.min_freq = cfg->resolved.min_freq;
    const auto split = infrank::make_split(world->dataset, cfg->resolved.train.history, opts);
    const auto s = infrank::predict(split.eval_net, model->checkpoint.params);
    if (n != s.size())
      throw infrank::ContractError("scores buffer holds " + std::to_string(n) + " values, need " +
                                   std::to_string(s.size()));
    std::copy(s.begin(), s.end(), scores);
  });
}

void ir_model_destroy(ir_model* model) { delete model; }

ir_status ir_engagement_rate(const int64_t* likes, size_t n, double followers, double* out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(likes, "likes");
    *out = infrank::engagement_rate({likes, n}, followers);
  });
}

int ir_relevance_level(double engagement) { return infrank::relevance_level(engagement); }

ir_status ir_ndcg_at_k(const int* ranking, const int* ideal, size_t n, size_t k, double* out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(ranking, "ranking");
      require(ideal, "ideal");
    }
    *out = infrank::ndcg_at_k({ranking, n}, {ideal, n}, k);
  });
}

ir_status ir_rbp(const double* gains, size_t n, double p, double* out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) require(gains, "gains");
    *out = infrank::rbp({gains, n}, p);
  });
}

}  // extern "C"
