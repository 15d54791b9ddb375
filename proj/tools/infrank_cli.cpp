// infrank: batch command-line front end over the influencerrank C API.

#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "influencerrank/influencerrank.h"

namespace {

struct Flags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, data_dir, checkpoint, report_dir;
  std::optional<std::vector<std::size_t>> eval_k;
  std::optional<double> rbp_p, min_freq;
  std::optional<std::size_t> seeds, checkpoint_every;

  std::optional<std::size_t> gcn_layers, hidden_dim;
  std::optional<double> dropout;

  std::optional<std::size_t> list_size, lists_per_batch, epochs, history;
  std::optional<double> lr;

  std::optional<std::size_t> n_influencers, n_hashtags, n_objects, n_other_users, n_windows;
  std::optional<double> posts_per_window, rho, noise, trending_boost;
};

template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

nlohmann::json flags_patch(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  put(j, "seed", f.seed);
  put(j, "out_dir", f.out_dir);
  put(j, "data_dir", f.data_dir);
  put(j, "checkpoint", f.checkpoint);
  put(j, "report_dir", f.report_dir);
  put(j, "eval_k", f.eval_k);
  put(j, "rbp_p", f.rbp_p);
  put(j, "min_freq", f.min_freq);
  put(j, "seeds", f.seeds);
  put(j, "checkpoint_every", f.checkpoint_every);

  nlohmann::json model = nlohmann::json::object();
  put(model, "gcn_layers", f.gcn_layers);
  if (f.hidden_dim)
    for (const char* k : {"d_embed", "gcn_hidden", "gru_hidden", "attention_hidden", "mlp_hidden"})
      model[k] = *f.hidden_dim;
  put(model, "dropout", f.dropout);
  if (!model.empty()) j["model"] = model;

  nlohmann::json train = nlohmann::json::object();
  put(train, "list_size", f.list_size);
  put(train, "lists_per_batch", f.lists_per_batch);
  put(train, "epochs", f.epochs);
  put(train, "history", f.history);
  put(train, "learning_rate", f.lr);
  if (!train.empty()) j["train"] = train;

  nlohmann::json world = nlohmann::json::object();
  put(world, "n_influencers", f.n_influencers);
  put(world, "n_hashtags", f.n_hashtags);
  put(world, "n_objects", f.n_objects);
  put(world, "n_other_users", f.n_other_users);
  put(world, "n_windows", f.n_windows);
  put(world, "posts_per_window", f.posts_per_window);
  put(world, "rho", f.rho);
  put(world, "noise", f.noise);
  put(world, "trending_boost", f.trending_boost);
  if (!world.empty()) j["world"] = world;
  return j;
}

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_file, "JSON config file; flags override its values");
  app.add_option("--seed", f.seed, "Seed for world, model and training");
  app.add_option("--out-dir", f.out_dir, "Output directory (default: run)");
  app.add_option("--data-dir", f.data_dir, "Dataset directory (default: <out-dir>/data)");
  app.add_option("--checkpoint", f.checkpoint, "Checkpoint file (default: <out-dir>/model.ckpt)");
  app.add_option("--report-dir", f.report_dir, "Report directory (default: <out-dir>)");
  app.add_option("--eval-k", f.eval_k, "NDCG cutoffs (default: 1 10 50 100 200)");
  app.add_option("--rbp-p", f.rbp_p, "RBP persistence (default: 0.95)");
  app.add_option("--min-freq", f.min_freq, "Edge pruning threshold (default: 0.01)");
  app.add_option("--seeds", f.seeds, "Seeds per ablation/sweep setting (default: 5)");
  app.add_option("--checkpoint-every", f.checkpoint_every, "Extra checkpoint every n epochs");

  app.add_option("--gcn-layers", f.gcn_layers, "GCN layers (default: 2)");
  app.add_option("--hidden-dim", f.hidden_dim, "Width of every hidden layer (default: 128)");
  app.add_option("--dropout", f.dropout, "Dropout rate (default: 0.5)");

  app.add_option("--list-size", f.list_size, "Influencers per ListMLE list (default: 10)");
  app.add_option("--lists-per-batch", f.lists_per_batch, "Lists per optimizer step (default: 32)");
  app.add_option("--lr", f.lr, "Adam learning rate (default: 0.001)");
  app.add_option("--epochs", f.epochs, "Training epochs (default: 100)");
  app.add_option("--history", f.history, "Input snapshots per ranking (default: 6)");

  app.add_option("--n-influencers", f.n_influencers, "Synthetic influencers (default: 200)");
  app.add_option("--n-hashtags", f.n_hashtags, "Synthetic hashtags (default: 300)");
  app.add_option("--n-objects", f.n_objects, "Synthetic image objects (default: 60)");
  app.add_option("--n-other-users", f.n_other_users, "Synthetic mentioned users (default: 140)");
  app.add_option("--n-windows", f.n_windows, "Synthetic windows (default: 8)");
  app.add_option("--posts-per-window", f.posts_per_window, "Mean posts per influencer and window");
  app.add_option("--rho", f.rho, "Quality autocorrelation (default: 0.9)");
  app.add_option("--noise", f.noise, "Observation and like noise (default: 0.3)");
  app.add_option("--trending-boost", f.trending_boost, "Engagement boost from trending hashtags");
}

int report(ir_status s) {
  if (s != IR_OK) std::fprintf(stderr, "infrank: %s\n", ir_last_error());
  return static_cast<int>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"InfluencerRank: temporal graph influencer ranking on synthetic worlds"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  add_flags(app, flags);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto* generate = app.add_subcommand("generate", "Write a synthetic world to the data dir");
  auto* train = app.add_subcommand("train", "Train on the data dir; write checkpoint and history.csv");
  auto* eval = app.add_subcommand("eval", "Rank the final window; write report.csv");
  std::string scores = "model";
  eval->add_option("--scores", scores, "Score source")
      ->check(CLI::IsMember({"model", "oracle", "random", "followers"}));
  auto* ablate = app.add_subcommand("ablate", "Train and evaluate a model variant; append to ablation.csv");
  std::string variant;
  ablate->add_option("variant", variant,
                     "full | no-rnn | no-attention | no-gcn | drop-node-kind:<kind> | drop-feature:<category>")
      ->required();
  auto* sweep = app.add_subcommand("sweep", "Sweep window length or history length");
  std::string axis;
  sweep->add_option("axis", axis, "window-length | history-length")->required();
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the full model gradient");
  bool corrupt = false;
  gradcheck->add_flag("--corrupt-gradient", corrupt, "Perturb one gradient entry (test hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(IR_USAGE);
  }

  ir_config* cfg = nullptr;
  if (ir_status s = ir_config_create(&cfg); s != IR_OK) return report(s);
  struct Guard {
    ir_config* c;
    ~Guard() { ir_config_destroy(c); }
  } guard{cfg};

  if (!flags.config_file.empty())
    if (ir_status s = ir_config_merge_file(cfg, flags.config_file.c_str()); s != IR_OK) return report(s);
  if (ir_status s = ir_config_merge_json(cfg, flags_patch(flags).dump().c_str()); s != IR_OK)
    return report(s);

  if (generate->parsed()) return report(ir_cmd_generate(cfg));
  if (train->parsed()) return report(ir_cmd_train(cfg));
  if (eval->parsed()) return report(ir_cmd_eval(cfg, scores.c_str()));
  if (ablate->parsed()) return report(ir_cmd_ablate(cfg, variant.c_str()));
  if (sweep->parsed()) return report(ir_cmd_sweep(cfg, axis.c_str()));
  if (gradcheck->parsed()) {
    double err = 0.0;
    const ir_status s = ir_cmd_gradcheck(cfg, corrupt ? 1 : 0, &err);
    if (s == IR_OK) std::printf("gradcheck passed: max relative error %.3e\n", err);
    return report(s);
  }
  return static_cast<int>(IR_USAGE);
}
