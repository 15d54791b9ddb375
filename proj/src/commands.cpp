#include "influencerrank/commands.hpp"

#include <fstream>
#include <sstream>

#include "influencerrank/checkpoint.hpp"
#include "influencerrank/errors.hpp"

namespace infrank {

namespace {

std::string config_comment(const RunConfig& cfg) { return "config=" + to_json(cfg).dump(); }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& file, const std::string& text, bool append = false) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
  std::ofstream out(file, append ? std::ios::app : std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
  if (!out) throw DataError("write failed for " + file.string());
}

Dataset require_dataset(const RunConfig& cfg) {
  const auto dir = cfg.data_path();
  if (!std::filesystem::exists(dir / "posts.jsonl") || !std::filesystem::exists(dir / "profiles.jsonl"))
    throw DataError("no dataset in " + dir.string() + " (run generate first)");
  return load_dataset(dir);
}

NetworkOptions network_options(const RunConfig& cfg) {
  NetworkOptions o;
  o.min_freq = cfg.min_freq;
  return o;
}

RunConfig with_seed(RunConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.resolve();
  return cfg;
}

EvalReport median_of(const std::string& run_id, const std::vector<EvalReport>& runs) {
  EvalReport m;
  m.run_id = run_id;
  std::vector<RankingReport> overall;
  for (const auto& r : runs) overall.push_back(r.overall);
  m.overall = median_report(overall);
  for (std::size_t s = 0; s < runs.front().strata.size(); ++s) {
    std::vector<RankingReport> reps;
    for (const auto& r : runs) reps.push_back(r.strata[s].second);
    m.strata.emplace_back(runs.front().strata[s].first, median_report(reps));
  }
  return m;
}

// Appends a block to a report CSV, writing the header when the file is new.
void append_report(const std::filesystem::path& file, const RunConfig& cfg, const std::string& rows) {
  std::string text;
  if (!std::filesystem::exists(file)) text += report_header(cfg.eval_k);
  text += "# " + config_comment(cfg) + "\n" + rows;
  write_text(file, text, true);
}

}  // namespace

RankingReport median_report(const std::vector<RankingReport>& reports) {
  if (reports.empty()) throw ContractError("median_report: no reports");
  RankingReport m;
  m.ks = reports.front().ks;
  for (std::size_t i = 0; i < m.ks.size(); ++i) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(r.ndcg.at(i));
    m.ndcg.push_back(median(v));
  }
  std::vector<double> v;
  for (const auto& r : reports) v.push_back(r.rbp);
  m.rbp = median(v);
  return m;
}

void cmd_generate(const RunConfig& cfg) {
  ensure_dir(cfg.data_path());
  save_world(generate_world(cfg.world), cfg.data_path());
}

TrainResult cmd_train(const RunConfig& cfg) {
  const Dataset d = require_dataset(cfg);
  const Split split = make_split(d, cfg.train.history, network_options(cfg));
  const nlohmann::json config = to_json(cfg);

  auto metadata = [&](std::size_t epoch) {
    return nlohmann::json{{"config", config},
                          {"epoch", epoch},
                          {"train_target_window", split.train_target},
                          {"history", split.train_net.steps()}};
  };
  EpochCallback on_epoch;
  if (cfg.checkpoint_every > 0) {
    on_epoch = [&](const EpochRecord& rec, const ModelParams& params) {
      if (rec.epoch % cfg.checkpoint_every == 0 && rec.epoch != cfg.train.epochs) {
        auto file = cfg.checkpoint_path();
        file += ".epoch" + std::to_string(rec.epoch);
        save_checkpoint(file, {params, metadata(rec.epoch)});
      }
    };
  }
  TrainResult result =
      train(split.train_net, split.train_labels, cfg.train, init_params(cfg.model), {}, on_epoch);
  save_checkpoint(cfg.checkpoint_path(), {result.params, metadata(cfg.train.epochs)});
  write_text(cfg.report_path() / "history.csv", history_csv(result.history, config_comment(cfg)));
  return result;
}

EvalReport cmd_eval(const RunConfig& cfg, const std::string& score_source) {
  if (score_source != "model" && score_source != "oracle" && score_source != "random" &&
      score_source != "followers")
    throw ContractError("unknown score source '" + score_source +
                        "' (expected model, oracle, random or followers)");
  const Dataset d = require_dataset(cfg);
  const Split split = make_split(d, cfg.train.history, network_options(cfg));

  std::vector<double> scores;
  if (score_source == "model") {
    if (!std::filesystem::exists(cfg.checkpoint_path()))
      throw DataError("no checkpoint at " + cfg.checkpoint_path().string());
    const Checkpoint ckpt = load_checkpoint(cfg.checkpoint_path());
    scores = predict(split.eval_net, ckpt.params);
  } else if (score_source == "oracle") {
    scores = split.eval_labels;
  } else if (score_source == "random") {
    Rng rng = Rng::derive(cfg.seed, "random-scores");
    for (std::size_t i = 0; i < split.eval_labels.size(); ++i) scores.push_back(rng.uniform());
  } else {
    scores = followers_scores(d, split);
  }
  EvalReport report = evaluate_scores(score_source, split.eval_net.influencer_ids, scores,
                                      split.eval_labels, split.eval_followers, cfg.eval_k, cfg.rbp_p);
  write_text(cfg.report_path() / "report.csv",
             "# " + config_comment(cfg) + "\n" + report_header(cfg.eval_k) + report_rows(report, true));
  return report;
}

EvalReport cmd_ablate(const RunConfig& cfg, const std::string& variant_name) {
  const Variant variant = parse_variant(variant_name, cfg.min_freq);
  const Dataset d = require_dataset(cfg);
  const Split split = make_split(d, variant.history.value_or(cfg.train.history), variant.network);

  std::vector<EvalReport> runs;
  std::string rows;
  for (std::size_t i = 0; i < cfg.seeds; ++i) {
    const RunConfig run = with_seed(cfg, cfg.seed + i);
    runs.push_back(run_experiment(split, run, variant,
                                  variant.name + "/seed=" + std::to_string(run.seed)).report);
    rows += report_rows(runs.back(), false);
  }
  EvalReport m = median_of(variant.name + "/median", runs);
  rows += report_rows(m, false);
  append_report(cfg.report_path() / "ablation.csv", cfg, rows);
  return m;
}

std::vector<EvalReport> cmd_sweep(const RunConfig& cfg, const std::string& axis) {
  if (axis != "window-length" && axis != "history-length")
    throw ContractError("unknown sweep axis '" + axis + "' (expected window-length or history-length)");
  const Dataset d = require_dataset(cfg);
  const Variant full = parse_variant("full", cfg.min_freq);

  std::vector<std::pair<std::string, Split>> settings;
  if (axis == "window-length") {
    for (double factor : {0.5, 1.0, 2.0}) {
      std::ostringstream name;
      name << "window=" << factor;
      settings.emplace_back(name.str(), make_split(rebin(d, factor), cfg.train.history, full.network));
    }
  } else {
    for (std::size_t n = 1; n <= cfg.train.history; ++n)
      settings.emplace_back("history=" + std::to_string(n), make_split(d, n, full.network));
  }

  std::vector<EvalReport> medians;
  std::string rows;
  for (const auto& [name, split] : settings) {
    std::vector<EvalReport> runs;
    for (std::size_t i = 0; i < cfg.seeds; ++i) {
      const RunConfig run = with_seed(cfg, cfg.seed + i);
      runs.push_back(run_experiment(split, run, full, name + "/seed=" + std::to_string(run.seed)).report);
      rows += report_rows(runs.back(), false);
    }
    medians.push_back(median_of(name + "/median", runs));
    rows += report_rows(medians.back(), false);
  }
  write_text(cfg.report_path() / ("sweep-" + axis + ".csv"),
             "# " + config_comment(cfg) + "\n" + report_header(cfg.eval_k) + rows);
  return medians;
}

std::string gradcheck_failure(const GradCheckSummary& s) {
  std::ostringstream msg;
  msg.precision(6);
  msg << "gradient check failed for '" << s.worst_param << "' entry " << s.result.worst_entry
      << ": autodiff " << s.result.autodiff << " vs finite difference " << s.result.numeric
      << " (relative error " << s.result.max_rel_error << ")";
  return msg.str();
}

GradCheckSummary cmd_gradcheck(const RunConfig& cfg, bool corrupt) {
  GradCheckSummary s = gradcheck_tiny_model(cfg.seed, corrupt);
  if (!(s.result.max_rel_error < kGradCheckThreshold)) throw NumericalError(gradcheck_failure(s));
  return s;
}

}  // namespace infrank
