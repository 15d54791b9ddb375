#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "influencerrank/config.hpp"
#include "influencerrank/featurizer.hpp"
#include "influencerrank/hetnet.hpp"
#include "influencerrank/metrics.hpp"
#include "influencerrank/model.hpp"
#include "influencerrank/records.hpp"
#include "influencerrank/synthgen.hpp"
#include "influencerrank/trainer.hpp"

namespace infrank {

/// Ingested posts and profiles, independent of where they came from.
struct Dataset {
  std::vector<Profile> profiles;
  std::vector<Post> posts;
  std::size_t n_windows = 0;
};

Dataset dataset_from_world(const World& world);
// Reads posts.jsonl and profiles.jsonl from `dir`.
Dataset load_dataset(const std::filesystem::path& dir);

// Re-bins posts by timestamp into windows `factor` times the original
// length (0.5 splits, 2 merges). Followers of a new window come from the
// original window containing its start.
Dataset rebin(const Dataset& d, double factor);

struct NetworkOptions {
  double min_freq = 0.01;
  std::vector<NodeKind> drop_kinds;
  std::vector<FeatureCategory> drop_features;
};

// build -> featurize -> prune -> optional kind / feature removal.
Snapshot prepare_snapshot(const Dataset& d, int window, const NetworkOptions& options);

// Engagement of every influencer (ascending id) at `window`.
std::vector<double> window_engagement(const Dataset& d, std::span<const std::string> ids, int window);
std::vector<double> window_followers(const Dataset& d, std::span<const std::string> ids, int window);

/// Train network (inputs ending two windows before the last, labelled by the
/// next window) and eval network (inputs ending one window before the last,
/// labelled by the final window).
struct Split {
  TemporalNetwork train_net;
  std::vector<double> train_labels;
  TemporalNetwork eval_net;
  std::vector<double> eval_labels;
  std::vector<double> eval_followers;
  int train_target = 0;
  int eval_target = 0;
};

// History is capped at what the dataset can supply.
Split make_split(const Dataset& d, std::size_t history, const NetworkOptions& options);

/// A named model/graph ablation.
struct Variant {
  std::string name = "full";
  ForwardOptions forward;
  std::optional<std::size_t> history;
  NetworkOptions network;
};

// full | no-rnn | no-attention | no-gcn | drop-node-kind:<Kind> |
// drop-feature:<category>. Throws ContractError for unknown names.
Variant parse_variant(const std::string& name, double min_freq = 0.01);

struct EvalReport {
  std::string run_id;
  RankingReport overall;
  // micro, mid, macro; strata without members are omitted.
  std::vector<std::pair<std::string, RankingReport>> strata;
};

EvalReport evaluate_scores(const std::string& run_id, std::span<const std::string> ids,
                           std::span<const double> scores, std::span<const double> engagement,
                           std::span<const double> followers, std::span<const std::size_t> ks,
                           double rbp_p);

struct ExperimentResult {
  EvalReport report;
  TrainResult training;
};

// Trains `variant` on split.train_net and evaluates on split.eval_net.
ExperimentResult run_experiment(const Split& split, const RunConfig& cfg, const Variant& variant,
                                const std::string& run_id);
ExperimentResult run_experiment(const Dataset& d, const RunConfig& cfg, const Variant& variant,
                                const std::string& run_id);

// Ranking by followers at the last input window.
std::vector<double> followers_scores(const Dataset& d, const Split& split);

// CSV report: a "# config=<json>" line, header, then one row per report
// (and per stratum when `with_strata`).
std::string report_header(std::span<const std::size_t> ks);
std::string report_rows(const EvalReport& r, bool with_strata);

// Gradient check of the full loss on a tiny instance (about 6 nodes, two
// snapshots, width 4).
struct GradCheckSummary {
  GradCheckResult result;
  std::string worst_param;
  std::size_t nodes = 0;
  std::size_t steps = 0;
};
GradCheckSummary gradcheck_tiny_model(std::uint64_t seed, bool corrupt);

double median(std::vector<double> v);

}  // namespace infrank
