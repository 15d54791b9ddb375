#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "influencerrank/autodiff.hpp"
#include "influencerrank/hetnet.hpp"
#include "influencerrank/model.hpp"
#include "influencerrank/rng.hpp"

namespace infrank {

struct TrainConfig {
  std::size_t list_size = 10;
  std::size_t lists_per_batch = 32;
  double learning_rate = 0.001;
  std::size_t epochs = 100;
  std::size_t batches_per_epoch = 1;
  std::uint64_t seed = 0;
  // Number of input snapshots fed to the model.
  std::size_t history = 6;
  // Target window = last input window + target_offset.
  std::size_t target_offset = 1;
  // Share of influencers held out of list sampling for validation NDCG.
  double validation_fraction = 0.2;
  // Validate every n epochs (and always on the last); 0 = last epoch only.
  std::size_t validate_every = 1;
  bool record_wall_time = false;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// m influencers (positions into the network's influencer list) with their
/// target-window engagement rates.
struct LabeledList {
  std::vector<std::size_t> ids;
  std::vector<double> engagement;
};

// Lists drawn independently; ids distinct within a list.
std::vector<LabeledList> sample_lists(std::span<const std::size_t> pool,
                                      std::span<const double> engagement, std::size_t m,
                                      std::size_t n_lists, Rng& rng);

// Ground-truth order: engagement descending, ties by ascending id.
std::vector<std::size_t> truth_order(std::span<const double> engagement,
                                     std::span<const std::size_t> ids);

// Plackett-Luce negative log-likelihood of the ground-truth order,
// sum_i [logsumexp(s_pi(i..m)) - s_pi(i)]. When `ids` is empty ties break
// by position.
double listmle_loss(std::span<const double> scores, std::span<const double> engagement,
                    std::span<const std::size_t> ids = {});
std::vector<double> listmle_gradient(std::span<const double> scores,
                                     std::span<const double> engagement,
                                     std::span<const std::size_t> ids = {});

// Mean ListMLE over `lists`, gathering each list's scores from the n x 1
// `scores` by id.
Var listmle_batch(Var scores, std::span<const LabeledList> lists);

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  // NaN when not validated this epoch.
  double val_ndcg10 = 0.0;
  double val_ndcg50 = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> history;
};

// Called after each epoch; returning false stops training early.
using EpochCallback = std::function<void(const EpochRecord&, const ModelParams&)>;

// `engagement` holds the target-window rate of every influencer of `net`.
// Throws NumericalError on a non-finite loss, naming epoch and batch.
TrainResult train(const TemporalNetwork& net, std::span<const double> engagement,
                  const TrainConfig& cfg, ModelParams initial,
                  const ForwardOptions& options = {}, const EpochCallback& on_epoch = {});

// Deterministic split of influencer positions into (train, validation).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_influencers(
    std::size_t n, double validation_fraction, std::uint64_t seed);

std::string history_csv(std::span<const EpochRecord> history, const std::string& header_comment);

}  // namespace infrank
