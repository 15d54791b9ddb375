#include "influencerrank/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "influencerrank/errors.hpp"
#include "influencerrank/metrics.hpp"
#include "influencerrank/optim.hpp"

namespace infrank {

void TrainConfig::validate() const {
  if (list_size < 2) throw ContractError("TrainConfig: list_size must be >= 2");
  if (lists_per_batch == 0 || batches_per_epoch == 0)
    throw ContractError("TrainConfig: batch sizes must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ContractError("TrainConfig: learning rate must be finite and >= 0");
  if (history == 0) throw ContractError("TrainConfig: history must be >= 1");
  if (target_offset == 0) throw ContractError("TrainConfig: target_offset must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ContractError("TrainConfig: validation_fraction must lie in [0, 1)");
}

std::vector<LabeledList> sample_lists(std::span<const std::size_t> pool,
                                      std::span<const double> engagement, std::size_t m,
                                      std::size_t n_lists, Rng& rng) {
  if (m == 0) throw ContractError("sample_lists: list size must be >= 1");
  if (pool.size() < m)
    throw ContractError("sample_lists: pool of " + std::to_string(pool.size()) +
                        " is smaller than list size " + std::to_string(m));
  std::vector<LabeledList> lists;
  lists.reserve(n_lists);
  std::vector<std::size_t> scratch(pool.begin(), pool.end());
  for (std::size_t l = 0; l < n_lists; ++l) {
    // Partial Fisher-Yates: the first m slots become a uniform sample.
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(scratch.size() - i));
      std::swap(scratch[i], scratch[j]);
    }
    LabeledList list;
    list.ids.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(m));
    for (auto id : list.ids) {
      if (id >= engagement.size()) throw ContractError("sample_lists: id without engagement label");
      list.engagement.push_back(engagement[id]);
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

std::vector<std::size_t> truth_order(std::span<const double> engagement,
                                     std::span<const std::size_t> ids) {
  std::vector<std::size_t> order(engagement.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (engagement[a] != engagement[b]) return engagement[a] > engagement[b];
    return ids.empty() ? a < b : ids[a] < ids[b];
  });
  return order;
}

namespace {

// Suffix log-sum-exp of scores taken in `order`, relative to the list maximum.
// Working on differences only keeps the loss bit-identical under any exactly
// representable common shift of the scores.
struct Centered {
  std::vector<double> d;    // score - max, in list position
  std::vector<double> lse;  // suffix log-sum-exp of d, in `order` position
};

Centered suffix_lse(std::span<const double> scores, std::span<const std::size_t> order) {
  const std::size_t m = order.size();
  const double top = *std::max_element(scores.begin(), scores.end());
  Centered c;
  c.d.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) c.d[i] = scores[i] - top;
  c.lse.resize(m);
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t i = m; i-- > 0;) {
    const double s = c.d[order[i]];
    const double hi = std::max(running, s);
    const double lo = std::min(running, s);
    running = hi + std::log1p(std::exp(lo - hi));
    c.lse[i] = running;
  }
  return c;
}

void check_lengths(std::span<const double> scores, std::span<const double> engagement,
                   std::span<const std::size_t> ids) {
  if (scores.size() != engagement.size() || (!ids.empty() && ids.size() != scores.size()))
    throw ContractError("listmle: scores, labels and ids differ in length");
  if (scores.empty()) throw ContractError("listmle: empty list");
}

}  // namespace

double listmle_loss(std::span<const double> scores, std::span<const double> engagement,
                    std::span<const std::size_t> ids) {
  check_lengths(scores, engagement, ids);
  const auto order = truth_order(engagement, ids);
  const auto c = suffix_lse(scores, order);
  double loss = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) loss += c.lse[i] - c.d[order[i]];
  return loss;
}

std::vector<double> listmle_gradient(std::span<const double> scores,
                                     std::span<const double> engagement,
                                     std::span<const std::size_t> ids) {
  check_lengths(scores, engagement, ids);
  const auto order = truth_order(engagement, ids);
  const auto c = suffix_lse(scores, order);
  std::vector<double> grad(scores.size(), 0.0);
  // d/ds_pi(j) = sum_{i <= j} softmax over suffix i at j, minus 1.
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double s = c.d[order[j]];
    double g = -1.0;
    for (std::size_t i = 0; i <= j; ++i) g += std::exp(s - c.lse[i]);
    grad[order[j]] = g;
  }
  return grad;
}

Var listmle_batch(Var scores, std::span<const LabeledList> lists) {
  if (lists.empty()) throw ContractError("listmle_batch: no lists");
  if (scores.cols() != 1) throw ShapeError("listmle_batch: scores must be n x 1");
  const auto& sv = scores.value();
  const double inv = 1.0 / static_cast<double>(lists.size());
  double total = 0.0;
  std::vector<LabeledList> kept(lists.begin(), lists.end());
  std::vector<double> gathered;
  for (const auto& l : kept) {
    gathered.clear();
    for (auto id : l.ids) {
      if (id >= sv.rows()) throw ShapeError("listmle_batch: list id outside score vector");
      gathered.push_back(sv(id, 0));
    }
    total += listmle_loss(gathered, l.engagement, l.ids);
  }
  return scores.tape->record(
      DenseMatrix(1, 1, total * inv), {scores.id},
      [si = scores.id, kept = std::move(kept), inv](const DenseMatrix& g, Tape& tp) {
        const auto& s = tp.value(si);
        std::vector<double> local;
        for (const auto& l : kept) {
          local.clear();
          for (auto id : l.ids) local.push_back(s(id, 0));
          const auto grad = listmle_gradient(local, l.engagement, l.ids);
          for (std::size_t i = 0; i < l.ids.size(); ++i)
            tp.accumulate_at(si, l.ids[i], 0, g(0, 0) * inv * grad[i]);
        }
      });
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_influencers(
    std::size_t n, double validation_fraction, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  Rng rng = Rng::derive(seed, "validation-split");
  for (std::size_t i = n; i > 1; --i) std::swap(all[i - 1], all[rng.below(i)]);
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n)));
  std::vector<std::size_t> val(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit(all.begin() + static_cast<std::ptrdiff_t>(n_val), all.end());
  std::sort(val.begin(), val.end());
  std::sort(fit.begin(), fit.end());
  return {fit, val};
}

namespace {

std::pair<double, double> validation_ndcg(const TemporalNetwork& net, const ModelParams& params,
                                          std::span<const double> engagement,
                                          std::span<const std::size_t> subset,
                                          const ForwardOptions& options) {
  const auto scores = predict(net, params, options);
  std::vector<std::string> ids;
  std::vector<double> s, e;
  for (auto i : subset) {
    ids.push_back(net.influencer_ids[i]);
    s.push_back(scores[i]);
    e.push_back(engagement[i]);
  }
  const RankedList ranked = rank_by_score(ids, s, e);
  return {ndcg_at_k(ranked.relevance, ranked.relevance, 10),
          ndcg_at_k(ranked.relevance, ranked.relevance, 50)};
}

}  // namespace

TrainResult train(const TemporalNetwork& net, std::span<const double> engagement,
                  const TrainConfig& cfg, ModelParams initial, const ForwardOptions& options,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  const std::size_t n_inf = net.influencer_ids.size();
  if (engagement.size() != n_inf)
    throw ContractError("train: need one engagement label per influencer");

  TrainResult result{std::move(initial), {}};
  ModelParams& params = result.params;
  params.feature_scale = fit_feature_scale(net);

  auto [fit, val] = split_influencers(n_inf, cfg.validation_fraction, cfg.seed);
  if (val.empty()) val = fit;
  if (fit.size() < cfg.list_size)
    throw ContractError("train: " + std::to_string(fit.size()) +
                        " training influencers cannot fill lists of " + std::to_string(cfg.list_size));

  Rng list_rng = Rng::derive(cfg.seed, "lists");
  Rng dropout_rng = Rng::derive(cfg.seed, "dropout");
  AdamState adam = AdamState::for_params(params.tensors);
  const auto start = std::chrono::steady_clock::now();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t batch = 1; batch <= cfg.batches_per_epoch; ++batch) {
      const auto lists = sample_lists(fit, engagement, cfg.list_size, cfg.lists_per_batch, list_rng);
      Tape tape;
      const auto bound = bind(tape, params);
      const ForwardResult out = forward(tape, net, params, bound, &dropout_rng, options);
      const Var loss = listmle_batch(out.scores, lists);
      const double value = loss.value()(0, 0);
      if (!std::isfinite(value))
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch));
      GradientMap grads = tape.backward(loss);
      std::vector<DenseMatrix> ordered;
      ordered.reserve(params.size());
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (!grads.at(i).all_finite())
          throw NumericalError("non-finite gradient for '" + params.names[i] + "' at epoch " +
                               std::to_string(epoch) + ", batch " + std::to_string(batch));
        ordered.push_back(std::move(grads.at(i)));
      }
      adam_step(params.tensors, ordered, adam, cfg.learning_rate);
      loss_sum += value;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(cfg.batches_per_epoch);
    const bool due = epoch == cfg.epochs || (cfg.validate_every > 0 && epoch % cfg.validate_every == 0);
    if (due) {
      std::tie(rec.val_ndcg10, rec.val_ndcg50) = validation_ndcg(net, params, engagement, val, options);
    } else {
      rec.val_ndcg10 = rec.val_ndcg50 = nan;
    }
    rec.wall_seconds = cfg.record_wall_time
                           ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                           : nan;
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec, params);
  }
  return result;
}

std::string history_csv(std::span<const EpochRecord> history, const std::string& header_comment) {
  std::ostringstream out;
  out.precision(17);
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "epoch,mean_loss,val_ndcg@10,val_ndcg@50,wall_time_s\n";
  auto cell = [&](double v) {
    if (!std::isnan(v)) out << v;
  };
  for (const auto& r : history) {
    out << r.epoch << ',';
    cell(r.mean_loss);
    out << ',';
    cell(r.val_ndcg10);
    out << ',';
    cell(r.val_ndcg50);
    out << ',';
    cell(r.wall_seconds);
    out << '\n';
  }
  return out.str();
}

}  // namespace infrank
