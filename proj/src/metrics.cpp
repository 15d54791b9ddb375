#include "influencerrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "influencerrank/errors.hpp"

namespace infrank {

double engagement_rate(std::span<const std::int64_t> likes, double followers) {
  if (!(followers > 0.0)) throw ContractError("engagement_rate: followers must be positive");
  if (likes.empty()) return 0.0;
  double total = 0.0;
  for (auto l : likes) total += static_cast<double>(l);
  return total / static_cast<double>(likes.size()) / followers;
}

int relevance_level(double e) {
  if (e >= 0.10) return 5;
  if (e >= 0.07) return 4;
  if (e >= 0.05) return 3;
  if (e >= 0.03) return 2;
  if (e >= 0.01) return 1;
  return 0;
}

double dcg_at_k(std::span<const int> relevances, std::size_t k) {
  const std::size_t n = std::min(k, relevances.size());
  double dcg = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    dcg += (std::exp2(relevances[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  return dcg;
}

double ndcg_at_k(std::span<const int> ranking, std::span<const int> ideal, std::size_t k) {
  if (k == 0) throw ContractError("ndcg_at_k: k must be >= 1");
  std::vector<int> sorted(ideal.begin(), ideal.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double best = dcg_at_k(sorted, k);
  if (best == 0.0) return 1.0;
  return dcg_at_k(ranking, k) / best;
}

double rbp(std::span<const double> gains, double p, std::size_t depth) {
  if (!(p > 0.0 && p < 1.0)) throw ContractError("rbp: p must lie in (0, 1)");
  const std::size_t n = depth == 0 ? gains.size() : std::min(depth, gains.size());
  double total = 0.0;
  double weight = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += gains[i] * weight;
    weight *= p;
  }
  return (1.0 - p) * total;
}

FollowerStratum follower_stratum(double followers) {
  if (followers < 20000.0) return FollowerStratum::Micro;
  if (followers <= 100000.0) return FollowerStratum::Mid;
  return FollowerStratum::Macro;
}

std::string stratum_name(FollowerStratum s) {
  switch (s) {
    case FollowerStratum::Micro: return "micro";
    case FollowerStratum::Mid: return "mid";
    case FollowerStratum::Macro: return "macro";
  }
  return "unknown";
}

RankedList rank_by_score(std::span<const std::string> ids, std::span<const double> scores,
                         std::span<const double> engagement) {
  if (ids.size() != scores.size() || ids.size() != engagement.size())
    throw ContractError("rank_by_score: length mismatch");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  RankedList out;
  for (auto i : order) {
    out.ids.push_back(ids[i]);
    out.scores.push_back(scores[i]);
    out.engagement.push_back(engagement[i]);
    out.relevance.push_back(relevance_level(engagement[i]));
  }
  return out;
}

RankingReport evaluate_ranking(const RankedList& list, std::span<const std::size_t> ks,
                               double rbp_p) {
  RankingReport r;
  r.ks.assign(ks.begin(), ks.end());
  for (auto k : ks) r.ndcg.push_back(ndcg_at_k(list.relevance, list.relevance, k));
  r.rbp = rbp(list.engagement, rbp_p);
  return r;
}

}  // namespace infrank
