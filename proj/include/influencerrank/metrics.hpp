#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace infrank {

// Mean likes per post divided by followers. No posts gives 0.
double engagement_rate(std::span<const std::int64_t> likes, double followers);

// Graded relevance 0..5 from engagement-rate thresholds
// 0.01, 0.03, 0.05, 0.07, 0.10.
int relevance_level(double engagement);

// Exponential-gain DCG: sum of (2^rel - 1) / log2(rank + 1) over the first k.
double dcg_at_k(std::span<const int> relevances, std::size_t k);
// DCG@k of `ranking` over DCG@k of `ideal` sorted descending. An all-zero
// ideal is defined as 1.
double ndcg_at_k(std::span<const int> ranking, std::span<const int> ideal, std::size_t k);

// Rank-biased precision (1 - p) * sum gain_i p^(i-1) over the first `depth`
// gains (all of them when depth is 0).
double rbp(std::span<const double> gains, double p = 0.95, std::size_t depth = 0);

enum class FollowerStratum { Micro, Mid, Macro };
// <20k micro, 20k..100k mid, >100k macro.
FollowerStratum follower_stratum(double followers);
std::string stratum_name(FollowerStratum s);

/// Influencers ordered by predicted score.
struct RankedList {
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::vector<double> engagement;
  std::vector<int> relevance;
};

// Sorts by score descending, ties by ascending id.
RankedList rank_by_score(std::span<const std::string> ids, std::span<const double> scores,
                         std::span<const double> engagement);

struct RankingReport {
  std::vector<std::size_t> ks;
  std::vector<double> ndcg;
  double rbp = 0.0;
};

RankingReport evaluate_ranking(const RankedList& list, std::span<const std::size_t> ks,
                               double rbp_p = 0.95);

}  // namespace infrank
