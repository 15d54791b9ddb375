#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "influencerrank/records.hpp"

namespace infrank {

struct WorldConfig {
  std::size_t n_influencers = 200;
  std::size_t n_hashtags = 300;
  std::size_t n_objects = 60;
  std::size_t n_other_users = 140;
  std::size_t n_windows = 8;
  // Poisson mean of posts per influencer per window; every influencer posts
  // at least once per window.
  double posts_per_window = 4.0;
  // AR(1) coefficient of latent quality.
  double rho = 0.9;
  // Like noise (lognormal sigma) and per-window observation noise on the
  // features are both proportional to this.
  double noise = 0.3;
  // Added to the latent quality of an influencer in proportion to the share
  // of its window posts that carry a trending hashtag.
  double trending_boost = 0.0;
  // Logit offset; sets the typical engagement rate near 0.036.
  double base_logit = -3.3;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

inline constexpr std::int64_t kWindowSeconds = 30LL * 24 * 3600;

/// A generated world: ingestion records plus the planted truth behind them.
struct World {
  WorldConfig config;
  std::vector<Profile> profiles;
  std::vector<Post> posts;
  // [influencer][window], influencers in profile order.
  std::vector<std::vector<double>> quality;
  std::vector<std::vector<double>> boost;
  std::vector<std::vector<double>> engagement;

  std::vector<GroundTruth> ground_truth() const;
  // Posts of window t, in generation order.
  std::vector<Post> window_posts(int t) const;
};

World generate_world(const WorldConfig& cfg);

// Engagement implied by latent quality and trending boost before like noise.
double planted_engagement(double quality, double boost, double base_logit);

// Hashtag keys that trend in window t.
std::vector<std::string> trending_hashtags(const WorldConfig& cfg, int t);

// Influencer ids by true engagement at t, descending, ties by ascending id.
std::vector<std::string> planted_ideal_ranking(const World& world, int t);

// posts.jsonl, profiles.jsonl, ground_truth.jsonl and world.json (config).
void save_world(const World& world, const std::filesystem::path& dir);
World load_world(const std::filesystem::path& dir);

}  // namespace infrank
