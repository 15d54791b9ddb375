#include "influencerrank/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>

#include "influencerrank/config.hpp"
#include "influencerrank/errors.hpp"
#include "influencerrank/metrics.hpp"
#include "influencerrank/rng.hpp"

namespace infrank {

namespace {

constexpr std::size_t kFavoriteHashtags = 6;
constexpr std::size_t kFavoriteObjects = 2;
constexpr std::size_t kFavoriteUsers = 3;

std::string key(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

std::string hashtag_key(std::size_t i) { return key("#tag", i, 4); }
std::string object_key(std::size_t i) { return key("obj", i, 3); }
std::string user_key(std::size_t i) { return key("user", i, 4); }

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Indices in [0, n) whose topic (index mod categories) equals `topic`.
std::vector<std::size_t> pick_topical(Rng& rng, std::size_t n, std::size_t topic, std::size_t count) {
  std::vector<std::size_t> pool;
  for (std::size_t i = topic % kInfluencerCategories; i < n; i += kInfluencerCategories) pool.push_back(i);
  if (pool.empty())
    for (std::size_t i = 0; i < n; ++i) pool.push_back(i);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < count && k < pool.size(); ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
    std::swap(pool[k], pool[j]);
    out.push_back(pool[k]);
  }
  return out;
}

std::size_t draw_entity(Rng& rng, const std::vector<std::size_t>& favorites, std::size_t n,
                        double p_favorite) {
  if (!favorites.empty() && rng.bernoulli(p_favorite))
    return favorites[static_cast<std::size_t>(rng.below(favorites.size()))];
  return static_cast<std::size_t>(rng.below(n));
}

struct TrendBlock {
  std::size_t start;
  std::size_t size;
  std::size_t modulus;
  bool contains(std::size_t i) const { return (i + modulus - start) % modulus < size; }
};

TrendBlock trend_block(const WorldConfig& cfg, int t) {
  const std::size_t size = std::max<std::size_t>(1, cfg.n_hashtags / 100);
  const std::size_t shift = std::max<std::size_t>(1, size / 10);
  return {(static_cast<std::size_t>(t) * shift) % cfg.n_hashtags, size, cfg.n_hashtags};
}

}  // namespace

void WorldConfig::validate() const {
  if (n_influencers < 1 || n_hashtags < 1 || n_objects < 1 || n_other_users < 1 || n_windows < 1)
    throw ContractError("WorldConfig: counts must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ContractError("WorldConfig: rho must lie in [0, 1]");
  if (!(noise >= 0.0)) throw ContractError("WorldConfig: noise must be >= 0");
  if (!(posts_per_window >= 1.0)) throw ContractError("WorldConfig: posts_per_window must be >= 1");
  if (!(trending_boost >= 0.0)) throw ContractError("WorldConfig: trending_boost must be >= 0");
}

double planted_engagement(double quality, double boost, double base_logit) {
  return logistic(quality + boost + base_logit);
}

std::vector<std::string> trending_hashtags(const WorldConfig& cfg, int t) {
  const TrendBlock b = trend_block(cfg, t);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < b.size; ++k) out.push_back(hashtag_key((b.start + k) % b.modulus));
  std::sort(out.begin(), out.end());
  return out;
}

World generate_world(const WorldConfig& cfg) {
  cfg.validate();
  World w;
  w.config = cfg;
  const std::size_t n = cfg.n_influencers;
  const std::size_t k = cfg.n_windows;

  struct Tastes {
    std::size_t category;
    std::vector<std::size_t> hashtags, objects, users;
    // Chance that a post joins the current trend.
    double trend_propensity = 0.0;
  };
  std::vector<Tastes> tastes(n);
  Rng profile_rng = Rng::derive(cfg.seed, "profiles");
  for (std::size_t u = 0; u < n; ++u) {
    Profile p;
    p.influencer_id = key("inf", u, 4);
    auto& taste = tastes[u];
    taste.category = static_cast<std::size_t>(profile_rng.below(kInfluencerCategories));
    p.category = std::string(kInfluencerCategoryLabels[taste.category]);
    // Log-uniform over [1e3, 1e6] covers the micro / mid / macro strata.
    const auto followers = static_cast<std::int64_t>(std::llround(std::pow(10.0, profile_rng.uniform(3.0, 6.0))));
    p.followers_by_window.assign(k, followers);
    p.followees = 100 + static_cast<std::int64_t>(profile_rng.below(1900));
    p.total_posts = 50 + static_cast<std::int64_t>(profile_rng.below(1950));
    taste.hashtags = pick_topical(profile_rng, cfg.n_hashtags, taste.category, kFavoriteHashtags);
    taste.objects = pick_topical(profile_rng, cfg.n_objects, taste.category, kFavoriteObjects);
    taste.users = pick_topical(profile_rng, cfg.n_other_users, taste.category, kFavoriteUsers);
    taste.trend_propensity = profile_rng.uniform(0.0, 1.0);
    w.profiles.push_back(std::move(p));
  }

  Rng quality_rng = Rng::derive(cfg.seed, "quality");
  const double innovation = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
  w.quality.assign(n, std::vector<double>(k));
  for (std::size_t u = 0; u < n; ++u) {
    w.quality[u][0] = quality_rng.normal();
    for (std::size_t t = 1; t < k; ++t)
      w.quality[u][t] = cfg.rho * w.quality[u][t - 1] + innovation * quality_rng.normal();
  }

  w.boost.assign(n, std::vector<double>(k, 0.0));
  w.engagement.assign(n, std::vector<double>(k, 0.0));
  const double like_sigma = cfg.noise;
  const double window_sigma = 2.0 * cfg.noise;

  for (std::size_t t = 0; t < k; ++t) {
    const TrendBlock trend = trend_block(cfg, static_cast<int>(t));
    for (std::size_t u = 0; u < n; ++u) {
      Rng rng = Rng::derive(cfg.seed, "posts/" + std::to_string(u) + "/" + std::to_string(t));
      const Tastes& taste = tastes[u];
      const Profile& profile = w.profiles[u];
      const double q = w.quality[u][t];
      // Window-level observation offset shared by this window's features.
      const double observed = q + window_sigma * rng.normal();
      const int n_posts = 1 + rng.poisson(cfg.posts_per_window - 1.0);

      std::vector<Post> posts;
      std::size_t trending_posts = 0;
      for (int i = 0; i < n_posts; ++i) {
        Post p;
        p.influencer_id = profile.influencer_id;
        p.window_index = static_cast<int>(t);

        // A trending tag takes one of the post's slots, so the tag count does
        // not reveal trend participation.
        std::set<std::size_t> tags;
        const int n_tags = 1 + static_cast<int>(rng.below(3));
        const bool joins_trend = rng.bernoulli(taste.trend_propensity);
        if (joins_trend) tags.insert((trend.start + rng.below(trend.size)) % trend.modulus);
        const auto want = std::min<std::size_t>(static_cast<std::size_t>(n_tags), cfg.n_hashtags);
        while (tags.size() < want) tags.insert(draw_entity(rng, taste.hashtags, cfg.n_hashtags, 0.8));
        bool trending = false;
        for (auto h : tags) {
          p.hashtags.push_back(hashtag_key(h));
          trending = trending || trend.contains(h);
        }
        trending_posts += trending ? 1 : 0;

        std::set<std::size_t> users;
        const int n_mentions = static_cast<int>(rng.below(3));
        for (int j = 0; j < n_mentions; ++j) users.insert(draw_entity(rng, taste.users, cfg.n_other_users, 0.7));
        for (auto m : users) p.mentions.push_back(user_key(m));

        std::set<std::size_t> objects;
        const int n_objects = 1 + static_cast<int>(rng.below(2));
        for (int j = 0; j < n_objects; ++j) objects.insert(draw_entity(rng, taste.objects, cfg.n_objects, 0.7));
        for (auto o : objects) p.image_objects.push_back(object_key(o));

        const double post_obs = observed + cfg.noise * rng.normal();
        ImageStats img;
        img.brightness = std::clamp(120.0 + 20.0 * post_obs + 10.0 * rng.normal(), 0.0, 255.0);
        img.colorfulness = std::max(0.0, 40.0 + 10.0 * post_obs + 5.0 * rng.normal());
        img.color_temperature = std::max(1500.0, 5500.0 + 300.0 * post_obs + 200.0 * rng.normal());
        p.image = img;

        p.caption_stats.n_hashtags = static_cast<int>(p.hashtags.size());
        p.caption_stats.n_usertags = static_cast<int>(p.mentions.size());
        p.caption_stats.n_emojis = rng.poisson(std::max(0.1, 2.0 + 0.5 * post_obs));
        p.caption_stats.length =
            std::max(1, static_cast<int>(std::lround(120.0 + 30.0 * post_obs + 40.0 * rng.normal())));
        p.caption_stats.sentiment = std::tanh(0.3 * post_obs + 0.5 * rng.normal());

        p.post_category = std::string(rng.bernoulli(0.7)
                                          ? kPostCategoryLabels[taste.category]
                                          : kPostCategoryLabels[rng.below(kPostCategories)]);
        p.is_ad = rng.bernoulli(logistic(-1.5 - 0.5 * post_obs));
        p.has_influencer_reply = rng.bernoulli(logistic(0.5 * post_obs));
        p.timestamp = static_cast<std::int64_t>(t) * kWindowSeconds +
                      static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(kWindowSeconds)));
        posts.push_back(std::move(p));
      }

      const double boost = cfg.trending_boost * static_cast<double>(trending_posts) / n_posts;
      w.boost[u][t] = boost;
      const double rate = planted_engagement(q, boost, cfg.base_logit);
      const double followers = static_cast<double>(profile.followers_at(static_cast<int>(t)));
      std::vector<std::int64_t> likes;
      for (auto& p : posts) {
        const double noise = std::exp(like_sigma * rng.normal() - 0.5 * like_sigma * like_sigma);
        p.likes = std::llround(followers * rate * noise);
        likes.push_back(p.likes);
        // The boost stays out of every per-node feature; only hashtag edges carry it.
        const int n_comments = 2 + rng.poisson(4.0);
        for (int c = 0; c < n_comments; ++c)
          p.comment_sentiments.push_back(std::clamp(std::tanh(0.4 * observed + 0.5 * rng.normal()), -1.0, 1.0));
      }
      w.engagement[u][t] = engagement_rate(likes, followers);
      for (auto& p : posts) w.posts.push_back(std::move(p));
    }
  }
  return w;
}

std::vector<GroundTruth> World::ground_truth() const {
  std::vector<GroundTruth> rows;
  for (std::size_t u = 0; u < profiles.size(); ++u)
    for (std::size_t t = 0; t < engagement[u].size(); ++t)
      rows.push_back({profiles[u].influencer_id, static_cast<int>(t), engagement[u][t], quality[u][t],
                      boost[u][t]});
  return rows;
}

std::vector<Post> World::window_posts(int t) const {
  std::vector<Post> out;
  for (const auto& p : posts)
    if (p.window_index == t) out.push_back(p);
  return out;
}

std::vector<std::string> planted_ideal_ranking(const World& world, int t) {
  if (t < 0 || static_cast<std::size_t>(t) >= world.config.n_windows)
    throw ContractError("planted_ideal_ranking: window " + std::to_string(t) + " out of range");
  std::vector<std::size_t> order(world.profiles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto ut = static_cast<std::size_t>(t);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (world.engagement[a][ut] != world.engagement[b][ut])
      return world.engagement[a][ut] > world.engagement[b][ut];
    return world.profiles[a].influencer_id < world.profiles[b].influencer_id;
  });
  std::vector<std::string> ids;
  for (auto i : order) ids.push_back(world.profiles[i].influencer_id);
  return ids;
}

void save_world(const World& world, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  write_posts(dir / "posts.jsonl", world.posts);
  write_profiles(dir / "profiles.jsonl", world.profiles);
  write_ground_truth(dir / "ground_truth.jsonl", world.ground_truth());
  std::ofstream cfg(dir / "world.json", std::ios::binary | std::ios::trunc);
  if (!cfg) throw DataError("cannot write " + (dir / "world.json").string());
  cfg << to_json(world.config).dump(2) << '\n';
}

World load_world(const std::filesystem::path& dir) {
  World w;
  std::ifstream cfg(dir / "world.json");
  if (!cfg) throw DataError("cannot open " + (dir / "world.json").string());
  auto j = nlohmann::json::parse(cfg, nullptr, false);
  if (j.is_discarded()) throw DataError("world.json is not valid JSON");
  w.config = world_config_from_json(j);
  w.posts = read_posts(dir / "posts.jsonl");
  w.profiles = read_profiles(dir / "profiles.jsonl");

  std::map<std::string, std::size_t> index;
  for (std::size_t u = 0; u < w.profiles.size(); ++u) index[w.profiles[u].influencer_id] = u;
  const std::size_t k = w.config.n_windows;
  w.quality.assign(w.profiles.size(), std::vector<double>(k, 0.0));
  w.boost = w.quality;
  w.engagement = w.quality;
  for (const auto& g : read_ground_truth(dir / "ground_truth.jsonl")) {
    auto it = index.find(g.influencer_id);
    if (it == index.end()) throw DataError("ground truth for unknown influencer '" + g.influencer_id + "'");
    if (g.window < 0 || static_cast<std::size_t>(g.window) >= k)
      throw DataError("ground truth window " + std::to_string(g.window) + " out of range");
    const auto t = static_cast<std::size_t>(g.window);
    w.quality[it->second][t] = g.quality;
    w.boost[it->second][t] = g.boost;
    w.engagement[it->second][t] = g.engagement_rate;
  }
  return w;
}

}  // namespace infrank
