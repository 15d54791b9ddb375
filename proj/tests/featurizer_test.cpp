#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "influencerrank/errors.hpp"
#include "influencerrank/featurizer.hpp"
#include "influencerrank/rng.hpp"
#include "influencerrank/synthgen.hpp"

using namespace infrank;

namespace {

std::vector<std::uint8_t> solid(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::size_t pixels = 4) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < pixels; ++i) out.insert(out.end(), {r, g, b});
  return out;
}

Profile profile(const std::string& id, std::int64_t followers) {
  Profile p;
  p.influencer_id = id;
  p.followers_by_window = {followers};
  p.followees = 10;
  p.total_posts = 20;
  p.category = "travel";
  return p;
}

Post plain_post(std::int64_t ts, bool ad = false) {
  Post p;
  p.influencer_id = "u";
  p.timestamp = ts;
  p.is_ad = ad;
  p.post_category = "travel";
  return p;
}

}  // namespace

TEST_SUITE("featurizer") {
  TEST_CASE("image statistics by hand") {
    const auto gray = image_stats(solid(128, 128, 128));
    CHECK(gray.brightness == doctest::Approx(128.0).epsilon(1e-12));
    CHECK(gray.colorfulness == 0.0);

    const auto red = image_stats(solid(255, 0, 0));
    CHECK(red.colorfulness == doctest::Approx(0.3 * std::sqrt(255.0 * 255.0 + 127.5 * 127.5)).epsilon(1e-12));
    CHECK(red.colorfulness == doctest::Approx(85.53).epsilon(1e-4));

    const auto white = image_stats(solid(255, 255, 255));
    CHECK(std::abs(white.color_temperature - 6500.0) <= 150.0);
    CHECK_THROWS_AS(image_stats(std::vector<std::uint8_t>{}), ContractError);
  }

  TEST_CASE("achromatic images have zero colorfulness") {
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      std::vector<std::uint8_t> px;
      for (int p = 0; p < 9; ++p) {
        const auto v = static_cast<std::uint8_t>(rng.below(256));
        px.insert(px.end(), {v, v, v});
      }
      CHECK(image_stats(px).colorfulness == 0.0);
    }
  }

  TEST_CASE("aggregate examples") {
    const auto a = aggregate(std::vector<double>{1, 2, 3, 4});
    CHECK(a.avg == 2.5);
    CHECK(a.median == 2.5);
    CHECK(a.min == 1.0);
    CHECK(a.max == 4.0);
    const auto s = aggregate(std::vector<double>{5});
    CHECK((s.avg == 5 && s.median == 5 && s.min == 5 && s.max == 5));
    const auto e = aggregate(std::vector<double>{});
    CHECK((e.avg == 0 && e.median == 0 && e.min == 0 && e.max == 0));
  }

  TEST_CASE("aggregate ignores order") {
    Rng rng(4);
    std::vector<double> v(11);
    for (auto& x : v) x = rng.normal();
    const auto a = aggregate(v);
    std::reverse(v.begin(), v.end());
    std::swap(v[2], v[7]);
    const auto b = aggregate(v);
    CHECK(a.median == b.median);
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
    CHECK(a.avg == doctest::Approx(b.avg).epsilon(1e-15));
  }

  TEST_CASE("no posts leaves only node type and profile") {
    const auto x = featurize_influencer({}, profile("u", 5000), 0);
    REQUIRE(x.size() == FeatureLayout::kWidth);
    CHECK(x[0] == 1.0);
    const auto& prof = FeatureLayout::slice(FeatureCategory::Profile);
    for (std::size_t i = prof.offset + prof.width; i < x.size(); ++i) CHECK(x[i] == 0.0);
    CHECK(x[FeatureLayout::kFollowers] == doctest::Approx(std::log1p(5000.0)));
  }

  TEST_CASE("posting interval and ad rate") {
    const std::vector<Post> three{plain_post(0), plain_post(10), plain_post(20)};
    CHECK(featurize_influencer(three, profile("u", 100), 0)[FeatureLayout::kInterval] == 10.0);
    const std::vector<Post> four{plain_post(0, true), plain_post(5), plain_post(9), plain_post(30)};
    const auto x = featurize_influencer(four, profile("u", 100), 0);
    CHECK(x[FeatureLayout::kAdRate] == 0.25);
    double rates = 0.0;
    for (std::size_t c = 0; c < kPostCategories; ++c) rates += x[FeatureLayout::kCategoryRates + c];
    CHECK(rates == 1.0);
  }

  TEST_CASE("snapshot matrix: shape, one-hot rows, scaled followers") {
    std::vector<Profile> profiles{profile("a", 1000), profile("b", 90000)};
    Post p;
    p.influencer_id = "a";
    p.hashtags = {"#x", "#y"};
    p.post_category = "food";
    const std::vector<Post> posts{p};
    const std::vector<Profile> one{profiles[0]};
    const auto s1 = build_snapshot(0, posts, one);
    const auto x1 = featurize_snapshot(s1, one);
    CHECK(x1.rows() == 3);
    CHECK(x1.cols() == 67);
    for (std::size_t r = 0; r < s1.node_count(); ++r) {
      if (s1.nodes[r].kind != NodeKind::Hashtag) continue;
      std::size_t nonzero = 0;
      for (double v : x1.row(r)) nonzero += v != 0.0;
      CHECK(nonzero == 1);
      CHECK(x1(r, static_cast<std::size_t>(NodeKind::Hashtag)) == 1.0);
    }

    const auto s2 = build_snapshot(0, posts, profiles);
    const auto x2 = featurize_snapshot(s2, profiles);
    const auto b = *s2.find({NodeKind::Influencer, "b"});
    const auto a = *s2.find({NodeKind::Influencer, "a"});
    CHECK(x2(b, FeatureLayout::kFollowers) == 1.0);
    CHECK(x2(a, FeatureLayout::kFollowers) == 0.0);
  }

  TEST_CASE("generated snapshots: finite, rates in range, category rates sum to 0 or 1") {
    WorldConfig cfg;
    cfg.n_influencers = 50;
    const World w = generate_world(cfg);
    const auto s = build_snapshot(3, w.window_posts(3), w.profiles);
    const auto x = featurize_snapshot(s, w.profiles);
    CHECK(x.all_finite());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (s.nodes[r].kind != NodeKind::Influencer) continue;
      double rates = 0.0;
      for (std::size_t c = 0; c < kPostCategories; ++c) {
        const double v = x(r, FeatureLayout::kCategoryRates + c);
        CHECK((v >= 0.0 && v <= 1.0));
        rates += v;
      }
      CHECK((std::abs(rates) < 1e-12 || std::abs(rates - 1.0) < 1e-12));
      CHECK((x(r, FeatureLayout::kAdRate) >= 0.0 && x(r, FeatureLayout::kAdRate) <= 1.0));
      CHECK((x(r, FeatureLayout::kFeedbackRate) >= 0.0 && x(r, FeatureLayout::kFeedbackRate) <= 1.0));
    }
  }

  TEST_CASE("likes never reach the features") {
    WorldConfig cfg;
    cfg.n_influencers = 40;
    const World w = generate_world(cfg);
    auto posts = w.window_posts(2);
    const auto before = featurize_snapshot(build_snapshot(2, posts, w.profiles), w.profiles);
    Rng rng(8);
    for (auto& p : posts) p.likes = static_cast<std::int64_t>(rng.below(1000000));
    const auto after = featurize_snapshot(build_snapshot(2, posts, w.profiles), w.profiles);
    CHECK(before == after);
  }

  TEST_CASE("auxiliary rows are zero-filled") {
    const World w = generate_world(WorldConfig{});
    const auto s = build_snapshot(0, w.window_posts(0), w.profiles);
    const auto x = featurize_snapshot(s, w.profiles);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (s.nodes[r].kind == NodeKind::Influencer) continue;
      for (std::size_t c = 0; c < x.cols(); ++c)
        CHECK(x(r, c) == (c == static_cast<std::size_t>(s.nodes[r].kind) ? 1.0 : 0.0));
    }
  }

  TEST_CASE("zero_category clears one slice") {
    DenseMatrix x(2, 67, 1.0);
    zero_category(x, FeatureCategory::Image);
    const auto& img = FeatureLayout::slice(FeatureCategory::Image);
    for (std::size_t c = 0; c < 67; ++c)
      CHECK(x(1, c) == (c >= img.offset && c < img.offset + img.width ? 0.0 : 1.0));
    CHECK(FeatureLayout::column_names().size() == 67);
  }
}
