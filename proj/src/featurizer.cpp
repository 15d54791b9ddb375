#include "influencerrank/featurizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "influencerrank/errors.hpp"

namespace infrank {

namespace {

constexpr std::array<std::string_view, 4> kAggNames{"avg", "median", "min", "max"};

void put(std::vector<double>& x, std::size_t offset, const Aggregate& a) {
  x[offset] = a.avg;
  x[offset + 1] = a.median;
  x[offset + 2] = a.min;
  x[offset + 3] = a.max;
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

const ImageStats& resolve(const std::variant<ImageStats, RgbImage>& image, ImageStats& scratch) {
  if (const auto* s = std::get_if<ImageStats>(&image)) return *s;
  scratch = image_stats(std::get<RgbImage>(image).rgb);
  return scratch;
}

}  // namespace

std::vector<std::string> FeatureLayout::column_names() {
  std::vector<std::string> names;
  for (auto k : {NodeKind::Influencer, NodeKind::OtherUser, NodeKind::Hashtag, NodeKind::ImageObject})
    names.push_back("node_type." + std::string(node_kind_name(k)));
  names.insert(names.end(), {"profile.followers", "profile.followees", "profile.posts"});
  for (auto c : kInfluencerCategoryLabels) names.push_back("profile.category." + std::string(c));
  for (auto f : {"brightness", "colorfulness", "color_temperature"})
    for (auto a : kAggNames) names.push_back("image." + std::string(f) + "." + std::string(a));
  for (auto f : {"n_hashtags", "n_usertags", "n_emojis", "length", "sentiment"})
    for (auto a : kAggNames) names.push_back("text." + std::string(f) + "." + std::string(a));
  for (auto c : kPostCategoryLabels) names.push_back("posting.category_rate." + std::string(c));
  names.insert(names.end(), {"posting.ad_rate", "posting.feedback_rate"});
  for (auto a : kAggNames) names.push_back("posting.interval." + std::string(a));
  for (auto a : kAggNames) names.push_back("reaction.comment_sentiment." + std::string(a));
  return names;
}

std::string_view feature_category_name(FeatureCategory c) {
  return FeatureLayout::slice(c).name;
}

bool feature_category_from_name(std::string_view name, FeatureCategory& out) {
  for (const auto& s : FeatureLayout::kSlices) {
    if (s.name == name) {
      out = s.category;
      return true;
    }
  }
  return false;
}

ImageStats image_stats(std::span<const std::uint8_t> rgb) {
  if (rgb.empty() || rgb.size() % 3 != 0)
    throw ContractError("image_stats: pixel array must be a nonempty list of RGB triplets");
  const double n = static_cast<double>(rgb.size() / 3);

  double lum = 0.0, sum_r = 0.0, sum_g = 0.0, sum_b = 0.0;
  double sum_rg = 0.0, sum_yb = 0.0, sq_rg = 0.0, sq_yb = 0.0;
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    const double r = rgb[i], g = rgb[i + 1], b = rgb[i + 2];
    lum += 0.299 * r + 0.587 * g + 0.114 * b;
    sum_r += r;
    sum_g += g;
    sum_b += b;
    const double rg = r - g;
    const double yb = 0.5 * (r + g) - b;
    sum_rg += rg;
    sum_yb += yb;
    sq_rg += rg * rg;
    sq_yb += yb * yb;
  }

  ImageStats out;
  out.brightness = lum / n;

  const double mu_rg = sum_rg / n, mu_yb = sum_yb / n;
  const double var_rg = std::max(0.0, sq_rg / n - mu_rg * mu_rg);
  const double var_yb = std::max(0.0, sq_yb / n - mu_yb * mu_yb);
  out.colorfulness = std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb);

  const double r = srgb_to_linear(sum_r / n / 255.0);
  const double g = srgb_to_linear(sum_g / n / 255.0);
  const double b = srgb_to_linear(sum_b / n / 255.0);
  const double X = 0.4124 * r + 0.3576 * g + 0.1805 * b;
  const double Y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
  const double Z = 0.0193 * r + 0.1192 * g + 0.9505 * b;
  const double total = X + Y + Z;
  // Black has no chromaticity; fall back to the D65 white point.
  const double x = total > 0.0 ? X / total : 0.3127;
  const double y = total > 0.0 ? Y / total : 0.3290;
  const double k = (x - 0.3320) / (0.1858 - y);
  out.color_temperature = 449.0 * k * k * k + 3525.0 * k * k + 6823.3 * k + 5520.33;
  return out;
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) return {};
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  Aggregate a;
  double total = 0.0;
  for (double x : v) total += x;
  a.avg = total / static_cast<double>(v.size());
  const std::size_t mid = v.size() / 2;
  a.median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  a.min = v.front();
  a.max = v.back();
  return a;
}

std::vector<double> featurize_influencer(std::span<const Post> posts, const Profile& profile,
                                         int window) {
  std::vector<double> x(FeatureLayout::kWidth, 0.0);
  x[static_cast<std::size_t>(NodeKind::Influencer)] = 1.0;

  x[FeatureLayout::kFollowers] = std::log1p(static_cast<double>(profile.followers_at(window)));
  x[FeatureLayout::kFollowees] = std::log1p(static_cast<double>(profile.followees));
  x[FeatureLayout::kPostCount] = std::log1p(static_cast<double>(profile.total_posts));
  if (auto c = influencer_category_index(profile.category))
    x[FeatureLayout::kInfluencerCategory + *c] = 1.0;

  if (posts.empty()) return x;

  std::vector<double> brightness, colorfulness, temperature;
  std::vector<double> n_hashtags, n_usertags, n_emojis, length, sentiment;
  std::vector<double> comments;
  std::vector<std::int64_t> stamps;
  std::array<double, kPostCategories> category_counts{};
  double ads = 0.0, replies = 0.0;
  ImageStats scratch;
  for (const auto& p : posts) {
    const ImageStats& img = resolve(p.image, scratch);
    brightness.push_back(img.brightness);
    colorfulness.push_back(img.colorfulness);
    temperature.push_back(img.color_temperature);
    n_hashtags.push_back(p.caption_stats.n_hashtags);
    n_usertags.push_back(p.caption_stats.n_usertags);
    n_emojis.push_back(p.caption_stats.n_emojis);
    length.push_back(p.caption_stats.length);
    sentiment.push_back(p.caption_stats.sentiment);
    comments.insert(comments.end(), p.comment_sentiments.begin(), p.comment_sentiments.end());
    stamps.push_back(p.timestamp);
    if (auto c = post_category_index(p.post_category)) category_counts[*c] += 1.0;
    ads += p.is_ad ? 1.0 : 0.0;
    replies += p.has_influencer_reply ? 1.0 : 0.0;
  }

  const auto& image = FeatureLayout::slice(FeatureCategory::Image);
  put(x, image.offset, aggregate(brightness));
  put(x, image.offset + 4, aggregate(colorfulness));
  put(x, image.offset + 8, aggregate(temperature));

  const auto& text = FeatureLayout::slice(FeatureCategory::Text);
  put(x, text.offset, aggregate(n_hashtags));
  put(x, text.offset + 4, aggregate(n_usertags));
  put(x, text.offset + 8, aggregate(n_emojis));
  put(x, text.offset + 12, aggregate(length));
  put(x, text.offset + 16, aggregate(sentiment));

  const double total = static_cast<double>(posts.size());
  for (std::size_t c = 0; c < kPostCategories; ++c)
    x[FeatureLayout::kCategoryRates + c] = category_counts[c] / total;
  x[FeatureLayout::kAdRate] = ads / total;
  x[FeatureLayout::kFeedbackRate] = replies / total;

  std::sort(stamps.begin(), stamps.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < stamps.size(); ++i)
    gaps.push_back(static_cast<double>(stamps[i] - stamps[i - 1]));
  put(x, FeatureLayout::kInterval, aggregate(gaps));

  put(x, FeatureLayout::slice(FeatureCategory::Reaction).offset, aggregate(comments));
  return x;
}

DenseMatrix featurize_snapshot(const Snapshot& s, std::span<const Profile> profiles) {
  std::map<std::string, const Profile*> by_id;
  for (const auto& p : profiles) by_id[p.influencer_id] = &p;
  std::map<std::string, std::vector<Post>> posts_by_influencer;
  for (const auto& p : s.posts) posts_by_influencer[p.influencer_id].push_back(p);

  DenseMatrix x(s.nodes.size(), FeatureLayout::kWidth);
  std::vector<std::size_t> influencer_rows;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto& node = s.nodes[i];
    if (node.kind != NodeKind::Influencer) {
      x(i, static_cast<std::size_t>(node.kind)) = 1.0;
      continue;
    }
    auto it = by_id.find(node.key);
    if (it == by_id.end()) throw DataError("no profile for influencer '" + node.key + "'");
    const auto& mine = posts_by_influencer[node.key];
    auto row = featurize_influencer(mine, *it->second, s.window);
    std::copy(row.begin(), row.end(), x.row(i).begin());
    influencer_rows.push_back(i);
  }

  // Min-max scale the log-count profile columns across influencers.
  for (std::size_t col : {FeatureLayout::kFollowers, FeatureLayout::kFollowees, FeatureLayout::kPostCount}) {
    if (influencer_rows.empty()) break;
    double lo = x(influencer_rows.front(), col), hi = lo;
    for (auto r : influencer_rows) {
      lo = std::min(lo, x(r, col));
      hi = std::max(hi, x(r, col));
    }
    for (auto r : influencer_rows) x(r, col) = hi > lo ? (x(r, col) - lo) / (hi - lo) : 0.0;
  }
  return x;
}

void zero_category(DenseMatrix& features, FeatureCategory c) {
  const auto& s = FeatureLayout::slice(c);
  if (features.cols() != FeatureLayout::kWidth)
    throw ShapeError("zero_category: expected 67 feature columns");
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t j = 0; j < s.width; ++j) features(r, s.offset + j) = 0.0;
}

}  // namespace infrank
