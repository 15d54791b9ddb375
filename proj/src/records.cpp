#include "influencerrank/records.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "influencerrank/errors.hpp"

namespace infrank {

using nlohmann::json;

namespace {

template <std::size_t N>
std::optional<std::size_t> index_of(const std::array<std::string_view, N>& labels,
                                    std::string_view label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

void require_sentiment(double s, const char* what) {
  if (!(s >= -1.0 && s <= 1.0))
    throw DataError(std::string(what) + " outside [-1, 1]: " + std::to_string(s));
}

json parse_object(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("record is not a JSON object");
  return j;
}

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T, typename Parse>
std::vector<T> read_lines(const std::filesystem::path& file, Parse parse) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const DataError& e) {
      throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write_lines(const std::filesystem::path& file, const std::vector<T>& rows) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + file.string());
  for (const auto& r : rows) out << to_json_line(r) << '\n';
  if (!out) throw DataError("write failed for " + file.string());
}

}  // namespace

std::optional<std::size_t> influencer_category_index(std::string_view label) {
  return index_of(kInfluencerCategoryLabels, label);
}

std::optional<std::size_t> post_category_index(std::string_view label) {
  return index_of(kPostCategoryLabels, label);
}

std::int64_t Profile::followers_at(int window) const {
  if (followers_by_window.empty()) return 0;
  if (window < 0) return followers_by_window.front();
  const auto w = static_cast<std::size_t>(window);
  return w < followers_by_window.size() ? followers_by_window[w] : followers_by_window.back();
}

std::string to_json_line(const Post& p) {
  json image;
  if (const auto* s = std::get_if<ImageStats>(&p.image)) {
    image = {{"brightness", s->brightness},
             {"colorfulness", s->colorfulness},
             {"color_temperature", s->color_temperature}};
  } else {
    const auto& px = std::get<RgbImage>(p.image);
    image = {{"rgb", px.rgb}, {"width", px.width}, {"height", px.height}};
  }
  json j = {{"influencer_id", p.influencer_id},
            {"window_index", p.window_index},
            {"likes", p.likes},
            {"hashtags", p.hashtags},
            {"mentions", p.mentions},
            {"image_objects", p.image_objects},
            {"image", image},
            {"caption_stats",
             {{"n_hashtags", p.caption_stats.n_hashtags},
              {"n_usertags", p.caption_stats.n_usertags},
              {"n_emojis", p.caption_stats.n_emojis},
              {"length", p.caption_stats.length},
              {"sentiment", p.caption_stats.sentiment}}},
            {"post_category", p.post_category},
            {"is_ad", p.is_ad},
            {"has_influencer_reply", p.has_influencer_reply},
            {"timestamp", p.timestamp},
            {"comment_sentiments", p.comment_sentiments}};
  return j.dump();
}

std::string to_json_line(const Profile& p) {
  json j = {{"influencer_id", p.influencer_id},
            {"followers_by_window", p.followers_by_window},
            {"followees", p.followees},
            {"total_posts", p.total_posts},
            {"category", p.category}};
  return j.dump();
}

std::string to_json_line(const GroundTruth& g) {
  json j = {{"influencer_id", g.influencer_id},
            {"window", g.window},
            {"engagement_rate", g.engagement_rate},
            {"quality", g.quality},
            {"boost", g.boost}};
  return j.dump();
}

Post post_from_json_line(std::string_view line) {
  const json j = parse_object(line);
  Post p;
  p.influencer_id = field<std::string>(j, "influencer_id");
  p.window_index = field<int>(j, "window_index");
  p.likes = field<std::int64_t>(j, "likes");
  p.hashtags = field<std::vector<std::string>>(j, "hashtags");
  p.mentions = field<std::vector<std::string>>(j, "mentions");
  p.image_objects = field<std::vector<std::string>>(j, "image_objects");
  if (p.window_index < 0) throw DataError("negative window_index");
  if (p.likes < 0) throw DataError("negative likes");

  const json image = field<json>(j, "image");
  if (image.contains("rgb")) {
    RgbImage px;
    px.rgb = field<std::vector<std::uint8_t>>(image, "rgb");
    px.width = field<std::size_t>(image, "width");
    px.height = field<std::size_t>(image, "height");
    if (px.rgb.size() != 3 * px.width * px.height)
      throw DataError("image rgb length does not match width*height*3");
    p.image = std::move(px);
  } else {
    ImageStats s;
    s.brightness = field<double>(image, "brightness");
    s.colorfulness = field<double>(image, "colorfulness");
    s.color_temperature = field<double>(image, "color_temperature");
    p.image = s;
  }

  const json caption = field<json>(j, "caption_stats");
  p.caption_stats.n_hashtags = field<int>(caption, "n_hashtags");
  p.caption_stats.n_usertags = field<int>(caption, "n_usertags");
  p.caption_stats.n_emojis = field<int>(caption, "n_emojis");
  p.caption_stats.length = field<int>(caption, "length");
  p.caption_stats.sentiment = field<double>(caption, "sentiment");
  require_sentiment(p.caption_stats.sentiment, "caption sentiment");

  p.post_category = field<std::string>(j, "post_category");
  if (!post_category_index(p.post_category))
    throw DataError("unknown post_category '" + p.post_category + "'");
  p.is_ad = field<bool>(j, "is_ad");
  p.has_influencer_reply = field<bool>(j, "has_influencer_reply");
  p.timestamp = field<std::int64_t>(j, "timestamp");
  p.comment_sentiments = field<std::vector<double>>(j, "comment_sentiments");
  for (double s : p.comment_sentiments) require_sentiment(s, "comment sentiment");
  return p;
}

Profile profile_from_json_line(std::string_view line) {
  const json j = parse_object(line);
  Profile p;
  p.influencer_id = field<std::string>(j, "influencer_id");
  p.followers_by_window = field<std::vector<std::int64_t>>(j, "followers_by_window");
  p.followees = field<std::int64_t>(j, "followees");
  p.total_posts = field<std::int64_t>(j, "total_posts");
  p.category = field<std::string>(j, "category");
  if (!influencer_category_index(p.category))
    throw DataError("unknown influencer category '" + p.category + "'");
  if (p.followers_by_window.empty()) throw DataError("followers_by_window is empty");
  return p;
}

GroundTruth ground_truth_from_json_line(std::string_view line) {
  const json j = parse_object(line);
  GroundTruth g;
  g.influencer_id = field<std::string>(j, "influencer_id");
  g.window = field<int>(j, "window");
  g.engagement_rate = field<double>(j, "engagement_rate");
  g.quality = field<double>(j, "quality");
  g.boost = j.contains("boost") ? field<double>(j, "boost") : 0.0;
  return g;
}

std::vector<Post> read_posts(const std::filesystem::path& file) {
  return read_lines<Post>(file, post_from_json_line);
}

std::vector<Profile> read_profiles(const std::filesystem::path& file) {
  return read_lines<Profile>(file, profile_from_json_line);
}

std::vector<GroundTruth> read_ground_truth(const std::filesystem::path& file) {
  return read_lines<GroundTruth>(file, ground_truth_from_json_line);
}

void write_posts(const std::filesystem::path& file, const std::vector<Post>& posts) {
  write_lines(file, posts);
}

void write_profiles(const std::filesystem::path& file, const std::vector<Profile>& profiles) {
  write_lines(file, profiles);
}

void write_ground_truth(const std::filesystem::path& file, const std::vector<GroundTruth>& rows) {
  write_lines(file, rows);
}

}  // namespace infrank
