#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace infrank {

inline constexpr std::size_t kInfluencerCategories = 8;
inline constexpr std::size_t kPostCategories = 10;

// Opaque label sets of fixed cardinality. Labels follow the influencer and
// post category taxonomies commonly used for Instagram influencer studies.
inline constexpr std::array<std::string_view, kInfluencerCategories> kInfluencerCategoryLabels{
    "beauty", "family", "fashion", "fitness", "food", "interior", "pet", "travel"};
inline constexpr std::array<std::string_view, kPostCategories> kPostCategoryLabels{
    "beauty", "family", "fashion", "fitness", "food",
    "interior", "pet", "travel", "advertisement", "other"};

std::optional<std::size_t> influencer_category_index(std::string_view label);
std::optional<std::size_t> post_category_index(std::string_view label);

struct ImageStats {
  double brightness = 0.0;
  double colorfulness = 0.0;
  double color_temperature = 6500.0;

  friend bool operator==(const ImageStats&, const ImageStats&) = default;
};

// Raw 8-bit RGB pixels, flattened as r,g,b triplets.
struct RgbImage {
  std::vector<std::uint8_t> rgb;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

struct CaptionStats {
  int n_hashtags = 0;
  int n_usertags = 0;
  int n_emojis = 0;
  int length = 0;
  double sentiment = 0.0;

  friend bool operator==(const CaptionStats&, const CaptionStats&) = default;
};

struct Post {
  std::string influencer_id;
  int window_index = 0;
  std::int64_t likes = 0;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::vector<std::string> image_objects;
  std::variant<ImageStats, RgbImage> image;
  CaptionStats caption_stats;
  std::string post_category;
  bool is_ad = false;
  bool has_influencer_reply = false;
  std::int64_t timestamp = 0;
  std::vector<double> comment_sentiments;

  friend bool operator==(const Post&, const Post&) = default;
};

struct Profile {
  std::string influencer_id;
  std::vector<std::int64_t> followers_by_window;
  std::int64_t followees = 0;
  std::int64_t total_posts = 0;
  std::string category;

  // Followers at window t; the last known value past the end.
  std::int64_t followers_at(int window) const;

  friend bool operator==(const Profile&, const Profile&) = default;
};

struct GroundTruth {
  std::string influencer_id;
  int window = 0;
  double engagement_rate = 0.0;
  double quality = 0.0;
  double boost = 0.0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// One JSON object per line. Parsing errors raise DataError naming the line.
std::string to_json_line(const Post& p);
std::string to_json_line(const Profile& p);
std::string to_json_line(const GroundTruth& g);
Post post_from_json_line(std::string_view line);
Profile profile_from_json_line(std::string_view line);
GroundTruth ground_truth_from_json_line(std::string_view line);

std::vector<Post> read_posts(const std::filesystem::path& file);
std::vector<Profile> read_profiles(const std::filesystem::path& file);
std::vector<GroundTruth> read_ground_truth(const std::filesystem::path& file);
void write_posts(const std::filesystem::path& file, const std::vector<Post>& posts);
void write_profiles(const std::filesystem::path& file, const std::vector<Profile>& profiles);
void write_ground_truth(const std::filesystem::path& file, const std::vector<GroundTruth>& rows);

}  // namespace infrank
