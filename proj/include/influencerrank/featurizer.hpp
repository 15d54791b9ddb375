#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "influencerrank/hetnet.hpp"
#include "influencerrank/matrix.hpp"
#include "influencerrank/records.hpp"

namespace infrank {

enum class FeatureCategory { NodeType = 0, Profile, Image, Text, Posting, Reaction };
inline constexpr std::size_t kFeatureCategories = 6;

struct FeatureSlice {
  FeatureCategory category;
  std::string_view name;
  std::size_t offset;
  std::size_t width;
};

// Column layout of the raw node feature vector.
struct FeatureLayout {
  static constexpr std::size_t kWidth = 67;
  static constexpr std::array<FeatureSlice, kFeatureCategories> kSlices{{
      {FeatureCategory::NodeType, "node_type", 0, 4},
      {FeatureCategory::Profile, "profile", 4, 11},
      {FeatureCategory::Image, "image", 15, 12},
      {FeatureCategory::Text, "text", 27, 20},
      {FeatureCategory::Posting, "posting", 47, 16},
      {FeatureCategory::Reaction, "reaction", 63, 4},
  }};

  // Offsets inside the profile slice.
  static constexpr std::size_t kFollowers = 4;
  static constexpr std::size_t kFollowees = 5;
  static constexpr std::size_t kPostCount = 6;
  static constexpr std::size_t kInfluencerCategory = 7;
  // Offsets inside the posting slice.
  static constexpr std::size_t kCategoryRates = 47;
  static constexpr std::size_t kAdRate = 57;
  static constexpr std::size_t kFeedbackRate = 58;
  static constexpr std::size_t kInterval = 59;

  static const FeatureSlice& slice(FeatureCategory c) { return kSlices[static_cast<std::size_t>(c)]; }
  // Human-readable per-column names, e.g. "image.brightness.median".
  static std::vector<std::string> column_names();
};

std::string_view feature_category_name(FeatureCategory c);
bool feature_category_from_name(std::string_view name, FeatureCategory& out);

// Rec.601 luminance mean, Hasler-Suesstrunk colorfulness, McCamy CCT of the
// mean sRGB color. Throws ContractError on an empty image.
ImageStats image_stats(std::span<const std::uint8_t> rgb);

struct Aggregate {
  double avg = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Empty input aggregates to zeros.
Aggregate aggregate(std::span<const double> values);

// Raw 67-vector for one influencer in one window. Profile counts are
// log(1 + x), not yet min-max scaled.
std::vector<double> featurize_influencer(std::span<const Post> posts, const Profile& profile,
                                         int window);

// N x 67 feature matrix. Influencer rows as above with profile counts
// min-max scaled across the snapshot; auxiliary rows carry only their
// node-type one-hot.
DenseMatrix featurize_snapshot(const Snapshot& s, std::span<const Profile> profiles);

// Zeroes the columns of one category in place.
void zero_category(DenseMatrix& features, FeatureCategory c);

}  // namespace infrank
