#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "influencerrank/matrix.hpp"
#include "influencerrank/records.hpp"

namespace infrank {

enum class NodeKind : std::uint8_t { Influencer = 0, OtherUser = 1, Hashtag = 2, ImageObject = 3 };
inline constexpr std::size_t kNodeKinds = 4;

std::string_view node_kind_name(NodeKind k);
std::optional<NodeKind> node_kind_from_name(std::string_view name);

struct NodeRef {
  NodeKind kind = NodeKind::Influencer;
  std::string key;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

// Undirected influencer-entity edge, stored once with a < b.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  int count = 0;
  double frequency = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One time window of the heterogeneous graph.
///
/// Nodes are kept in canonical (kind, key) order, so two snapshots built from
/// the same posts in any order are identical. `posts` keeps the window's
/// records for featurization; `features` is empty until featurized.
struct Snapshot {
  int window = 0;
  std::vector<NodeRef> nodes;
  std::vector<Edge> edges;
  DenseMatrix features;
  std::vector<Post> posts;

  std::size_t node_count() const { return nodes.size(); }
  std::optional<std::size_t> find(const NodeRef& ref) const;
  std::vector<std::size_t> degrees() const;
  // Canonical text form, used for permutation-invariance checks.
  std::string serialize() const;
};

// Builds the window-t graph. Every profile yields an influencer node, posting
// or not. Throws DataError if a post names an unknown influencer.
Snapshot build_snapshot(int window, std::span<const Post> posts, std::span<const Profile> profiles);

// Drops edges with frequency < min_freq, then auxiliary nodes left with
// degree <= 1. Single pass; influencer nodes always survive.
Snapshot prune(const Snapshot& s, double min_freq = 0.01);

// Removes every node of one auxiliary kind and its edges.
Snapshot drop_kind(const Snapshot& s, NodeKind kind);

// D^-1/2 (A + I) D^-1/2 over n_global nodes with binary A; `index_map` maps
// snapshot-local node ids to global ids.
SparseMatrix normalize_adjacency(const Snapshot& s, std::size_t n_global,
                                 std::span<const std::size_t> index_map);

/// Snapshots aligned on one global node index.
struct TemporalNetwork {
  std::vector<NodeRef> nodes;
  std::vector<SparseMatrix> adjacency;
  std::vector<DenseMatrix> features;
  std::vector<int> windows;
  // Global row of each influencer, in ascending id order.
  std::vector<std::size_t> influencer_rows;
  std::vector<std::string> influencer_ids;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t steps() const { return adjacency.size(); }
  // Keeps only the most recent `n` snapshots.
  TemporalNetwork last(std::size_t n) const;
};

// Union of (kind, key) sorted by kind then key. Features are zero-padded for
// absent nodes; absent nodes get a self-loop only. Snapshots must be featurized.
TemporalNetwork align(std::span<const Snapshot> snapshots);

}  // namespace infrank
