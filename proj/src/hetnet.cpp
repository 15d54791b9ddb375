#include "influencerrank/hetnet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "influencerrank/errors.hpp"

namespace infrank {

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Influencer: return "Influencer";
    case NodeKind::OtherUser: return "OtherUser";
    case NodeKind::Hashtag: return "Hashtag";
    case NodeKind::ImageObject: return "ImageObject";
  }
  return "Unknown";
}

std::optional<NodeKind> node_kind_from_name(std::string_view name) {
  for (auto k : {NodeKind::Influencer, NodeKind::OtherUser, NodeKind::Hashtag, NodeKind::ImageObject})
    if (node_kind_name(k) == name) return k;
  return std::nullopt;
}

std::optional<std::size_t> Snapshot::find(const NodeRef& ref) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), ref);
  if (it == nodes.end() || *it != ref) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<std::size_t> Snapshot::degrees() const {
  std::vector<std::size_t> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.a];
    ++deg[e.b];
  }
  return deg;
}

std::string Snapshot::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "window " << window << '\n';
  for (const auto& n : nodes) out << "node " << node_kind_name(n.kind) << ' ' << n.key << '\n';
  for (const auto& e : edges)
    out << "edge " << e.a << ' ' << e.b << ' ' << e.count << ' ' << e.frequency << '\n';
  for (std::size_t r = 0; r < features.rows(); ++r) {
    out << "x";
    for (double v : features.row(r)) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

Snapshot build_snapshot(int window, std::span<const Post> posts, std::span<const Profile> profiles) {
  if (profiles.empty()) throw ContractError("build_snapshot: no influencer profiles");
  std::set<std::string> known;
  for (const auto& p : profiles) known.insert(p.influencer_id);

  std::set<NodeRef> node_set;
  for (const auto& id : known) node_set.insert({NodeKind::Influencer, id});

  // Per influencer: entity -> number of posts containing it, plus the total
  // entity occurrences across its posts.
  std::map<std::string, std::map<NodeRef, int>> counts;
  std::map<std::string, int> totals;
  for (const auto& post : posts) {
    if (!known.count(post.influencer_id))
      throw DataError("post references unknown influencer '" + post.influencer_id + "'");
    if (post.window_index != window)
      throw DataError("post for window " + std::to_string(post.window_index) +
                      " passed to window " + std::to_string(window));
    std::set<NodeRef> entities;
    for (const auto& h : post.hashtags) entities.insert({NodeKind::Hashtag, h});
    for (const auto& m : post.mentions) entities.insert({NodeKind::OtherUser, m});
    for (const auto& o : post.image_objects) entities.insert({NodeKind::ImageObject, o});
    auto& mine = counts[post.influencer_id];
    for (const auto& e : entities) {
      ++mine[e];
      node_set.insert(e);
    }
    totals[post.influencer_id] += static_cast<int>(entities.size());
  }

  Snapshot s;
  s.window = window;
  s.nodes.assign(node_set.begin(), node_set.end());
  for (const auto& [influencer, entities] : counts) {
    const std::size_t u = *s.find({NodeKind::Influencer, influencer});
    const double total = totals[influencer];
    for (const auto& [entity, count] : entities) {
      const std::size_t v = *s.find(entity);
      s.edges.push_back({std::min(u, v), std::max(u, v), count, count / total});
    }
  }
  std::sort(s.edges.begin(), s.edges.end(),
            [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });

  s.posts.assign(posts.begin(), posts.end());
  std::stable_sort(s.posts.begin(), s.posts.end(), [](const Post& x, const Post& y) {
    if (x.influencer_id != y.influencer_id) return x.influencer_id < y.influencer_id;
    if (x.timestamp != y.timestamp) return x.timestamp < y.timestamp;
    return to_json_line(x) < to_json_line(y);
  });
  return s;
}

namespace {

// Keeps nodes flagged in `keep` and the given edges, re-indexing both.
Snapshot restrict(const Snapshot& s, const std::vector<bool>& keep, const std::vector<Edge>& edges) {
  std::vector<std::size_t> remap(s.nodes.size(), SIZE_MAX);
  Snapshot out;
  out.window = s.window;
  out.posts = s.posts;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = out.nodes.size();
    out.nodes.push_back(s.nodes[i]);
  }
  for (const auto& e : edges) {
    if (remap[e.a] == SIZE_MAX || remap[e.b] == SIZE_MAX) continue;
    out.edges.push_back({remap[e.a], remap[e.b], e.count, e.frequency});
  }
  if (s.features.rows() == s.nodes.size() && s.features.cols() > 0) {
    out.features = DenseMatrix(out.nodes.size(), s.features.cols());
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      if (remap[i] == SIZE_MAX) continue;
      auto src = s.features.row(i);
      std::copy(src.begin(), src.end(), out.features.row(remap[i]).begin());
    }
  }
  return out;
}

}  // namespace

Snapshot prune(const Snapshot& s, double min_freq) {
  std::vector<Edge> kept;
  for (const auto& e : s.edges)
    if (e.frequency >= min_freq) kept.push_back(e);

  std::vector<std::size_t> deg(s.nodes.size(), 0);
  for (const auto& e : kept) {
    ++deg[e.a];
    ++deg[e.b];
  }
  std::vector<bool> keep(s.nodes.size(), true);
  for (std::size_t i = 0; i < s.nodes.size(); ++i)
    if (s.nodes[i].kind != NodeKind::Influencer && deg[i] <= 1) keep[i] = false;
  return restrict(s, keep, kept);
}

Snapshot drop_kind(const Snapshot& s, NodeKind kind) {
  if (kind == NodeKind::Influencer) throw ContractError("drop_kind: influencer nodes cannot be dropped");
  std::vector<bool> keep(s.nodes.size());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) keep[i] = s.nodes[i].kind != kind;
  return restrict(s, keep, s.edges);
}

SparseMatrix normalize_adjacency(const Snapshot& s, std::size_t n_global,
                                 std::span<const std::size_t> index_map) {
  if (index_map.size() != s.nodes.size())
    throw ContractError("normalize_adjacency: index map size differs from node count");
  std::unordered_set<std::size_t> seen;
  for (auto g : index_map) {
    if (g >= n_global) throw ContractError("normalize_adjacency: index outside global range");
    if (!seen.insert(g).second) throw ContractError("normalize_adjacency: index map not injective");
  }

  std::vector<double> degree(n_global, 1.0);
  std::set<std::pair<std::size_t, std::size_t>> links;
  for (const auto& e : s.edges) {
    const std::size_t a = index_map[e.a];
    const std::size_t b = index_map[e.b];
    if (a == b) continue;
    if (links.insert({std::min(a, b), std::max(a, b)}).second) {
      degree[a] += 1.0;
      degree[b] += 1.0;
    }
  }

  std::vector<Triplet> entries;
  entries.reserve(n_global + 2 * links.size());
  for (std::size_t i = 0; i < n_global; ++i) entries.push_back({i, i, 1.0 / degree[i]});
  for (const auto& [a, b] : links) {
    const double v = 1.0 / std::sqrt(degree[a] * degree[b]);
    entries.push_back({a, b, v});
    entries.push_back({b, a, v});
  }
  return SparseMatrix::from_triplets(n_global, n_global, std::move(entries));
}

TemporalNetwork TemporalNetwork::last(std::size_t n) const {
  if (n == 0 || n > steps()) throw ContractError("TemporalNetwork::last: bad history length");
  TemporalNetwork out;
  out.nodes = nodes;
  out.influencer_rows = influencer_rows;
  out.influencer_ids = influencer_ids;
  const std::size_t first = steps() - n;
  out.adjacency.assign(adjacency.begin() + static_cast<std::ptrdiff_t>(first), adjacency.end());
  out.features.assign(features.begin() + static_cast<std::ptrdiff_t>(first), features.end());
  out.windows.assign(windows.begin() + static_cast<std::ptrdiff_t>(first), windows.end());
  return out;
}

TemporalNetwork align(std::span<const Snapshot> snapshots) {
  if (snapshots.empty()) throw ContractError("align: no snapshots");
  const std::size_t width = snapshots.front().features.cols();
  std::set<NodeRef> all;
  for (const auto& s : snapshots) {
    if (s.features.rows() != s.nodes.size() || s.features.cols() != width)
      throw ContractError("align: snapshot " + std::to_string(s.window) + " is not featurized");
    all.insert(s.nodes.begin(), s.nodes.end());
  }

  TemporalNetwork net;
  net.nodes.assign(all.begin(), all.end());
  const std::size_t n = net.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (net.nodes[i].kind != NodeKind::Influencer) continue;
    net.influencer_rows.push_back(i);
    net.influencer_ids.push_back(net.nodes[i].key);
  }

  for (const auto& s : snapshots) {
    std::vector<std::size_t> index(s.nodes.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      auto it = std::lower_bound(net.nodes.begin(), net.nodes.end(), s.nodes[i]);
      index[i] = static_cast<std::size_t>(it - net.nodes.begin());
    }
    DenseMatrix x(n, width);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      auto src = s.features.row(i);
      std::copy(src.begin(), src.end(), x.row(index[i]).begin());
    }
    net.features.push_back(std::move(x));
    net.adjacency.push_back(normalize_adjacency(s, n, index));
    net.windows.push_back(s.window);
  }
  return net;
}

}  // namespace infrank
