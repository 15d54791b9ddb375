#include "influencerrank/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "influencerrank/errors.hpp"
#include "influencerrank/reference.hpp"

namespace infrank {

Dataset dataset_from_world(const World& world) {
  return {world.profiles, world.posts, world.config.n_windows};
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;
  d.profiles = read_profiles(dir / "profiles.jsonl");
  d.posts = read_posts(dir / "posts.jsonl");
  for (const auto& p : d.posts) d.n_windows = std::max(d.n_windows, static_cast<std::size_t>(p.window_index) + 1);
  for (const auto& p : d.profiles) d.n_windows = std::max(d.n_windows, p.followers_by_window.size());
  return d;
}

Dataset rebin(const Dataset& d, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ContractError("rebin: factor must be positive");
  const double length = factor * static_cast<double>(kWindowSeconds);
  const double span = static_cast<double>(d.n_windows) * static_cast<double>(kWindowSeconds);
  const auto n_new = static_cast<std::size_t>(std::max(1.0, std::ceil(span / length - 1e-9)));

  Dataset out;
  out.n_windows = n_new;
  out.posts = d.posts;
  for (auto& p : out.posts) {
    if (p.timestamp < 0) throw DataError("rebin: negative timestamp");
    auto w = static_cast<std::size_t>(std::floor(static_cast<double>(p.timestamp) / length));
    p.window_index = static_cast<int>(std::min(w, n_new - 1));
  }
  out.profiles = d.profiles;
  for (auto& prof : out.profiles) {
    std::vector<std::int64_t> followers(n_new);
    for (std::size_t t = 0; t < n_new; ++t) {
      const auto source = static_cast<int>(std::floor(static_cast<double>(t) * length /
                                                      static_cast<double>(kWindowSeconds)));
      followers[t] = prof.followers_at(source);
    }
    prof.followers_by_window = std::move(followers);
  }
  return out;
}

namespace {

std::vector<Post> posts_of_window(const Dataset& d, int window) {
  std::vector<Post> out;
  for (const auto& p : d.posts)
    if (p.window_index == window) out.push_back(p);
  return out;
}

const Profile& profile_of(const Dataset& d, const std::string& id) {
  for (const auto& p : d.profiles)
    if (p.influencer_id == id) return p;
  throw DataError("no profile for influencer '" + id + "'");
}

}  // namespace

Snapshot prepare_snapshot(const Dataset& d, int window, const NetworkOptions& options) {
  const auto posts = posts_of_window(d, window);
  Snapshot s = build_snapshot(window, posts, d.profiles);
  s.features = featurize_snapshot(s, d.profiles);
  s = prune(s, options.min_freq);
  for (NodeKind k : options.drop_kinds) s = drop_kind(s, k);
  for (FeatureCategory c : options.drop_features) zero_category(s.features, c);
  return s;
}

std::vector<double> window_engagement(const Dataset& d, std::span<const std::string> ids, int window) {
  std::map<std::string, std::vector<std::int64_t>> likes;
  for (const auto& p : d.posts)
    if (p.window_index == window) likes[p.influencer_id].push_back(p.likes);
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto& prof = profile_of(d, id);
    const auto it = likes.find(id);
    const std::vector<std::int64_t> none;
    out.push_back(engagement_rate(it == likes.end() ? none : it->second,
                                  static_cast<double>(prof.followers_at(window))));
  }
  return out;
}

std::vector<double> window_followers(const Dataset& d, std::span<const std::string> ids, int window) {
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(static_cast<double>(profile_of(d, id).followers_at(window)));
  return out;
}

Split make_split(const Dataset& d, std::size_t history, const NetworkOptions& options) {
  if (history < 1) throw ContractError("make_split: history must be >= 1");
  // Eval target is the final window, train target the one before; inputs end
  // one window before each target.
  const int w = static_cast<int>(d.n_windows);
  if (w < 3) throw DataError("need at least 3 windows to train and evaluate, got " + std::to_string(w));
  const int eval_target = w - 1;
  const int train_target = w - 2;
  const int train_last = train_target - 1;
  const std::size_t h = std::min<std::size_t>(history, static_cast<std::size_t>(train_last + 1));

  std::vector<Snapshot> snaps;
  for (int t = 0; t <= eval_target - 1; ++t) snaps.push_back(prepare_snapshot(d, t, options));

  const int first_train = train_last - static_cast<int>(h) + 1;
  std::vector<Snapshot> train_snaps(snaps.begin() + first_train, snaps.begin() + train_last + 1);
  std::vector<Snapshot> eval_snaps(snaps.begin() + first_train + 1, snaps.begin() + train_last + 2);

  Split s;
  s.train_target = train_target;
  s.eval_target = eval_target;
  s.train_net = align(train_snaps);
  s.eval_net = align(eval_snaps);
  s.train_labels = window_engagement(d, s.train_net.influencer_ids, train_target);
  s.eval_labels = window_engagement(d, s.eval_net.influencer_ids, eval_target);
  s.eval_followers = window_followers(d, s.eval_net.influencer_ids, eval_target - 1);
  return s;
}

Variant parse_variant(const std::string& name, double min_freq) {
  Variant v;
  v.name = name;
  v.network.min_freq = min_freq;
  if (name == "full") return v;
  if (name == "no-rnn") {
    v.history = 1;
    return v;
  }
  if (name == "no-attention") {
    v.forward.use_attention = false;
    return v;
  }
  if (name == "no-gcn") {
    v.forward.use_graph = false;
    return v;
  }
  const std::string kind_prefix = "drop-node-kind:";
  const std::string feature_prefix = "drop-feature:";
  if (name.starts_with(kind_prefix)) {
    const auto kind = node_kind_from_name(name.substr(kind_prefix.size()));
    if (!kind || *kind == NodeKind::Influencer)
      throw ContractError("unknown auxiliary node kind in variant '" + name +
                          "' (expected OtherUser, Hashtag or ImageObject)");
    v.network.drop_kinds.push_back(*kind);
    return v;
  }
  if (name.starts_with(feature_prefix)) {
    FeatureCategory c;
    if (!feature_category_from_name(name.substr(feature_prefix.size()), c))
      throw ContractError("unknown feature category in variant '" + name + "'");
    v.network.drop_features.push_back(c);
    return v;
  }
  throw ContractError("unknown variant '" + name +
                      "' (expected full, no-rnn, no-attention, no-gcn, drop-node-kind:<kind> or "
                      "drop-feature:<category>)");
}

EvalReport evaluate_scores(const std::string& run_id, std::span<const std::string> ids,
                           std::span<const double> scores, std::span<const double> engagement,
                           std::span<const double> followers, std::span<const std::size_t> ks,
                           double rbp_p) {
  if (scores.size() != ids.size() || engagement.size() != ids.size() || followers.size() != ids.size())
    throw ContractError("evaluate_scores: ids, scores, engagement and followers differ in length");
  EvalReport r;
  r.run_id = run_id;
  r.overall = evaluate_ranking(rank_by_score(ids, scores, engagement), ks, rbp_p);
  for (auto stratum : {FollowerStratum::Micro, FollowerStratum::Mid, FollowerStratum::Macro}) {
    std::vector<std::string> sid;
    std::vector<double> ss, se;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (follower_stratum(followers[i]) != stratum) continue;
      sid.push_back(ids[i]);
      ss.push_back(scores[i]);
      se.push_back(engagement[i]);
    }
    RankingReport rep;
    if (sid.empty()) {
      rep.ks.assign(ks.begin(), ks.end());
      rep.ndcg.assign(ks.size(), std::numeric_limits<double>::quiet_NaN());
      rep.rbp = std::numeric_limits<double>::quiet_NaN();
    } else {
      rep = evaluate_ranking(rank_by_score(sid, ss, se), ks, rbp_p);
    }
    r.strata.emplace_back(stratum_name(stratum), std::move(rep));
  }
  return r;
}

ExperimentResult run_experiment(const Split& split, const RunConfig& cfg, const Variant& variant,
                                const std::string& run_id) {
  TrainConfig tc = cfg.train;
  ModelParams initial = init_params(cfg.model);
  TrainResult trained = train(split.train_net, split.train_labels, tc, std::move(initial), variant.forward);
  const auto scores = predict(split.eval_net, trained.params, variant.forward);
  EvalReport report = evaluate_scores(run_id, split.eval_net.influencer_ids, scores, split.eval_labels,
                                      split.eval_followers, cfg.eval_k, cfg.rbp_p);
  return {std::move(report), std::move(trained)};
}

ExperimentResult run_experiment(const Dataset& d, const RunConfig& cfg, const Variant& variant,
                                const std::string& run_id) {
  const std::size_t history = variant.history.value_or(cfg.train.history);
  const Split split = make_split(d, history, variant.network);
  return run_experiment(split, cfg, variant, run_id);
}

std::vector<double> followers_scores(const Dataset& d, const Split& split) {
  return window_followers(d, split.eval_net.influencer_ids, split.eval_target - 1);
}

std::string report_header(std::span<const std::size_t> ks) {
  std::string h = "run_id";
  for (auto k : ks) h += ",ndcg@" + std::to_string(k);
  h += ",rbp\n";
  return h;
}

std::string report_rows(const EvalReport& r, bool with_strata) {
  std::ostringstream out;
  out.precision(17);
  auto row = [&](const std::string& id, const RankingReport& rep) {
    out << id;
    for (double v : rep.ndcg) {
      out << ',';
      if (!std::isnan(v)) out << v;
    }
    out << ',';
    if (!std::isnan(rep.rbp)) out << rep.rbp;
    out << '\n';
  };
  row(r.run_id, r.overall);
  if (with_strata)
    for (const auto& [name, rep] : r.strata) row(r.run_id + "/" + name, rep);
  return out.str();
}

GradCheckSummary gradcheck_tiny_model(std::uint64_t seed, bool corrupt) {
  WorldConfig wc;
  wc.n_influencers = 3;
  wc.n_hashtags = 1;
  wc.n_objects = 1;
  wc.n_other_users = 1;
  wc.n_windows = 3;
  wc.posts_per_window = 2.0;
  wc.seed = seed;
  const Dataset d = dataset_from_world(generate_world(wc));

  // No pruning: keep every auxiliary node so the graph part is exercised.
  std::vector<Snapshot> snaps;
  for (int t = 0; t < 2; ++t) {
    Snapshot s = build_snapshot(t, posts_of_window(d, t), d.profiles);
    s.features = featurize_snapshot(s, d.profiles);
    snaps.push_back(std::move(s));
  }
  const TemporalNetwork net = align(snaps);
  const auto labels = window_engagement(d, net.influencer_ids, 2);

  ModelConfig mc;
  mc.d_embed = mc.gcn_hidden = mc.gru_hidden = mc.attention_hidden = mc.mlp_hidden = 4;
  mc.gcn_layers = 2;
  mc.dropout = 0.0;
  mc.seed = seed;
  ModelParams params = init_params(mc);
  params.feature_scale = fit_feature_scale(net);
  // Random biases move the check off the zero-bias point, where a unit fed
  // by an all-zero row sits exactly on the ReLU kink.
  Rng rng = Rng::derive(seed, "gradcheck");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params.tensors[i].rows() == 1)
      for (auto& v : params.tensors[i].data()) v = rng.uniform(-0.5, 0.5);

  LabeledList list;
  for (std::size_t i = 0; i < net.influencer_ids.size(); ++i) {
    list.ids.push_back(i);
    list.engagement.push_back(labels[i]);
  }
  const std::vector<LabeledList> lists{list};

  const LossBuilder loss = [&](Tape& tape, std::span<const Var> bound) {
    const ForwardResult out = forward(tape, net, params, bound, nullptr);
    return listmle_batch(out.scores, lists);
  };
  const ReferenceLoss reference = [&](std::span<const DenseMatrix> tensors) {
    return reference_loss(net, params, tensors, lists);
  };
  std::function<void(GradientMap&)> hook;
  if (corrupt) hook = [](GradientMap& g) { g.at(g.size() - 1).data()[0] += 0.5; };

  std::vector<DenseMatrix> tensors = params.tensors;
  GradCheckSummary summary;
  summary.result = finite_diff_check(tensors, loss, 1e-5, hook, reference);
  summary.worst_param = params.names.at(summary.result.worst_param);
  summary.nodes = net.node_count();
  summary.steps = net.steps();
  return summary;
}

double median(std::vector<double> v) {
  if (v.empty()) throw ContractError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace infrank
