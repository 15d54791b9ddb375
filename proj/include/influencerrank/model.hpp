#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "influencerrank/autodiff.hpp"
#include "influencerrank/hetnet.hpp"
#include "influencerrank/matrix.hpp"
#include "influencerrank/rng.hpp"

namespace infrank {

struct ModelConfig {
  std::size_t input_dim = 67;
  std::size_t d_embed = 128;
  std::size_t gcn_layers = 2;
  std::size_t gcn_hidden = 128;
  std::size_t gru_hidden = 128;
  // Kept for configuration compatibility; the attention projection maps each
  // state straight to a scalar.
  std::size_t attention_hidden = 128;
  std::size_t mlp_hidden = 128;
  double dropout = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t gru_input() const { return gcn_layers * gcn_hidden; }
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Trainable weights in a fixed order, plus the non-trainable per-column
/// feature scale applied to raw inputs.
struct ModelParams {
  ModelConfig config;
  std::vector<std::string> names;
  std::vector<DenseMatrix> tensors;
  std::vector<double> feature_scale;

  std::size_t size() const { return tensors.size(); }
  std::size_t index(std::string_view name) const;
  const DenseMatrix& operator[](std::string_view name) const { return tensors[index(name)]; }
  DenseMatrix& operator[](std::string_view name) { return tensors[index(name)]; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Glorot-uniform weights and zero biases from a generator seeded by cfg.seed.
ModelParams init_params(const ModelConfig& cfg);

// Weights bound to a tape, addressed by role.
struct BoundParams {
  Var w_in;
  std::vector<Var> gcn;
  Var gru_wz, gru_bz, gru_wr, gru_br, gru_wh;
  Var att_w, att_b;
  Var mlp_wb, mlp_bb, mlp_wc, mlp_bc;

  // `vars` in ModelParams order.
  static BoundParams from(const ModelConfig& cfg, std::span<const Var> vars);
};

// Binds every tensor of `params` as tape parameters 0..n-1.
std::vector<Var> bind(Tape& tape, const ModelParams& params);

// Training mode when `dropout` is set.
struct DropoutSite {
  Rng* rng = nullptr;
  double p = 0.0;
};

// Input projection followed by stacked ReLU GCN layers. Returns the
// concatenation of every layer output (N x layers*hidden). `adjacency` may be
// null, meaning the identity (graph layers bypassed).
Var gcn_forward(Var x, const SparseMatrix* adjacency, const BoundParams& p,
                std::optional<DropoutSite> dropout);

// H_t = (1 - z) H_{t-1} + z * tanh([r * H_{t-1}, R_t] W_h), sigmoid gates.
Var gru_step(Var h_prev, Var r_t, const BoundParams& p);

struct AttentionResult {
  Var alpha;    // n x k, rows sum to 1
  Var context;  // n x h
};

// Softmax over tanh(H_t w + b) per influencer, then the weighted state sum.
// `uniform` replaces the learned weights with 1/k.
AttentionResult attention_pool(std::span<const Var> states, const BoundParams& p,
                               bool uniform = false);

// F_c(ReLU(F_b(c))), n x 1.
Var score(Var context, const BoundParams& p, std::optional<DropoutSite> dropout);

struct ForwardOptions {
  bool use_graph = true;
  bool use_attention = true;
};

struct ForwardResult {
  Var scores;  // n_influencers x 1
  Var alpha;
  std::vector<Var> states;
};

// Full model over every snapshot in `net`. Training mode when `dropout_rng`
// is non-null.
ForwardResult forward(Tape& tape, const TemporalNetwork& net, const ModelParams& params,
                      std::span<const Var> bound, Rng* dropout_rng,
                      const ForwardOptions& options = {});

// Eval-mode scores, one per influencer in net.influencer_ids order.
std::vector<double> predict(const TemporalNetwork& net, const ModelParams& params,
                            const ForwardOptions& options = {});

// Per-column max |x| over all snapshots (1 for all-zero columns).
std::vector<double> fit_feature_scale(const TemporalNetwork& net);

}  // namespace infrank
