#include "influencerrank/model.hpp"

#include <array>
#include <algorithm>
#include <cmath>

#include "influencerrank/errors.hpp"

namespace infrank {

void ModelConfig::validate() const {
  if (input_dim == 0 || d_embed == 0 || gcn_layers == 0 || gcn_hidden == 0 || gru_hidden == 0 ||
      attention_hidden == 0 || mlp_hidden == 0)
    throw ContractError("ModelConfig: every dimension must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ContractError("ModelConfig: dropout must lie in [0, 1)");
}

std::size_t ModelParams::index(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw ContractError("ModelParams: no tensor named '" + std::string(name) + "'");
}

ModelParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.config = cfg;
  p.feature_scale.assign(cfg.input_dim, 1.0);
  Rng rng = Rng::derive(cfg.seed, "init");

  auto weight = [&](std::string name, std::size_t in, std::size_t out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseMatrix w(in, out);
    for (auto& v : w.data()) v = rng.uniform(-bound, bound);
    p.names.push_back(std::move(name));
    p.tensors.push_back(std::move(w));
  };
  auto bias = [&](std::string name, std::size_t out) {
    p.names.push_back(std::move(name));
    p.tensors.emplace_back(1, out);
  };

  const std::size_t h = cfg.gru_hidden;
  const std::size_t gate_in = h + cfg.gru_input();
  weight("w_in", cfg.input_dim, cfg.d_embed);
  for (std::size_t l = 0; l < cfg.gcn_layers; ++l)
    weight("gcn." + std::to_string(l), l == 0 ? cfg.d_embed : cfg.gcn_hidden, cfg.gcn_hidden);
  weight("gru.w_z", gate_in, h);
  bias("gru.b_z", h);
  weight("gru.w_r", gate_in, h);
  bias("gru.b_r", h);
  weight("gru.w_h", gate_in, h);
  weight("att.w", h, 1);
  bias("att.b", 1);
  weight("mlp.w_b", h, cfg.mlp_hidden);
  bias("mlp.b_b", cfg.mlp_hidden);
  weight("mlp.w_c", cfg.mlp_hidden, 1);
  bias("mlp.b_c", 1);
  return p;
}

BoundParams BoundParams::from(const ModelConfig& cfg, std::span<const Var> vars) {
  const std::size_t expected = 1 + cfg.gcn_layers + 11;
  if (vars.size() != expected) throw ContractError("BoundParams: wrong number of tensors");
  BoundParams b;
  std::size_t i = 0;
  b.w_in = vars[i++];
  for (std::size_t l = 0; l < cfg.gcn_layers; ++l) b.gcn.push_back(vars[i++]);
  b.gru_wz = vars[i++];
  b.gru_bz = vars[i++];
  b.gru_wr = vars[i++];
  b.gru_br = vars[i++];
  b.gru_wh = vars[i++];
  b.att_w = vars[i++];
  b.att_b = vars[i++];
  b.mlp_wb = vars[i++];
  b.mlp_bb = vars[i++];
  b.mlp_wc = vars[i++];
  b.mlp_bc = vars[i++];
  return b;
}

std::vector<Var> bind(Tape& tape, const ModelParams& params) {
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) vars.push_back(tape.parameter(i, params.tensors[i]));
  return vars;
}

namespace {

// Inverted dropout: kept entries scaled by 1/(1-p).
Var apply_dropout(Var a, const DropoutSite& d) {
  if (d.p <= 0.0) return a;
  DenseMatrix mask(a.rows(), a.cols());
  const double keep = 1.0 / (1.0 - d.p);
  for (auto& m : mask.data()) m = d.rng->uniform() < d.p ? 0.0 : keep;
  return hadamard(a, a.tape->constant(std::move(mask)));
}

}  // namespace

Var gcn_forward(Var x, const SparseMatrix* adjacency, const BoundParams& p,
                std::optional<DropoutSite> dropout) {
  if (adjacency && (adjacency->rows() != x.rows() || adjacency->cols() != x.rows()))
    throw ShapeError("gcn_forward: adjacency does not match node count");
  Var f = matmul(x, p.w_in);
  std::vector<Var> outputs;
  for (const auto& w : p.gcn) {
    Var propagated = adjacency ? spmm(*adjacency, f) : f;
    f = relu(matmul(propagated, w));
    if (dropout) f = apply_dropout(f, *dropout);
    outputs.push_back(f);
  }
  return outputs.size() == 1 ? outputs.front() : concat_cols(outputs);
}

Var gru_step(Var h_prev, Var r_t, const BoundParams& p) {
  if (h_prev.rows() != r_t.rows()) throw ShapeError("gru_step: state and input row counts differ");
  const std::array<Var, 2> joined{h_prev, r_t};
  Var hr = concat_cols(joined);
  Var z = sigmoid(add_row(matmul(hr, p.gru_wz), p.gru_bz));
  Var reset = sigmoid(add_row(matmul(hr, p.gru_wr), p.gru_br));
  const std::array<Var, 2> gated{hadamard(reset, h_prev), r_t};
  Var candidate = tanh(matmul(concat_cols(gated), p.gru_wh));
  return add(hadamard(affine(z, -1.0, 1.0), h_prev), hadamard(z, candidate));
}

AttentionResult attention_pool(std::span<const Var> states, const BoundParams& p, bool uniform) {
  if (states.empty()) throw ContractError("attention_pool: no states");
  Tape& tape = *states.front().tape;
  const std::size_t n = states.front().rows();
  const std::size_t k = states.size();

  Var alpha;
  if (uniform) {
    alpha = tape.constant(DenseMatrix(n, k, 1.0 / static_cast<double>(k)));
  } else {
    std::vector<Var> taus;
    for (const auto& h : states) taus.push_back(tanh(add_row(matmul(h, p.att_w), p.att_b)));
    alpha = softmax_rows(concat_cols(taus));
  }
  Var context = scale_rows(states[0], select_col(alpha, 0));
  for (std::size_t t = 1; t < k; ++t) context = add(context, scale_rows(states[t], select_col(alpha, t)));
  return {alpha, context};
}

Var score(Var context, const BoundParams& p, std::optional<DropoutSite> dropout) {
  Var hidden = relu(add_row(matmul(context, p.mlp_wb), p.mlp_bb));
  if (dropout) hidden = apply_dropout(hidden, *dropout);
  return add_row(matmul(hidden, p.mlp_wc), p.mlp_bc);
}

ForwardResult forward(Tape& tape, const TemporalNetwork& net, const ModelParams& params,
                      std::span<const Var> bound, Rng* dropout_rng, const ForwardOptions& options) {
  if (net.steps() == 0) throw ContractError("forward: empty temporal network");
  const auto& cfg = params.config;
  const BoundParams p = BoundParams::from(cfg, bound);
  std::optional<DropoutSite> dropout;
  if (dropout_rng) dropout = DropoutSite{dropout_rng, cfg.dropout};

  const std::size_t n_inf = net.influencer_rows.size();
  Var h = tape.constant(DenseMatrix(n_inf, cfg.gru_hidden));
  std::vector<Var> states;
  for (std::size_t t = 0; t < net.steps(); ++t) {
    const DenseMatrix& raw = net.features[t];
    if (raw.cols() != cfg.input_dim) throw ShapeError("forward: feature width differs from config");
    DenseMatrix scaled = raw;
    for (std::size_t r = 0; r < scaled.rows(); ++r)
      for (std::size_t c = 0; c < scaled.cols(); ++c) scaled(r, c) /= params.feature_scale[c];
    Var x = tape.constant(std::move(scaled));
    Var rep = gcn_forward(x, options.use_graph ? &net.adjacency[t] : nullptr, p, dropout);
    Var rows = select_rows(rep, net.influencer_rows);
    h = gru_step(h, rows, p);
    states.push_back(h);
  }
  AttentionResult pooled = attention_pool(states, p, !options.use_attention);
  return {score(pooled.context, p, dropout), pooled.alpha, std::move(states)};
}

std::vector<double> predict(const TemporalNetwork& net, const ModelParams& params,
                            const ForwardOptions& options) {
  Tape tape;
  auto bound = bind(tape, params);
  ForwardResult out = forward(tape, net, params, bound, nullptr, options);
  const auto& s = out.scores.value();
  return {s.data().begin(), s.data().end()};
}

std::vector<double> fit_feature_scale(const TemporalNetwork& net) {
  const std::size_t width = net.features.empty() ? 0 : net.features.front().cols();
  std::vector<double> scale(width, 0.0);
  for (const auto& x : net.features)
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < width; ++c) scale[c] = std::max(scale[c], std::abs(x(r, c)));
  for (auto& s : scale)
    if (s == 0.0) s = 1.0;
  return scale;
}

}  // namespace infrank
