#include "influencerrank/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "influencerrank/errors.hpp"

namespace infrank {

namespace {

using Real = long double;

struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<Real> v;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0L) {}
  explicit Mat(const DenseMatrix& m) : rows(m.rows()), cols(m.cols()), v(m.data().begin(), m.data().end()) {}
  Real& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  Real operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

Mat mul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) throw ShapeError("reference: inner dimensions differ");
  Mat out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k)
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += a(i, k) * b(k, j);
  return out;
}

Mat propagate(const SparseMatrix& a, const Mat& x) {
  Mat out(a.rows(), x.cols);
  const auto off = a.offsets();
  const auto idx = a.indices();
  const auto val = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t e = off[r]; e < off[r + 1]; ++e)
      for (std::size_t j = 0; j < x.cols; ++j) out(r, j) += static_cast<Real>(val[e]) * x(idx[e], j);
  return out;
}

void add_bias(Mat& m, const Mat& b) {
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) += b(0, j);
}

Real sigmoid(Real x) { return 1.0L / (1.0L + std::exp(-x)); }

Mat hcat(const Mat& a, const Mat& b) {
  Mat out(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols; ++j) out(i, a.cols + j) = b(i, j);
  }
  return out;
}

Real listmle(const std::vector<Real>& s, const LabeledList& l) {
  const auto order = truth_order(l.engagement, l.ids);
  Real loss = 0.0L;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Real top = -std::numeric_limits<Real>::infinity();
    for (std::size_t j = i; j < order.size(); ++j) top = std::max(top, s[l.ids[order[j]]]);
    Real acc = 0.0L;
    for (std::size_t j = i; j < order.size(); ++j) acc += std::exp(s[l.ids[order[j]]] - top);
    loss += top + std::log(acc) - s[l.ids[order[i]]];
  }
  return loss;
}

}  // namespace

std::vector<long double> reference_scores(const TemporalNetwork& net, const ModelParams& params,
                                          std::span<const DenseMatrix> tensors,
                                          const ForwardOptions& options) {
  const auto& cfg = params.config;
  if (tensors.size() != params.size()) throw ContractError("reference_scores: wrong number of tensors");
  std::vector<Mat> t;
  for (const auto& m : tensors) t.emplace_back(m);
  std::size_t i = 0;
  const Mat& w_in = t[i++];
  std::vector<const Mat*> gcn;
  for (std::size_t l = 0; l < cfg.gcn_layers; ++l) gcn.push_back(&t[i++]);
  const Mat &wz = t[i++], &bz = t[i++], &wr = t[i++], &br = t[i++], &wh = t[i++];
  const Mat &att_w = t[i++], &att_b = t[i++];
  const Mat &wb = t[i++], &bb = t[i++], &wc = t[i++], &bc = t[i++];

  const std::size_t n_inf = net.influencer_rows.size();
  const std::size_t h = cfg.gru_hidden;
  Mat state(n_inf, h);
  std::vector<Mat> states;
  for (std::size_t step = 0; step < net.steps(); ++step) {
    Mat x(net.features[step]);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) x(r, c) /= static_cast<Real>(params.feature_scale[c]);
    Mat f = mul(x, w_in);
    Mat rep(x.rows, 0);
    for (const Mat* w : gcn) {
      f = mul(options.use_graph ? propagate(net.adjacency[step], f) : f, *w);
      for (auto& v : f.v) v = v > 0.0L ? v : 0.0L;
      rep = hcat(rep, f);
    }
    Mat r_t(n_inf, rep.cols);
    for (std::size_t u = 0; u < n_inf; ++u)
      for (std::size_t c = 0; c < rep.cols; ++c) r_t(u, c) = rep(net.influencer_rows[u], c);

    const Mat joined = hcat(state, r_t);
    Mat z = mul(joined, wz);
    add_bias(z, bz);
    Mat reset = mul(joined, wr);
    add_bias(reset, br);
    for (auto& v : z.v) v = sigmoid(v);
    for (auto& v : reset.v) v = sigmoid(v);
    Mat gated = state;
    for (std::size_t k = 0; k < gated.v.size(); ++k) gated.v[k] *= reset.v[k];
    Mat cand = mul(hcat(gated, r_t), wh);
    for (auto& v : cand.v) v = std::tanh(v);
    for (std::size_t k = 0; k < state.v.size(); ++k)
      state.v[k] = (1.0L - z.v[k]) * state.v[k] + z.v[k] * cand.v[k];
    states.push_back(state);
  }

  const std::size_t k = states.size();
  Mat context(n_inf, h);
  for (std::size_t u = 0; u < n_inf; ++u) {
    std::vector<Real> alpha(k, 1.0L / static_cast<Real>(k));
    if (options.use_attention) {
      Real top = -std::numeric_limits<Real>::infinity();
      for (std::size_t s = 0; s < k; ++s) {
        Real tau = att_b(0, 0);
        for (std::size_t c = 0; c < h; ++c) tau += states[s](u, c) * att_w(c, 0);
        alpha[s] = std::tanh(tau);
        top = std::max(top, alpha[s]);
      }
      Real total = 0.0L;
      for (auto& a : alpha) total += (a = std::exp(a - top));
      for (auto& a : alpha) a /= total;
    }
    for (std::size_t s = 0; s < k; ++s)
      for (std::size_t c = 0; c < h; ++c) context(u, c) += alpha[s] * states[s](u, c);
  }

  Mat hidden = mul(context, wb);
  add_bias(hidden, bb);
  for (auto& v : hidden.v) v = v > 0.0L ? v : 0.0L;
  Mat out = mul(hidden, wc);
  add_bias(out, bc);
  return out.v;
}

long double reference_loss(const TemporalNetwork& net, const ModelParams& params,
                           std::span<const DenseMatrix> tensors, std::span<const LabeledList> lists,
                           const ForwardOptions& options) {
  if (lists.empty()) throw ContractError("reference_loss: no lists");
  const auto s = reference_scores(net, params, tensors, options);
  Real total = 0.0L;
  for (const auto& l : lists) total += listmle(s, l);
  return total / static_cast<Real>(lists.size());
}

}  // namespace infrank
