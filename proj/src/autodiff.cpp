#include "influencerrank/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "influencerrank/errors.hpp"

namespace infrank {

const DenseMatrix& Var::value() const { return tape->value(id); }

Var Tape::constant(DenseMatrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, {}, false, false});
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(ParamId id, const DenseMatrix& value) {
  for (const auto& [pid, node] : params_) {
    if (pid == id) throw ContractError("Tape::parameter: id " + std::to_string(id) + " bound twice");
  }
  nodes_.push_back(Node{value, {}, {}, {}, true, false});
  params_.emplace_back(id, nodes_.size() - 1);
  return {this, nodes_.size() - 1};
}

Var Tape::record(DenseMatrix value, std::vector<std::size_t> inputs, BackwardFn backward) {
  bool needs = false;
  for (auto i : inputs) {
    if (i >= nodes_.size()) throw ContractError("Tape::record: input not on this tape");
    needs = needs || nodes_[i].needs_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, std::move(inputs), std::move(backward), needs, false});
  return {this, nodes_.size() - 1};
}

void Tape::accumulate(std::size_t id, const DenseMatrix& grad) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (!n.grad_ready) {
    n.grad = grad;
    n.grad_ready = true;
    return;
  }
  add_inplace(n.grad, grad);
}

void Tape::accumulate_at(std::size_t id, std::size_t r, std::size_t c, double g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (!n.grad_ready) {
    n.grad = DenseMatrix(n.value.rows(), n.value.cols());
    n.grad_ready = true;
  }
  n.grad(r, c) += g;
}

GradientMap Tape::backward(Var loss) {
  if (loss.tape != this) throw ContractError("backward: loss recorded on another tape");
  if (consumed_) throw ContractError("backward: tape already consumed");
  const auto& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ContractError("backward: loss must be scalar, got " + std::to_string(lv.rows()) + "x" +
                        std::to_string(lv.cols()));
  if (!std::isfinite(lv(0, 0))) throw NumericalError("backward: loss is not finite");
  consumed_ = true;

  accumulate(loss.id, DenseMatrix(1, 1, 1.0));
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.grad_ready || !n.backward) continue;
    n.backward(n.grad, *this);
    // Interior gradients are no longer needed once propagated.
    n.grad = DenseMatrix();
  }

  GradientMap grads;
  for (const auto& [pid, node] : params_) {
    Node& n = nodes_[node];
    grads[pid] = n.grad_ready ? std::move(n.grad) : DenseMatrix(n.value.rows(), n.value.cols());
  }
  return grads;
}

namespace {

Tape& same_tape(Var a, Var b, const char* op) {
  if (a.tape == nullptr || a.tape != b.tape)
    throw ContractError(std::string(op) + ": operands on different tapes");
  return *a.tape;
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
}

template <typename F>
DenseMatrix map_values(const DenseMatrix& a, F f) {
  DenseMatrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = same_tape(a, b, "matmul");
  return t.record(matmul(a.value(), b.value()), {a.id, b.id},
                  [ai = a.id, bi = b.id](const DenseMatrix& g, Tape& tp) {
                    if (tp.needs_grad(ai)) tp.accumulate(ai, matmul_nt(g, tp.value(bi)));
                    if (tp.needs_grad(bi)) tp.accumulate(bi, matmul_tn(tp.value(ai), g));
                  });
}

Var spmm(const SparseMatrix& a, Var x) {
  Tape& t = *x.tape;
  return t.record(spmm(a, x.value()), {x.id}, [&a, xi = x.id](const DenseMatrix& g, Tape& tp) {
    tp.accumulate(xi, spmm_tn(a, g));
  });
}

Var add(Var a, Var b) {
  Tape& t = same_tape(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  DenseMatrix out = a.value();
  add_inplace(out, b.value());
  return t.record(std::move(out), {a.id, b.id},
                  [ai = a.id, bi = b.id](const DenseMatrix& g, Tape& tp) {
                    tp.accumulate(ai, g);
                    tp.accumulate(bi, g);
                  });
}

Var sub(Var a, Var b) {
  Tape& t = same_tape(a, b, "sub");
  require_same_shape(a.value(), b.value(), "sub");
  DenseMatrix out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  return t.record(std::move(out), {a.id, b.id},
                  [ai = a.id, bi = b.id](const DenseMatrix& g, Tape& tp) {
                    tp.accumulate(ai, g);
                    if (tp.needs_grad(bi)) tp.accumulate(bi, map_values(g, [](double v) { return -v; }));
                  });
}

Var add_row(Var a, Var bias) {
  Tape& t = same_tape(a, bias, "add_row");
  const auto& av = a.value();
  const auto& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != av.cols())
    throw ShapeError("add_row: bias must be 1x" + std::to_string(av.cols()));
  DenseMatrix out = av;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv(0, c);
  return t.record(std::move(out), {a.id, bias.id},
                  [ai = a.id, bi = bias.id](const DenseMatrix& g, Tape& tp) {
                    tp.accumulate(ai, g);
                    if (!tp.needs_grad(bi)) return;
                    DenseMatrix gb(1, g.cols());
                    for (std::size_t r = 0; r < g.rows(); ++r)
                      for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
                    tp.accumulate(bi, gb);
                  });
}

Var hadamard(Var a, Var b) {
  Tape& t = same_tape(a, b, "hadamard");
  require_same_shape(a.value(), b.value(), "hadamard");
  DenseMatrix out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
  return t.record(std::move(out), {a.id, b.id},
                  [ai = a.id, bi = b.id](const DenseMatrix& g, Tape& tp) {
                    auto scaled = [&](std::size_t other) {
                      DenseMatrix r = g;
                      auto rv = r.data();
                      auto ov = tp.value(other).data();
                      for (std::size_t i = 0; i < rv.size(); ++i) rv[i] *= ov[i];
                      return r;
                    };
                    if (tp.needs_grad(ai)) tp.accumulate(ai, scaled(bi));
                    if (tp.needs_grad(bi)) tp.accumulate(bi, scaled(ai));
                  });
}

Var affine(Var a, double alpha, double beta) {
  Tape& t = *a.tape;
  return t.record(map_values(a.value(), [=](double v) { return alpha * v + beta; }), {a.id},
                  [ai = a.id, alpha](const DenseMatrix& g, Tape& tp) {
                    tp.accumulate(ai, map_values(g, [=](double v) { return alpha * v; }));
                  });
}

namespace {

// Unary elementwise op whose derivative is expressed through its output.
template <typename Fwd, typename DerivFromOut>
Var unary_by_output(Var a, Fwd fwd, DerivFromOut deriv) {
  Tape& t = *a.tape;
  const std::size_t self = t.size();
  return t.record(map_values(a.value(), fwd), {a.id},
                  [ai = a.id, self, deriv](const DenseMatrix& g, Tape& tp) {
                    DenseMatrix r = g;
                    auto rv = r.data();
                    auto out = tp.value(self).data();
                    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] *= deriv(out[i]);
                    tp.accumulate(ai, r);
                  });
}

}  // namespace

Var tanh(Var a) {
  return unary_by_output(a, [](double v) { return std::tanh(v); },
                         [](double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary_by_output(
      a,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double y) { return y * (1.0 - y); });
}

Var relu(Var a) {
  return unary_by_output(a, [](double v) { return v > 0.0 ? v : 0.0; },
                         [](double y) { return y > 0.0 ? 1.0 : 0.0; });
}

Var log(Var a) {
  Tape& t = *a.tape;
  for (double v : a.value().data())
    if (!(v > 0.0)) throw NumericalError("log: non-positive input");
  return t.record(map_values(a.value(), [](double v) { return std::log(v); }), {a.id},
                  [ai = a.id](const DenseMatrix& g, Tape& tp) {
                    DenseMatrix r = g;
                    auto rv = r.data();
                    auto x = tp.value(ai).data();
                    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] /= x[i];
                    tp.accumulate(ai, r);
                  });
}

Var softmax_rows(Var a) {
  Tape& t = *a.tape;
  const auto& av = a.value();
  if (av.cols() == 0) throw ContractError("softmax_rows: zero columns");
  DenseMatrix out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto p = softmax(av.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  const std::size_t self = t.size();
  return t.record(std::move(out), {a.id}, [ai = a.id, self](const DenseMatrix& g, Tape& tp) {
    const auto& y = tp.value(self);
    DenseMatrix r(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) r(i, j) = y(i, j) * (g(i, j) - dot);
    }
    tp.accumulate(ai, r);
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  Tape& t = *parts[0].tape;
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    if (p.tape != &t) throw ContractError("concat_cols: operands on different tapes");
    if (p.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
    ids.push_back(p.id);
    widths.push_back(p.cols());
    cols += p.cols();
  }
  DenseMatrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(v.row(r).begin(), v.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
    offset += v.cols();
  }
  return t.record(std::move(out), ids, [ids, widths](const DenseMatrix& g, Tape& tp) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (tp.needs_grad(ids[k])) {
        DenseMatrix part(g.rows(), widths[k]);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < widths[k]; ++c) part(r, c) = g(r, off + c);
        tp.accumulate(ids[k], part);
      }
      off += widths[k];
    }
  });
}

Var select_rows(Var a, std::span<const std::size_t> rows) {
  Tape& t = *a.tape;
  const auto& av = a.value();
  DenseMatrix out(rows.size(), av.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= av.rows()) throw ShapeError("select_rows: row index out of range");
    std::copy(av.row(rows[i]).begin(), av.row(rows[i]).end(), out.row(i).begin());
  }
  std::vector<std::size_t> picked(rows.begin(), rows.end());
  return t.record(std::move(out), {a.id},
                  [ai = a.id, picked = std::move(picked)](const DenseMatrix& g, Tape& tp) {
                    for (std::size_t i = 0; i < picked.size(); ++i)
                      for (std::size_t c = 0; c < g.cols(); ++c)
                        tp.accumulate_at(ai, picked[i], c, g(i, c));
                  });
}

Var select_col(Var a, std::size_t col) {
  Tape& t = *a.tape;
  const auto& av = a.value();
  if (col >= av.cols()) throw ShapeError("select_col: column index out of range");
  DenseMatrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) out(r, 0) = av(r, col);
  return t.record(std::move(out), {a.id}, [ai = a.id, col](const DenseMatrix& g, Tape& tp) {
    for (std::size_t r = 0; r < g.rows(); ++r) tp.accumulate_at(ai, r, col, g(r, 0));
  });
}

Var scale_rows(Var a, Var w) {
  Tape& t = same_tape(a, w, "scale_rows");
  const auto& av = a.value();
  const auto& wv = w.value();
  if (wv.rows() != av.rows() || wv.cols() != 1)
    throw ShapeError("scale_rows: weights must be " + std::to_string(av.rows()) + "x1");
  DenseMatrix out = av;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (auto& v : out.row(r)) v *= wv(r, 0);
  return t.record(std::move(out), {a.id, w.id},
                  [ai = a.id, wi = w.id](const DenseMatrix& g, Tape& tp) {
                    const auto& x = tp.value(ai);
                    const auto& s = tp.value(wi);
                    if (tp.needs_grad(ai)) {
                      DenseMatrix ga = g;
                      for (std::size_t r = 0; r < ga.rows(); ++r)
                        for (auto& v : ga.row(r)) v *= s(r, 0);
                      tp.accumulate(ai, ga);
                    }
                    if (tp.needs_grad(wi)) {
                      DenseMatrix gw(x.rows(), 1);
                      for (std::size_t r = 0; r < x.rows(); ++r)
                        for (std::size_t c = 0; c < x.cols(); ++c) gw(r, 0) += g(r, c) * x(r, c);
                      tp.accumulate(wi, gw);
                    }
                  });
}

Var sum(Var a) {
  Tape& t = *a.tape;
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return t.record(DenseMatrix(1, 1, total), {a.id}, [ai = a.id](const DenseMatrix& g, Tape& tp) {
    const auto& x = tp.value(ai);
    tp.accumulate(ai, DenseMatrix(x.rows(), x.cols(), g(0, 0)));
  });
}

GradCheckResult finite_diff_check(std::vector<DenseMatrix>& params, const LossBuilder& loss_fn,
                                  double eps, const std::function<void(GradientMap&)>& corrupt,
                                  const ReferenceLoss& reference) {
  if (!(eps > 0.0)) throw ContractError("finite_diff_check: eps must be positive");

  auto evaluate = [&](bool with_grad, GradientMap* grads) -> long double {
    if (!with_grad && reference) return reference(params);
    Tape tape;
    std::vector<Var> bound;
    bound.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) bound.push_back(tape.parameter(i, params[i]));
    Var loss = loss_fn(tape, bound);
    const double value = loss.value()(0, 0);
    if (with_grad) *grads = tape.backward(loss);
    return value;
  };

  GradientMap grads;
  evaluate(true, &grads);
  if (corrupt) corrupt(grads);

  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto entries = params[p].data();
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const double saved = entries[e];
      entries[e] = saved + eps;
      const long double up = evaluate(false, nullptr);
      entries[e] = saved - eps;
      const long double down = evaluate(false, nullptr);
      entries[e] = saved;

      const auto numeric = static_cast<double>((up - down) / (2.0L * eps));
      const double analytic = grads.at(p).data()[e];
      const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), 1e-8);
      if (rel > result.max_rel_error || !std::isfinite(rel)) {
        result = {std::isfinite(rel) ? rel : INFINITY, p, e, analytic, numeric};
      }
    }
  }
  return result;
}

}  // namespace infrank
