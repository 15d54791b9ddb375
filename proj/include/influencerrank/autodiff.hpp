#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "influencerrank/matrix.hpp"

namespace infrank {

class Tape;

using ParamId = std::size_t;
using GradientMap = std::map<ParamId, DenseMatrix>;

/// Handle to one recorded value on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const DenseMatrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Reverse-mode recording of matrix operations.
///
/// Nodes are appended in evaluation order, so the node list is already
/// topologically sorted and backward() is a single reverse sweep. A tape is
/// single-use: record, call backward() once, discard.
class Tape {
 public:
  // Receives the gradient flowing into the node's output and must push
  // contributions to its inputs through Tape::accumulate.
  using BackwardFn = std::function<void(const DenseMatrix& out_grad, Tape& tape)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(DenseMatrix value);
  // Trainable leaf. Each ParamId may be bound at most once per tape.
  Var parameter(ParamId id, const DenseMatrix& value);

  // Records a custom op. `inputs` must already be on this tape.
  Var record(DenseMatrix value, std::vector<std::size_t> inputs, BackwardFn backward);

  const DenseMatrix& value(std::size_t id) const { return nodes_[id].value; }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  void accumulate(std::size_t id, const DenseMatrix& grad);
  // Accumulates into a single entry; avoids a dense temporary for scatter ops.
  void accumulate_at(std::size_t id, std::size_t r, std::size_t c, double g);

  std::size_t size() const { return nodes_.size(); }

  // Gradients of the scalar `loss` w.r.t. every bound parameter. Parameters
  // bound but not on the loss path receive zeros.
  GradientMap backward(Var loss);

 private:
  struct Node {
    DenseMatrix value;
    DenseMatrix grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool needs_grad = false;
    bool grad_ready = false;
  };

  std::vector<Node> nodes_;
  std::vector<std::pair<ParamId, std::size_t>> params_;
  bool consumed_ = false;
};

// Primitive set. All binary ops require both operands on the same tape.
Var matmul(Var a, Var b);
// Sparse a is constant; it must outlive the tape.
Var spmm(const SparseMatrix& a, Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
// a (n×c) + bias (1×c) broadcast over rows.
Var add_row(Var a, Var bias);
Var hadamard(Var a, Var b);
// alpha·a + beta
Var affine(Var a, double alpha, double beta);
Var tanh(Var a);
Var sigmoid(Var a);
Var relu(Var a);
Var log(Var a);
// Row-wise softmax.
Var softmax_rows(Var a);
Var concat_cols(std::span<const Var> parts);
Var select_rows(Var a, std::span<const std::size_t> rows);
Var select_col(Var a, std::size_t col);
// a (n×c) with row i scaled by w(i, 0); w is n×1.
Var scale_rows(Var a, Var w);
// Sum of all entries, 1×1.
Var sum(Var a);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_entry = 0;
  double autodiff = 0.0;
  double numeric = 0.0;
};

// Builds a scalar loss on `tape` from parameters already bound as ids
// 0..params.size()-1.
using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> params)>;

// Compares reverse-mode gradients with central differences
// (loss(p+eps) - loss(p-eps)) / 2eps for every parameter entry. The relative
// error uses denominator max(|autodiff|, 1e-8). An optional hook may edit the
// autodiff gradients before comparison (fault injection in tests).
//
// When `reference` is given, the differences are taken on it instead of on
// loss_fn; it must compute the same loss, typically in higher precision.
using ReferenceLoss = std::function<long double(std::span<const DenseMatrix> params)>;
GradCheckResult finite_diff_check(
    std::vector<DenseMatrix>& params, const LossBuilder& loss_fn, double eps,
    const std::function<void(GradientMap&)>& corrupt = {}, const ReferenceLoss& reference = {});

}  // namespace infrank
