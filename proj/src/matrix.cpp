#include "influencerrank/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "influencerrank/errors.hpp"

namespace infrank {

namespace {

std::string dims(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("DenseMatrix: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: " + dims(a) + " * " + dims(b));
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.row(i).data();
    const double* ar = a.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = ar[k];
      if (s == 0.0) continue;
      const double* br = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: " + dims(a) + "^T * " + dims(b));
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* ar = a.row(k).data();
    const double* br = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = ar[i];
      if (s == 0.0) continue;
      double* o = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: " + dims(a) + " * " + dims(b) + "^T");
  DenseMatrix out(a.rows(), b.rows());
  const std::size_t inner = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* br = b.row(j).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < inner; ++k) acc += ar[k] * br[k];
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

void add_inplace(DenseMatrix& dst, const DenseMatrix& src) {
  if (!dst.same_shape(src)) throw ShapeError("add_inplace: " + dims(dst) + " += " + dims(src));
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("max_abs_diff: " + dims(a) + " vs " + dims(b));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols)
      throw ShapeError("SparseMatrix: entry (" + std::to_string(t.row) + "," +
                       std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                       std::to_string(cols));
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.offsets_.assign(rows + 1, 0);
  for (std::size_t i = 0; i < entries.size();) {
    const auto& t = entries[i];
    double v = t.value;
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].row == t.row && entries[j].col == t.col)
      v += entries[j++].value;
    m.indices_.push_back(t.col);
    m.values_.push_back(v);
    ++m.offsets_[t.row + 1];
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) m.offsets_[r + 1] += m.offsets_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto first = indices_.begin() + static_cast<std::ptrdiff_t>(offsets_[r]);
  auto last = indices_.begin() + static_cast<std::ptrdiff_t>(offsets_[r + 1]);
  auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - indices_.begin())];
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t p = offsets_[r]; p < offsets_[r + 1]; ++p) d(r, indices_[p]) = values_[p];
  return d;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t p = offsets_[r]; p < offsets_[r + 1]; ++p)
      t.push_back({indices_[p], r, values_[p]});
  return from_triplets(cols_, rows_, std::move(t));
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.cols() != x.rows())
    throw ShapeError("spmm: sparse " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " * " + dims(x));
  DenseMatrix out(a.rows(), x.cols());
  const auto off = a.offsets();
  const auto idx = a.indices();
  const auto val = a.values();
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double* o = out.row(r).data();
    for (std::size_t p = off[r]; p < off[r + 1]; ++p) {
      const double s = val[p];
      const double* xr = x.row(idx[p]).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * xr[j];
    }
  }
  return out;
}

DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.rows() != x.rows())
    throw ShapeError("spmm_tn: sparse " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + "^T * " + dims(x));
  DenseMatrix out(a.cols(), x.cols());
  const auto off = a.offsets();
  const auto idx = a.indices();
  const auto val = a.values();
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* xr = x.row(r).data();
    for (std::size_t p = off[r]; p < off[r + 1]; ++p) {
      const double s = val[p];
      double* o = out.row(idx[p]).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * xr[j];
    }
  }
  return out;
}

std::vector<double> softmax(std::span<const double> v) {
  if (v.empty()) throw ContractError("softmax: empty input");
  const double hi = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - hi);
    total += out[i];
  }
  for (auto& o : out) o /= total;
  return out;
}

}  // namespace infrank
