#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace infrank {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a · b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// aᵀ · b without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a · bᵀ without materializing the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

// dst += src, shapes must match.
void add_inplace(DenseMatrix& dst, const DenseMatrix& src);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const std::size_t> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  // Stored value at (r, c), zero when absent.
  double at(std::size_t r, std::size_t c) const;
  DenseMatrix to_dense() const;
  SparseMatrix transposed() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> indices_;
  std::vector<double> values_;
};

// a · x for sparse a.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);
// aᵀ · x for sparse a, used by the reverse pass.
DenseMatrix spmm_tn(const SparseMatrix& a, const DenseMatrix& x);

// Max-subtracted softmax. Throws ContractError on empty input.
std::vector<double> softmax(std::span<const double> v);

}  // namespace infrank
