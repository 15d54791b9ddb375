#include <doctest.h>

#include <cmath>
#include <numeric>

#include "influencerrank/errors.hpp"
#include "influencerrank/matrix.hpp"
#include "influencerrank/rng.hpp"

using namespace infrank;

namespace {

DenseMatrix random_dense(std::size_t r, std::size_t c, Rng& rng) {
  DenseMatrix m(r, c);
  for (auto& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

SparseMatrix random_sparse(std::size_t r, std::size_t c, double density, Rng& rng) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (rng.bernoulli(density)) t.push_back({i, j, rng.uniform(-2.0, 2.0)});
  return SparseMatrix::from_triplets(r, c, std::move(t));
}

// Triple loop, kept independent of the library kernels.
DenseMatrix naive(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

}  // namespace

TEST_SUITE("matrix") {
  TEST_CASE("identity sparse times X is X") {
    Rng rng(1);
    const auto x = random_dense(3, 4, rng);
    CHECK(spmm(SparseMatrix::identity(3), x) == x);
  }

  TEST_CASE("zero sparse times X is zero") {
    Rng rng(2);
    const auto x = random_dense(3, 5, rng);
    const auto z = SparseMatrix::from_triplets(3, 3, {});
    CHECK(spmm(z, x) == DenseMatrix(3, 5));
  }

  TEST_CASE("spmm matches dense oracle on random 4x4") {
    Rng rng(3);
    const auto a = random_sparse(4, 4, 0.5, rng);
    const auto x = random_dense(4, 4, rng);
    CHECK(max_abs_diff(spmm(a, x), naive(a.to_dense(), x)) <= 1e-12);
  }

  TEST_CASE("spmm and spmm_tn match dense oracle up to 16x16") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t r = 1 + rng.below(16), c = 1 + rng.below(16), w = 1 + rng.below(16);
      const auto a = random_sparse(r, c, rng.uniform(0.0, 0.6), rng);
      const auto x = random_dense(c, w, rng);
      CHECK(max_abs_diff(spmm(a, x), naive(a.to_dense(), x)) <= 1e-12);
      const auto y = random_dense(r, w, rng);
      CHECK(max_abs_diff(spmm_tn(a, y), naive(transpose(a.to_dense()), y)) <= 1e-12);
    }
  }

  TEST_CASE("dense products agree with the naive loop") {
    Rng rng(5);
    const auto a = random_dense(5, 3, rng), b = random_dense(3, 4, rng), c = random_dense(5, 4, rng);
    CHECK(max_abs_diff(matmul(a, b), naive(a, b)) <= 1e-12);
    CHECK(max_abs_diff(matmul_tn(a, c), naive(transpose(a), c)) <= 1e-12);
    CHECK(max_abs_diff(matmul_nt(c, b), naive(c, transpose(b))) <= 1e-12);
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
  }

  TEST_CASE("from_triplets sums duplicates and sorts columns") {
    const auto a = SparseMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, 3.0}});
    CHECK(a.nnz() == 3);
    CHECK(a.at(0, 2) == 1.5);
    CHECK(a.at(0, 1) == 0.0);
    const auto idx = a.indices();
    CHECK(idx[0] < idx[1]);
    CHECK(a.transposed().at(2, 0) == 1.5);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), ContractError);
  }

  TEST_CASE("softmax sums to one and ignores shifts") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(1 + rng.below(10));
      for (auto& x : v) x = rng.uniform(-20.0, 20.0);
      const auto s = softmax(v);
      CHECK(std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 1.0) <= 1e-12);
      auto shifted = v;
      for (auto& x : shifted) x += 123.25;
      const auto t = softmax(shifted);
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] - t[i]) <= 1e-12);
    }
  }

  TEST_CASE("softmax examples") {
    const std::vector<double> equal(4, 0.7);
    for (double p : softmax(equal)) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
    const std::vector<double> v{std::log(2.0), 0.0};
    const auto s = softmax(v);
    CHECK(std::abs(s[0] - 2.0 / 3.0) <= 1e-15);
    CHECK(std::abs(s[1] - 1.0 / 3.0) <= 1e-15);
    CHECK_THROWS_AS(softmax(std::vector<double>{}), ContractError);
  }
}
