#pragma once

#include <cstdint>
#include <vector>

namespace blockgs {

/// Column-major dense real64 matrix.  Plain value type; all block extraction
/// in this library copies (everything above the tall dimension is small).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(long rows, long cols);  // zero-filled

  static DenseMatrix identity(long n);

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  long size() const { return rows_ * cols_; }

  double& operator()(long i, long j) { return data_[j * rows_ + i]; }
  double operator()(long i, long j) const { return data_[j * rows_ + i]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Copy of rows [r0, r1) x cols [c0, c1).
  DenseMatrix sub(long r0, long r1, long c0, long c1) const;
  void set_sub(long r0, long c0, const DenseMatrix& block);

  DenseMatrix transposed() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  long rows_ = 0;
  long cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

/// A * B with a fixed ijk loop order (deterministic).
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// A^T * B in plain double arithmetic, fixed summation order.  Intended for
/// small replicated factors; the exact path for tall operands is gram().
DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom);
DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right);

bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b);

/// Upper-triangular matrix with an s x s block structure (dim = q*s).
/// Entries strictly below the diagonal are stored zeros and stay exactly
/// zero; setters reject attempts to write there.
class UpperTriangular {
 public:
  UpperTriangular() = default;
  UpperTriangular(long dim, long block_width);

  /// Wrap a square dense matrix whose strict lower triangle is exactly zero.
  static UpperTriangular from_dense(const DenseMatrix& m, long block_width);

  long dim() const { return dim_; }
  long block_width() const { return bw_; }
  long num_blocks() const { return bw_ == 0 ? 0 : dim_ / bw_; }

  double at(long i, long j) const { return dense_(i, j); }
  void set(long i, long j, double v);

  /// The s x s block at block row bi, block column bj (bi <= bj).
  DenseMatrix block(long bi, long bj) const;
  void set_block(long bi, long bj, const DenseMatrix& m);

  const DenseMatrix& to_dense() const { return dense_; }

 private:
  long dim_ = 0;
  long bw_ = 0;
  DenseMatrix dense_;
};

/// Product of two conforming upper-triangular matrices; only the upper
/// triangle is computed, so the strict lower triangle stays exactly zero.
UpperTriangular triu_mult(const UpperTriangular& a, const UpperTriangular& b);

}  // namespace blockgs
