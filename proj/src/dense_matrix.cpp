#include "blockgs/dense_matrix.hpp"

#include <cmath>
#include <cstring>

#include "blockgs/errors.hpp"

namespace blockgs {

DenseMatrix::DenseMatrix(long rows, long cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw DimensionError("matrix dimensions must be nonnegative");
  }
  data_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
}

DenseMatrix DenseMatrix::identity(long n) {
  DenseMatrix m(n, n);
  for (long i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::sub(long r0, long r1, long c0, long c1) const {
  if (r0 < 0 || r1 < r0 || r1 > rows_ || c0 < 0 || c1 < c0 || c1 > cols_) {
    throw DimensionError("sub-block out of range");
  }
  DenseMatrix out(r1 - r0, c1 - c0);
  for (long j = c0; j < c1; ++j) {
    for (long i = r0; i < r1; ++i) {
      out(i - r0, j - c0) = (*this)(i, j);
    }
  }
  return out;
}

void DenseMatrix::set_sub(long r0, long c0, const DenseMatrix& block) {
  if (r0 < 0 || c0 < 0 || r0 + block.rows() > rows_ ||
      c0 + block.cols() > cols_) {
    throw DimensionError("set_sub out of range");
  }
  for (long j = 0; j < block.cols(); ++j) {
    for (long i = 0; i < block.rows(); ++i) {
      (*this)(r0 + i, c0 + j) = block(i, j);
    }
  }
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  for (long j = 0; j < cols_; ++j) {
    for (long i = 0; i < rows_; ++i) {
      out(j, i) = (*this)(i, j);
    }
  }
  return out;
}

double DenseMatrix::frobenius_norm() const {
  // Scaled two-pass form to avoid overflow on ill-conditioned inputs.
  double mx = max_abs();
  if (mx == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : data_) {
    double t = v / mx;
    acc += t * t;
  }
  return mx * std::sqrt(acc);
}

double DenseMatrix::max_abs() const {
  double mx = 0.0;
  for (double v : data_) {
    double a = std::fabs(v);
    if (a > mx) mx = a;
  }
  return mx;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

static void require_same_shape(const DenseMatrix& a, const DenseMatrix& b,
                               const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator+");
  DenseMatrix out(a.rows(), a.cols());
  for (long k = 0; k < a.size(); ++k) out.data()[k] = a.data()[k] + b.data()[k];
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator-");
  DenseMatrix out(a.rows(), a.cols());
  for (long k = 0; k < a.size(); ++k) out.data()[k] = a.data()[k] - b.data()[k];
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: inner dimensions differ");
  }
  DenseMatrix out(a.rows(), b.cols());
  for (long j = 0; j < b.cols(); ++j) {
    for (long i = 0; i < a.rows(); ++i) {
      double acc = 0.0;
      for (long k = 0; k < a.cols(); ++k) {
        acc += a(i, k) * b(k, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("multiply_at_b: row counts differ");
  }
  DenseMatrix out(a.cols(), b.cols());
  for (long j = 0; j < b.cols(); ++j) {
    for (long i = 0; i < a.cols(); ++i) {
      double acc = 0.0;
      for (long k = 0; k < a.rows(); ++k) {
        acc += a(k, i) * b(k, j);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
  if (top.cols() != bottom.cols()) {
    throw DimensionError("vstack: column counts differ");
  }
  DenseMatrix out(top.rows() + bottom.rows(), top.cols());
  out.set_sub(0, 0, top);
  out.set_sub(top.rows(), 0, bottom);
  return out;
}

DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right) {
  if (left.rows() != right.rows()) {
    throw DimensionError("hstack: row counts differ");
  }
  DenseMatrix out(left.rows(), left.cols() + right.cols());
  out.set_sub(0, 0, left);
  out.set_sub(0, left.cols(), right);
  return out;
}

bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  return std::memcmp(a.data().data(), b.data().data(),
                     sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

UpperTriangular::UpperTriangular(long dim, long block_width)
    : dim_(dim), bw_(block_width), dense_(dim, dim) {
  if (block_width <= 0 || dim % block_width != 0) {
    throw DimensionError("block width must divide the dimension");
  }
}

UpperTriangular UpperTriangular::from_dense(const DenseMatrix& m,
                                            long block_width) {
  if (m.rows() != m.cols()) {
    throw DimensionError("from_dense: matrix must be square");
  }
  for (long j = 0; j < m.cols(); ++j) {
    for (long i = j + 1; i < m.rows(); ++i) {
      if (m(i, j) != 0.0) {
        throw DimensionError("from_dense: strict lower triangle not zero");
      }
    }
  }
  UpperTriangular r(m.rows(), block_width);
  r.dense_ = m;
  return r;
}

void UpperTriangular::set(long i, long j, double v) {
  if (i > j) {
    throw DimensionError("cannot write below the diagonal");
  }
  dense_(i, j) = v;
}

DenseMatrix UpperTriangular::block(long bi, long bj) const {
  return dense_.sub(bi * bw_, (bi + 1) * bw_, bj * bw_, (bj + 1) * bw_);
}

void UpperTriangular::set_block(long bi, long bj, const DenseMatrix& m) {
  if (bi > bj) {
    throw DimensionError("cannot write a block below the diagonal");
  }
  if (m.rows() != bw_ || m.cols() != bw_) {
    throw DimensionError("set_block: block shape mismatch");
  }
  if (bi == bj) {
    for (long j = 0; j < bw_; ++j) {
      for (long i = j + 1; i < bw_; ++i) {
        if (m(i, j) != 0.0) {
          throw DimensionError("diagonal block must be upper triangular");
        }
      }
    }
  }
  dense_.set_sub(bi * bw_, bj * bw_, m);
}

UpperTriangular triu_mult(const UpperTriangular& a, const UpperTriangular& b) {
  if (a.dim() != b.dim() || a.block_width() != b.block_width()) {
    throw DimensionError("triu_mult: structure mismatch");
  }
  long n = a.dim();
  UpperTriangular out(n, a.block_width());
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i <= j; ++i) {
      double acc = 0.0;
      for (long k = i; k <= j; ++k) {
        acc += a.at(i, k) * b.at(k, j);
      }
      out.set(i, j, acc);
    }
  }
  return out;
}

}  // namespace blockgs
