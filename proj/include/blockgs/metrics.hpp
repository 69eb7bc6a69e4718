#pragma once

#include "blockgs/dense_matrix.hpp"

namespace blockgs {

/// two_norm(Q^T Q - I), the standard orthogonality defect.  The Gram matrix
/// is accumulated exactly before the subtraction so tiny defects are not
/// polluted by the measurement itself.
double loss_of_orthogonality(const DenseMatrix& q);

struct ResidualResult {
  double value = 0.0;
  /// X was exactly zero, so `value` is the absolute ||QR||_F instead of the
  /// usual relative residual.
  bool x_was_zero = false;
};

/// ||X - QR||_F / ||X||_F.
ResidualResult residual(const DenseMatrix& x, const DenseMatrix& q,
                        const DenseMatrix& r);

}  // namespace blockgs
