#pragma once

#include <cstdint>

#include "blockgs/dense_matrix.hpp"

namespace blockgs {

enum class MatrixDistribution {
  GeometricSingularValues,  // controlled condition number
  RandomGaussian,           // i.i.d. standard normal entries
};

struct MatrixSpec {
  long n = 0;              // rows
  long m = 0;              // columns, must be q * s
  long s = 1;              // block width
  double kappa = 1.0;      // target 2-norm condition number (geometric mode)
  std::uint64_t seed = 0;  // same spec + seed => bitwise identical matrix
  MatrixDistribution distribution = MatrixDistribution::GeometricSingularValues;
};

/// Deterministic test matrix.  Geometric mode builds X = U diag(sigma) V^T
/// with sigma log-spaced from 1 down to 1/kappa and U, V orthonormal factors
/// of seeded Gaussian matrices, so the measured condition number lands on
/// the target up to rounding.  Gaussian mode returns the raw normal draws.
DenseMatrix gen_matrix(const MatrixSpec& spec);

}  // namespace blockgs
