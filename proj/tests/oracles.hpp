#pragma once

#include <vector>

#include "blockgs/dense_matrix.hpp"

namespace blockgs::testing {

/// a^T b accumulated in quad precision and rounded once at the end.  An
/// independent reference for the library's exact-accumulator Gram products
/// (agreement is expected to within one ulp; the library result is the
/// correctly rounded one).
DenseMatrix gram_oracle(const DenseMatrix& a, const DenseMatrix& b);

/// Singular values by one-sided Jacobi, descending.  Small and slow;
/// intended for matrices with at most a few hundred columns.
std::vector<double> singular_values_oracle(DenseMatrix a);

/// 2-norm condition number from the Jacobi singular values.
double kappa_oracle(const DenseMatrix& a);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// |a - b| measured in units in the last place of a (0 when bit-identical).
double ulp_gap(double a, double b);

/// Deterministic pseudo-random matrix for property tests (not the library's
/// generator; a plain linear-congruential fill).
DenseMatrix lcg_matrix(long rows, long cols, unsigned long long seed);

}  // namespace blockgs::testing
