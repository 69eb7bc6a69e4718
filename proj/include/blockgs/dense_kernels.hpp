#pragma once

#include <vector>

#include "blockgs/dense_matrix.hpp"
#include "blockgs/exact_sum.hpp"

namespace blockgs {

/// Accumulate a^T * b into a column-major grid of a.cols() x b.cols() exact
/// accumulators.  Several calls over disjoint row slices of the same
/// operands build exactly the same accumulator state regardless of how the
/// rows were sliced, which is what makes reductions reproducible across
/// different process counts.
void gram_accumulate(const DenseMatrix& a, const DenseMatrix& b,
                     std::vector<ExactAccumulator>& accs);

/// a^T * b with every entry accumulated exactly and rounded once.
DenseMatrix gram(const DenseMatrix& a, const DenseMatrix& b);

/// Round a column-major accumulator grid back to a rows x cols matrix.
/// Throws NonFiniteError if any accumulator saw a NaN or infinity.
DenseMatrix round_accumulators(long rows, long cols,
                               const std::vector<ExactAccumulator>& accs);

/// Upper Cholesky factor G with G^T G = (A + A^T)/2; entries below the
/// diagonal are exact zeros.  Throws NotSpdError carrying the 1-based index
/// of the first pivot that is not strictly positive.
DenseMatrix chol_factor(const DenseMatrix& a);

/// Solve W * G = B for W, with G upper triangular (W = B G^{-1}).
/// Throws SingularError (1-based index) on an exact zero diagonal entry.
DenseMatrix tri_solve_right(const DenseMatrix& b, const DenseMatrix& g);

/// Solve G^T * W = B for W, with G upper triangular.
DenseMatrix tri_solve_left_trans(const DenseMatrix& g, const DenseMatrix& b);

struct QrResult {
  DenseMatrix q;  // rows x min(rows, cols), orthonormal columns
  DenseMatrix r;  // min(rows, cols) x cols, upper trapezoidal
};

/// Economic Householder QR with the diagonal of R made nonnegative (a
/// canonical choice, so equal inputs give bitwise-equal factors).  Accepts
/// rows < cols; the trapezoidal case shows up when short stacked factors
/// are reduced pairwise.
QrResult householder_qr(const DenseMatrix& x);

/// Largest singular value, via power iteration on the exact Gram matrix.
/// Deterministic: fixed start vector, relative tolerance 1e-10, at most
/// 5000 iterations.
double two_norm(const DenseMatrix& a);

/// Throws NonFiniteError mentioning `what` if any entry is NaN or infinite.
void ensure_finite(const DenseMatrix& m, const char* what);

}  // namespace blockgs
