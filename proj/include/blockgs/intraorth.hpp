#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blockgs/dist_block.hpp"

namespace blockgs {

/// How a single block vector gets orthonormalized.  TSQR is unconditionally
/// stable; CholQR costs the same single sync but loses orthogonality like
/// kappa^2 and fails (NotSpdError) once the Gram matrix stops being
/// numerically positive definite.
enum class IntraorthKind { Tsqr, CholQr };

/// Economic QR of a distributed block vector via a TSQR reduction tree:
/// local Householder QR per leaf, one reduce_factor_tree-style collective
/// over the leaf R factors, then local Q reconstruction from the tree's
/// small Q factors.  Exactly one sync; R is upper triangular with
/// nonnegative diagonal.  Throws RankDeficientError when n < cols.
std::pair<DistBlockMatrix, DenseMatrix> tsqr(const DistBlockMatrix& xb,
                                             Communicator& comm);

struct TsqrFusedResult {
  DistBlockMatrix q;
  DenseMatrix r;
  DenseMatrix fused;  // the piggybacked (concat left)^T (concat right)
};

/// TSQR of xb whose collective also carries an exact Gram grid for
/// (concat left)^T (concat right) — one rendezvous for both results.  Used
/// by the one-sync variants' prologue, where the first Gram product has no
/// data dependency on the TSQR output.
TsqrFusedResult tsqr_fused_gram(const DistBlockMatrix& xb,
                                const std::vector<BlockSpan>& left,
                                const std::vector<BlockSpan>& right,
                                Communicator& comm, const std::string& label);

/// Economic QR via Cholesky of the Gram matrix: one fused_gram sync, then
/// local chol and triangular solve.  Throws NotSpdError when kappa(X) is
/// beyond the u^{-1/2} regime.
std::pair<DistBlockMatrix, DenseMatrix> cholqr(const DistBlockMatrix& xb,
                                               Communicator& comm);

/// chol(T - S^T S), the Pythagorean form of the projection-complement Gram
/// block.  Symmetrizes before factoring; communication-free.
DenseMatrix pyth_chol(const DenseMatrix& t, const DenseMatrix& s);

}  // namespace blockgs
