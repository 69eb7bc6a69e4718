#pragma once

#include <vector>

#include "blockgs/dense_matrix.hpp"

namespace blockgs {

/// One internal node of a TSQR reduction tree: the Q factor of the QR of its
/// two children's vertically stacked R factors, plus the children's heights.
struct TsqrNode {
  long h1 = 0;    // rows contributed by the left child's R
  long h2 = 0;    // rows contributed by the right child's R
  DenseMatrix q;  // (h1+h2) x (rows of this node's R)
};

struct TsqrTreeResult {
  DenseMatrix root_r;
  std::vector<TsqrNode> nodes;  // post-order (children before parent)
  int rounds = 0;               // pairwise-combine levels (tree height)
};

/// Pairwise-combine leaf R factors over a balanced binary tree whose shape
/// depends only on the leaf count.  Feeding the same leaf factors always
/// produces bitwise-identical results, no matter how the leaves were grouped
/// across processes.
TsqrTreeResult combine_leaf_factors(const std::vector<DenseMatrix>& leaf_rs);

/// Back-propagate a tree's Q factors: returns, per leaf, the small matrix M
/// with Q_global(leaf rows) = Q_leaf * M.  leaf_heights must be the row
/// counts of the leaf factors fed to combine_leaf_factors, and root_height
/// the row count of the returned root R.
std::vector<DenseMatrix> propagate_tree(const std::vector<TsqrNode>& nodes,
                                        const std::vector<long>& leaf_heights,
                                        long root_height);

}  // namespace blockgs
