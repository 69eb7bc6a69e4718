#include "blockgs/tsqr_tree.hpp"

#include <algorithm>

#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

namespace {

// Combine leaves [lo, hi]; appends internal nodes post-order and reports the
// subtree's combine depth through `height`.
DenseMatrix build_subtree(const std::vector<DenseMatrix>& leaf_rs, long lo,
                          long hi, std::vector<TsqrNode>& nodes, int& height) {
  if (lo == hi) {
    height = 0;
    return leaf_rs[static_cast<size_t>(lo)];
  }
  long mid = lo + (hi - lo + 1) / 2;
  int left_height = 0;
  int right_height = 0;
  DenseMatrix a = build_subtree(leaf_rs, lo, mid - 1, nodes, left_height);
  DenseMatrix b = build_subtree(leaf_rs, mid, hi, nodes, right_height);
  QrResult qr = householder_qr(vstack(a, b));
  nodes.push_back(TsqrNode{a.rows(), b.rows(), std::move(qr.q)});
  height = 1 + std::max(left_height, right_height);
  return std::move(qr.r);
}

void propagate_subtree(const std::vector<TsqrNode>& nodes, long lo, long hi,
                       long node_at, const DenseMatrix& m,
                       std::vector<DenseMatrix>& out) {
  if (lo == hi) {
    out[static_cast<size_t>(lo)] = m;
    return;
  }
  const TsqrNode& nd = nodes[static_cast<size_t>(node_at)];
  long mid = lo + (hi - lo + 1) / 2;
  long right_internal = (hi - mid + 1) - 1;  // internal nodes = leaves - 1
  DenseMatrix m_left = multiply(nd.q.sub(0, nd.h1, 0, nd.q.cols()), m);
  DenseMatrix m_right =
      multiply(nd.q.sub(nd.h1, nd.h1 + nd.h2, 0, nd.q.cols()), m);
  propagate_subtree(nodes, lo, mid - 1, node_at - right_internal - 1, m_left,
                    out);
  propagate_subtree(nodes, mid, hi, node_at - 1, m_right, out);
}

}  // namespace

TsqrTreeResult combine_leaf_factors(const std::vector<DenseMatrix>& leaf_rs) {
  if (leaf_rs.empty()) {
    throw DimensionError("combine_leaf_factors: no leaves");
  }
  TsqrTreeResult result;
  result.root_r =
      build_subtree(leaf_rs, 0, static_cast<long>(leaf_rs.size()) - 1,
                    result.nodes, result.rounds);
  return result;
}

std::vector<DenseMatrix> propagate_tree(const std::vector<TsqrNode>& nodes,
                                        const std::vector<long>& leaf_heights,
                                        long root_height) {
  if (leaf_heights.empty()) {
    throw DimensionError("propagate_tree: no leaves");
  }
  long k = static_cast<long>(leaf_heights.size());
  std::vector<DenseMatrix> out(static_cast<size_t>(k));
  propagate_subtree(nodes, 0, k - 1, static_cast<long>(nodes.size()) - 1,
                    DenseMatrix::identity(root_height), out);
  for (long i = 0; i < k; ++i) {
    if (out[static_cast<size_t>(i)].rows() != leaf_heights[static_cast<size_t>(i)]) {
      throw DimensionError("propagate_tree: leaf heights disagree with tree");
    }
  }
  return out;
}

}  // namespace blockgs
