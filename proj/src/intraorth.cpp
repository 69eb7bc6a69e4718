#include "blockgs/intraorth.hpp"

#include <algorithm>
#include <string>

#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

namespace {

// Leaves of the reduction tree live on a fixed grid of global row ranges so
// the tree (and therefore the rounding) does not depend on the process
// count.  24 slots cover every divisor pattern of the supported small
// process counts; when a shard boundary falls off the grid (e.g. P = 5 and
// an awkward n) each shard becomes one leaf instead, which is still
// deterministic for that fixed P.
constexpr long kLeafGridSlots = 24;

struct LeafPlan {
  bool aligned = false;
  long leaf_width = 0;
  long total_leaves = 0;
};

LeafPlan plan_leaves(long n, int procs) {
  LeafPlan plan;
  plan.leaf_width = (n + kLeafGridSlots - 1) / kLeafGridSlots;
  long per = (n + procs - 1) / procs;
  plan.aligned = true;
  for (int r = 1; r < procs; ++r) {
    long b = std::min(static_cast<long>(r) * per, n);
    if (b < n && b % plan.leaf_width != 0) {
      plan.aligned = false;
      break;
    }
  }
  plan.total_leaves = plan.aligned
                          ? (n + plan.leaf_width - 1) / plan.leaf_width
                          : static_cast<long>(procs);
  return plan;
}

struct LocalLeaves {
  std::vector<TsqrLeafContribution> contribs;
  std::vector<long> leaf_ids;
  std::vector<DenseMatrix> leaf_qs;
  std::vector<long> row_offsets;  // leaf's first row within the shard
};

LocalLeaves factor_local_leaves(const DenseMatrix& local, long row0, long n,
                                const LeafPlan& plan, int rank) {
  LocalLeaves out;
  if (plan.aligned) {
    if (local.rows() == 0) return out;  // empty shard: nothing to contribute
    long r1 = row0 + local.rows();
    long first = row0 / plan.leaf_width;
    long last = (r1 + plan.leaf_width - 1) / plan.leaf_width;
    for (long i = first; i < last; ++i) {
      long g0 = i * plan.leaf_width;
      long g1 = std::min(g0 + plan.leaf_width, n);
      QrResult qr = householder_qr(local.sub(g0 - row0, g1 - row0, 0, local.cols()));
      out.contribs.push_back({i, std::move(qr.r)});
      out.leaf_ids.push_back(i);
      out.leaf_qs.push_back(std::move(qr.q));
      out.row_offsets.push_back(g0 - row0);
    }
  } else {
    // One leaf per rank; an empty shard contributes a 0 x s factor that
    // stacks as a no-op.
    QrResult qr = householder_qr(local);
    out.contribs.push_back({rank, std::move(qr.r)});
    out.leaf_ids.push_back(rank);
    out.leaf_qs.push_back(std::move(qr.q));
    out.row_offsets.push_back(0);
  }
  return out;
}

TsqrFusedResult run_tsqr(const DistBlockMatrix& xb, Communicator& comm,
                         std::vector<ExactAccumulator> fused_grid,
                         long fused_rows, long fused_cols,
                         const std::string& label) {
  long s = xb.cols();
  long n = xb.global_rows();
  if (n < s) {
    throw RankDeficientError("tsqr: block has " + std::to_string(s) +
                             " columns but only " + std::to_string(n) +
                             " global rows");
  }
  LeafPlan plan = plan_leaves(n, comm.size());
  LocalLeaves mine =
      factor_local_leaves(xb.local(), xb.row_offset(), n, plan, comm.rank());
  TsqrReduceOutcome red = comm.tsqr_leaf_reduce(
      std::move(mine.contribs), plan.total_leaves, s, std::move(fused_grid),
      fused_rows, fused_cols, label);
  std::vector<DenseMatrix> ms =
      propagate_tree(red.nodes, red.leaf_heights, red.root_r.rows());
  DenseMatrix q_local(xb.local_rows(), s);
  for (size_t t = 0; t < mine.leaf_ids.size(); ++t) {
    q_local.set_sub(mine.row_offsets[t], 0,
                    multiply(mine.leaf_qs[t],
                             ms[static_cast<size_t>(mine.leaf_ids[t])]));
  }
  TsqrFusedResult out;
  out.q = DistBlockMatrix(n, s, xb.row_offset(), std::move(q_local), comm);
  out.r = std::move(red.root_r);
  out.fused = std::move(red.fused);
  return out;
}

}  // namespace

std::pair<DistBlockMatrix, DenseMatrix> tsqr(const DistBlockMatrix& xb,
                                             Communicator& comm) {
  TsqrFusedResult res =
      run_tsqr(xb, comm, {}, 0, 0, "reduce_factor_tree:tsqr");
  return {std::move(res.q), std::move(res.r)};
}

TsqrFusedResult tsqr_fused_gram(const DistBlockMatrix& xb,
                                const std::vector<BlockSpan>& left,
                                const std::vector<BlockSpan>& right,
                                Communicator& comm, const std::string& label) {
  DenseMatrix l = local_concat(left);
  DenseMatrix r = local_concat(right);
  if (l.rows() != xb.local_rows()) {
    throw DimensionError("tsqr_fused_gram: operands have mismatched rows");
  }
  std::vector<ExactAccumulator> grid(static_cast<size_t>(l.cols()) *
                                     static_cast<size_t>(r.cols()));
  gram_accumulate(l, r, grid);
  return run_tsqr(xb, comm, std::move(grid), l.cols(), r.cols(), label);
}

std::pair<DistBlockMatrix, DenseMatrix> cholqr(const DistBlockMatrix& xb,
                                               Communicator& comm) {
  long s = xb.cols();
  if (xb.global_rows() < s) {
    throw RankDeficientError("cholqr: block has " + std::to_string(s) +
                             " columns but only " +
                             std::to_string(xb.global_rows()) +
                             " global rows");
  }
  std::vector<ExactAccumulator> grid(static_cast<size_t>(s) *
                                     static_cast<size_t>(s));
  gram_accumulate(xb.local(), xb.local(), grid);
  DenseMatrix g =
      comm.exact_allreduce(s, s, std::move(grid), "fused_gram:cholqr");
  DenseMatrix r = chol_factor(g);
  DenseMatrix q_local = tri_solve_right(xb.local(), r);
  return {DistBlockMatrix(xb.global_rows(), s, xb.row_offset(),
                          std::move(q_local), comm),
          std::move(r)};
}

DenseMatrix pyth_chol(const DenseMatrix& t, const DenseMatrix& s) {
  if (t.rows() != t.cols() || s.cols() != t.cols()) {
    throw DimensionError("pyth_chol: shape mismatch");
  }
  return chol_factor(t - multiply_at_b(s, s));
}

}  // namespace blockgs
