#include "blockgs/dist_block.hpp"

#include <algorithm>

#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

DistBlockMatrix::DistBlockMatrix(long global_rows, long block_width,
                                 long row_offset, DenseMatrix local,
                                 Communicator comm)
    : n_(global_rows),
      s_(block_width),
      row0_(row_offset),
      local_(std::move(local)),
      comm_(std::move(comm)) {
  if (s_ <= 0 || local_.cols() % s_ != 0) {
    throw DimensionError("block width must divide the column count");
  }
}

const Communicator& DistBlockMatrix::comm() const {
  if (!comm_) throw DimensionError("distributed matrix has no communicator");
  return *comm_;
}

Communicator& DistBlockMatrix::comm() {
  if (!comm_) throw DimensionError("distributed matrix has no communicator");
  return *comm_;
}

DistBlockMatrix distribute(const DenseMatrix& x, long s, Communicator comm) {
  if (s <= 0 || x.cols() % s != 0) {
    throw DimensionError("distribute: block width must divide the columns");
  }
  long n = x.rows();
  long p = comm.size();
  long per = (n + p - 1) / p;  // ceiling split; the last shards may be short
  long r0 = std::min(static_cast<long>(comm.rank()) * per, n);
  long r1 = std::min(r0 + per, n);
  return DistBlockMatrix(n, s, r0, x.sub(r0, r1, 0, x.cols()),
                         std::move(comm));
}

DistBlockMatrix extract_block(const DistBlockMatrix& x, long c0, long c1) {
  return DistBlockMatrix(x.global_rows(), c1 - c0, x.row_offset(),
                         x.local().sub(0, x.local_rows(), c0, c1), x.comm());
}

namespace {

long span_cols(const std::vector<BlockSpan>& spans) {
  long total = 0;
  for (const auto& sp : spans) total += sp.c1 - sp.c0;
  return total;
}

}  // namespace

DenseMatrix local_concat(const std::vector<BlockSpan>& spans) {
  if (spans.empty()) {
    throw DimensionError("local_concat: empty operand list");
  }
  long rows = spans[0].mat->local_rows();
  DenseMatrix out(rows, span_cols(spans));
  long at = 0;
  for (const auto& sp : spans) {
    if (sp.mat->local_rows() != rows ||
        sp.mat->global_rows() != spans[0].mat->global_rows()) {
      throw DimensionError("local_concat: operands have mismatched rows");
    }
    out.set_sub(0, at, sp.mat->local().sub(0, rows, sp.c0, sp.c1));
    at += sp.c1 - sp.c0;
  }
  return out;
}

DenseMatrix fused_gram(const std::vector<BlockSpan>& left,
                       const std::vector<BlockSpan>& right, Communicator& comm,
                       const std::string& label) {
  DenseMatrix l = local_concat(left);
  DenseMatrix r = local_concat(right);
  std::vector<ExactAccumulator> grid(static_cast<size_t>(l.cols()) *
                                     static_cast<size_t>(r.cols()));
  gram_accumulate(l, r, grid);
  return comm.exact_allreduce(l.cols(), r.cols(), std::move(grid), label);
}

void local_axpy_block(DistBlockMatrix& y, long yc0, long yc1,
                      const DistBlockMatrix& q, long qc0, long qc1,
                      const DenseMatrix& s) {
  if (s.rows() != qc1 - qc0 || s.cols() != yc1 - yc0 ||
      y.local_rows() != q.local_rows()) {
    throw DimensionError("local_axpy_block: shape mismatch");
  }
  DenseMatrix& yl = y.local();
  const DenseMatrix& ql = q.local();
  for (long j = 0; j < s.cols(); ++j) {
    for (long i = 0; i < yl.rows(); ++i) {
      double acc = 0.0;
      for (long k = 0; k < s.rows(); ++k) {
        acc += ql(i, qc0 + k) * s(k, j);
      }
      yl(i, yc0 + j) -= acc;
    }
  }
}

void scale_right_block(DistBlockMatrix& u, long c0, long c1,
                       const DenseMatrix& g) {
  if (g.rows() != c1 - c0) {
    throw DimensionError("scale_right_block: shape mismatch");
  }
  DenseMatrix block = u.local().sub(0, u.local_rows(), c0, c1);
  u.local().set_sub(0, c0, tri_solve_right(block, g));
}

void set_block(DistBlockMatrix& dst, long c0, const DistBlockMatrix& src) {
  if (dst.local_rows() != src.local_rows() ||
      dst.row_offset() != src.row_offset()) {
    throw DimensionError("set_block: row layout mismatch");
  }
  dst.local().set_sub(0, c0, src.local());
}

DenseMatrix gather(const DistBlockMatrix& d) {
  Communicator comm = d.comm();
  return comm.gather_rows(d.local(), "gather");
}

}  // namespace blockgs
