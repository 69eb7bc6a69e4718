#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockgs/communicator.hpp"
#include "blockgs/dense_matrix.hpp"

namespace blockgs {

/// An n x (q*s) matrix split 1-D rowwise across the communicator's ranks:
/// rank r owns the contiguous rows [r*ceil(n/P), min((r+1)*ceil(n/P), n)).
/// Columns are logically partitioned into q block columns of width s.  Small
/// square factors never live here; they are replicated plain DenseMatrix
/// values, identical on every rank by construction (each rank copies the same
/// combined payload out of every collective).
class DistBlockMatrix {
 public:
  DistBlockMatrix() = default;
  DistBlockMatrix(long global_rows, long block_width, long row_offset,
                  DenseMatrix local, Communicator comm);

  long global_rows() const { return n_; }
  long cols() const { return local_.cols(); }
  long block_width() const { return s_; }
  long num_blocks() const { return s_ == 0 ? 0 : cols() / s_; }
  long row_offset() const { return row0_; }
  long local_rows() const { return local_.rows(); }

  const DenseMatrix& local() const { return local_; }
  DenseMatrix& local() { return local_; }

  const Communicator& comm() const;
  Communicator& comm();

 private:
  long n_ = 0;
  long s_ = 0;
  long row0_ = 0;
  DenseMatrix local_;
  std::optional<Communicator> comm_;
};

/// A column range [c0, c1) of a distributed matrix, used to describe the
/// operands of a fused Gram product without copying.
struct BlockSpan {
  const DistBlockMatrix* mat = nullptr;
  long c0 = 0;
  long c1 = 0;
};

inline BlockSpan span(const DistBlockMatrix& m, long c0, long c1) {
  return BlockSpan{&m, c0, c1};
}

/// Block column k.
inline BlockSpan block_span(const DistBlockMatrix& m, long k) {
  return BlockSpan{&m, k * m.block_width(), (k + 1) * m.block_width()};
}

/// Block columns 0..k-1 (the already-orthogonalized prefix).
inline BlockSpan prefix_span(const DistBlockMatrix& m, long k) {
  return BlockSpan{&m, 0, k * m.block_width()};
}

/// Slice the full matrix into this rank's shard.  Pure local setup; no
/// synchronization is counted.
DistBlockMatrix distribute(const DenseMatrix& x, long s, Communicator comm);

/// Copy of the local column range [c0, c1) as a standalone single-block
/// distributed matrix with the same row layout.
DistBlockMatrix extract_block(const DistBlockMatrix& x, long c0, long c1);

/// This rank's rows of the listed column ranges, copied side by side.
DenseMatrix local_concat(const std::vector<BlockSpan>& spans);

/// (concat left)^T (concat right) over the global rows, reduced in ONE
/// collective no matter how many logical products are fused.  The reduction
/// merges exact per-rank accumulators, so the result is bitwise identical
/// for every process count.
DenseMatrix fused_gram(const std::vector<BlockSpan>& left,
                       const std::vector<BlockSpan>& right, Communicator& comm,
                       const std::string& label);

/// Shard-local Y[:, yc0:yc1) -= Q[:, qc0:qc1) * s.  Zero synchronizations.
void local_axpy_block(DistBlockMatrix& y, long yc0, long yc1,
                      const DistBlockMatrix& q, long qc0, long qc1,
                      const DenseMatrix& s);

/// Shard-local U[:, c0:c1) <- U[:, c0:c1) * G^{-1}.  Zero synchronizations.
void scale_right_block(DistBlockMatrix& u, long c0, long c1,
                       const DenseMatrix& g);

/// Write a single-block matrix into column range [c0, c0+src.cols()).
void set_block(DistBlockMatrix& dst, long c0, const DistBlockMatrix& src);

/// Reassemble the full matrix on every rank.  Counted as one sync labeled
/// "gather"; algorithm-phase assertions filter it out by label.
DenseMatrix gather(const DistBlockMatrix& d);

}  // namespace blockgs
