#pragma once

#include <functional>

#include "blockgs/dist_block.hpp"
#include "blockgs/intraorth.hpp"
#include "blockgs/sync_stats.hpp"
#include "blockgs/variant.hpp"

namespace blockgs {

/// Observation hook for the delayed-reprojection recurrence used by the
/// one-sync variants.  Fires once per evaluation of
///   S2 = Y_kk^{-T} (P_k - Y^T Z),
/// which stands in for the never-communicated product Q_k^T X_{k+1}.
/// `k` is the 1-based index of the block column Q_k; `q_local` / `x_local`
/// are this rank's rows of Q_k and X_{k+1} so a test can assemble the direct
/// product for comparison.
struct RecurrenceProbe {
  std::function<void(long k, const DenseMatrix& s2, const DenseMatrix& q_local,
                     const DenseMatrix& x_local)>
      on_eval;
};

struct BcgsOptions {
  /// Intra-block orthogonalization used by classic BCGS (the other variants
  /// fix their own kernels).
  IntraorthKind classic_intra = IntraorthKind::Tsqr;
  const RecurrenceProbe* probe = nullptr;
};

struct BcgsResult {
  DistBlockMatrix q;
  UpperTriangular r;
  /// Collective activity attributable to the factorization itself (excludes
  /// anything the caller does before or after, e.g. gathering Q).
  SyncStats stats;
};

BcgsResult bcgs_classic(const DistBlockMatrix& x, Communicator& comm,
                        IntraorthKind intra = IntraorthKind::Tsqr);
BcgsResult bcgs_iro(const DistBlockMatrix& x, Communicator& comm);
BcgsResult bcgs_pipi_plus(const DistBlockMatrix& x, Communicator& comm);
BcgsResult bcgs_ip_1s(const DistBlockMatrix& x, Communicator& comm,
                      const RecurrenceProbe* probe = nullptr);
BcgsResult bcgs_ip_2s(const DistBlockMatrix& x, Communicator& comm);
BcgsResult bcgs_i_1s(const DistBlockMatrix& x, Communicator& comm);

BcgsResult run_variant(VariantId v, const DistBlockMatrix& x, Communicator& comm,
                       const BcgsOptions& opts = {});

}  // namespace blockgs
