#pragma once

#include <string>

#include "blockgs/bcgs.hpp"
#include "blockgs/dense_matrix.hpp"
#include "blockgs/metrics.hpp"

namespace blockgs {

struct FactorOutcome {
  bool ok = false;
  std::string error;  // NotSpd diagnostic when !ok
  int not_spd_pivot = 0;
  DenseMatrix q;      // gathered on every rank and checked identical
  UpperTriangular r;  // replicated and checked identical
  SyncStats stats;    // factorization phase only (the final gather excluded)
  double loo = 0.0;
  double resid = 0.0;
  bool x_was_zero = false;
};

/// Distribute x over `procs` simulated processes, run the variant, gather Q,
/// and measure.  Cross-rank replication invariants (identical R, identical
/// gathered Q, identical sync counters) are enforced here; a violation is a
/// library bug and throws Error.  A NotSpdError becomes ok = false with the
/// diagnostic preserved.  When opts.probe is set it fires on every rank.
FactorOutcome run_factor(VariantId v, const DenseMatrix& x, long s, int procs,
                         const BcgsOptions& opts = {});

}  // namespace blockgs
