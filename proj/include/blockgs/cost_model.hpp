#pragma once

#include "blockgs/variant.hpp"

namespace blockgs {

/// Linear latency/bandwidth/compute model for a distributed run.  The
/// defaults are illustrative cluster magnitudes, not measurements; the alpha
/// (latency) term is the one the low-sync reorganizations target.
struct CostModel {
  double alpha = 1e-5;   // seconds per synchronization point
  double beta = 1e-9;    // seconds per word reduced
  double gamma = 1e-10;  // seconds per flop, per process
  int procs = 1;
};

/// What one run cost: measured sync/word counters plus analytic flops.
struct RunCost {
  long sync_count = 0;
  long words_reduced = 0;
  double flops = 0.0;
};

/// alpha*sync_count + beta*words_reduced + gamma*flops/procs.
double predicted_time(const CostModel& model, const RunCost& cost);

/// Speedup of a relative to b: predicted_time(b) / predicted_time(a).
/// In the alpha-only limit this is exactly sync_count(b) / sync_count(a).
/// Throws ConfigError when either predicted time is zero.
double predict_speedup(const CostModel& model, const RunCost& a,
                       const RunCost& b);

/// Analytic flop count for one factorization (leading n-proportional terms:
/// 2nab per Gram or projection update of widths a x b, 4ns^2 per block QR,
/// ns^2 per triangular block scale).  Replicated small-matrix work is
/// excluded; it does not scale with n.
double variant_flops(VariantId v, long n, long m, long s);

}  // namespace blockgs
