#pragma once

#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "blockgs/dense_matrix.hpp"
#include "blockgs/errors.hpp"
#include "blockgs/exact_sum.hpp"
#include "blockgs/sync_stats.hpp"
#include "blockgs/tsqr_tree.hpp"

namespace blockgs {

class CollectiveContext;

std::shared_ptr<CollectiveContext> make_collective_context(int procs);
SyncStats collective_stats(const CollectiveContext& ctx);

/// Mark the run as failed so ranks parked in (or about to enter) a
/// collective stop immediately instead of waiting out the deadlock budget.
void abort_collectives(CollectiveContext& ctx, const std::string& why);

enum class Backend { serial, simulated };

/// One leaf contribution to a TSQR reduction: the R factor of the leaf's
/// local QR, tagged with its position in the global leaf order.
struct TsqrLeafContribution {
  long leaf_index = 0;
  DenseMatrix r;
};

struct TsqrReduceOutcome {
  DenseMatrix root_r;
  std::vector<TsqrNode> nodes;     // combine trace, identical on every rank
  std::vector<long> leaf_heights;  // R rows per leaf, global leaf order
  DenseMatrix fused;               // piggybacked Gram result; 0x0 when absent
};

/// Per-rank handle for collectives.  All ranks of a run share one context;
/// every collective is a full-arity rendezvous of all P ranks that bumps the
/// shared sync counter exactly once and hands every rank the identical
/// result.  A rank that never shows up trips the deadlock detector after
/// BLOCKGS_DEADLOCK_BUDGET_MS (default 5000).
class Communicator {
 public:
  Communicator(std::shared_ptr<CollectiveContext> ctx, int rank);

  int rank() const { return rank_; }
  int size() const;
  Backend backend() const;

  SyncStats stats() const;
  void reset_stats();
  int last_collective_rounds() const;

  /// Elementwise sum over ranks, combined in rank order 0..P-1.
  DenseMatrix allreduce_sum(const DenseMatrix& local, const std::string& label);

  /// Binary-tree pairwise combine over the ranks' factors followed by a
  /// broadcast of the root; the whole tree counts as one sync event.  Every
  /// rank must pass an equivalent combine function.
  DenseMatrix reduce_factor_tree(
      const DenseMatrix& local_r,
      const std::function<DenseMatrix(const DenseMatrix&, const DenseMatrix&)>&
          combine,
      const std::string& label);

  /// Merge per-rank exact-accumulator grids and round once.  Merging is
  /// exact, so the result is identical no matter how the summands were
  /// partitioned across ranks.
  DenseMatrix exact_allreduce(long rows, long cols,
                              std::vector<ExactAccumulator> grid,
                              const std::string& label);

  /// TSQR reduction over a fixed global grid of leaf factors (each rank
  /// contributes the leaves its rows cover), optionally carrying an
  /// exact-accumulator Gram grid in the same rendezvous.  One sync event.
  TsqrReduceOutcome tsqr_leaf_reduce(std::vector<TsqrLeafContribution> leaves,
                                     long total_leaves, long cols,
                                     std::vector<ExactAccumulator> fused_grid,
                                     long fused_rows, long fused_cols,
                                     const std::string& label);

  /// Concatenate shards in rank order; every rank receives the full matrix.
  DenseMatrix gather_rows(const DenseMatrix& local, const std::string& label);

 private:
  std::shared_ptr<CollectiveContext> ctx_;
  int rank_;
};

/// Run body(comm) once per rank — worker threads when procs > 1, inline when
/// procs == 1 — and return every rank's result plus the run's SyncStats.
/// When a rank throws, the others' pending collectives are aborted and the
/// originating rank's exception is rethrown (secondary collective aborts are
/// reported only if nothing better is available).
template <typename Fn>
auto run_spmd(int procs, Fn body)
    -> std::pair<
        std::vector<std::decay_t<decltype(body(std::declval<Communicator&>()))>>,
        SyncStats> {
  using T = std::decay_t<decltype(body(std::declval<Communicator&>()))>;
  if (procs < 1) {
    throw DimensionError("run_spmd: procs must be >= 1");
  }
  auto ctx = make_collective_context(procs);
  std::vector<T> results(static_cast<size_t>(procs));
  std::vector<std::exception_ptr> failures(static_cast<size_t>(procs));
  auto worker = [&](int r) {
    Communicator comm(ctx, r);
    try {
      results[static_cast<size_t>(r)] = body(comm);
    } catch (...) {
      failures[static_cast<size_t>(r)] = std::current_exception();
      abort_collectives(*ctx, "rank " + std::to_string(r) + " failed");
    }
  };
  if (procs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(procs));
    for (int r = 0; r < procs; ++r) {
      threads.emplace_back(worker, r);
    }
    for (auto& t : threads) {
      t.join();
    }
  }
  std::exception_ptr primary;
  std::exception_ptr secondary;
  for (int r = 0; r < procs; ++r) {
    std::exception_ptr e = failures[static_cast<size_t>(r)];
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const CollectiveError&) {
      if (!secondary) secondary = e;
    } catch (...) {
      if (!primary) primary = e;
    }
  }
  if (primary) std::rethrow_exception(primary);
  if (secondary) std::rethrow_exception(secondary);
  return {std::move(results), collective_stats(*ctx)};
}

}  // namespace blockgs
