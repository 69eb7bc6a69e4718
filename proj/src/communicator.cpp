#include "blockgs/communicator.hpp"

#include "blockgs/dense_kernels.hpp"

#include <any>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <tuple>

namespace blockgs {

namespace {

long deadlock_budget_ms() {
  const char* env = std::getenv("BLOCKGS_DEADLOCK_BUDGET_MS");
  if (env == nullptr || *env == '\0') return 5000;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || v <= 0) return 5000;
  return v;
}

int modeled_rounds(int procs) {
  int rounds = 0;
  int width = 1;
  while (width < procs) {
    width *= 2;
    ++rounds;
  }
  return rounds;
}

std::string shape_string(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

/// Shared state for one SPMD run.  A collective proceeds in generations:
/// each rank deposits its payload for the current generation; the last
/// arriver validates the headers, executes the combine on behalf of
/// everyone, records the sync event, and publishes the result all ranks then
/// copy out.  A later generation cannot start until every rank has left the
/// current one, so the published result stays valid for stragglers.
class CollectiveContext {
 public:
  explicit CollectiveContext(int p)
      : procs(p),
        budget_ms(deadlock_budget_ms()),
        slots(static_cast<size_t>(p)),
        headers(static_cast<size_t>(p)) {}

  const int procs;
  const long budget_ms;
  std::mutex mu;
  std::condition_variable cv;
  long generation = 0;   // collective currently gathering deposits
  long result_gen = -1;  // generation whose result is published
  int arrived = 0;
  std::vector<std::any> slots;
  std::vector<std::string> headers;
  std::any result;
  SyncStats stats;
  int last_rounds = 0;
  std::exception_ptr failure;
  std::string abort_reason;
};

std::shared_ptr<CollectiveContext> make_collective_context(int procs) {
  return std::make_shared<CollectiveContext>(procs);
}

SyncStats collective_stats(const CollectiveContext& ctx) {
  auto& c = const_cast<CollectiveContext&>(ctx);
  std::lock_guard<std::mutex> lock(c.mu);
  return c.stats;
}

void abort_collectives(CollectiveContext& ctx, const std::string& why) {
  std::lock_guard<std::mutex> lock(ctx.mu);
  if (!ctx.failure) {
    ctx.abort_reason = "collective run aborted: " + why;
    ctx.failure =
        std::make_exception_ptr(CollectiveError(ctx.abort_reason));
  }
  ctx.cv.notify_all();
}

namespace {

// combine: slots (one per rank) -> (result, words_reduced, rounds).
// Executed by the last arriver while holding the context lock.
template <typename Result, typename Payload, typename CombineFn>
Result rendezvous(CollectiveContext& c, int rank, const std::string& header,
                  const std::string& label, Payload payload,
                  CombineFn combine) {
  std::unique_lock<std::mutex> lock(c.mu);
  if (c.failure) std::rethrow_exception(c.failure);
  long my_gen = c.generation;
  c.slots[static_cast<size_t>(rank)] = std::move(payload);
  c.headers[static_cast<size_t>(rank)] = header;
  ++c.arrived;
  if (c.arrived == c.procs) {
    try {
      for (int r = 1; r < c.procs; ++r) {
        if (c.headers[static_cast<size_t>(r)] != c.headers[0]) {
          throw CollectiveError(
              "collective mismatch: rank 0 issued '" + c.headers[0] +
              "' but rank " + std::to_string(r) + " issued '" +
              c.headers[static_cast<size_t>(r)] + "'");
        }
      }
      auto [res, words, rounds] = combine(c.slots);
      c.result = std::move(res);
      c.stats.record(label, words);
      c.last_rounds = rounds;
    } catch (...) {
      c.failure = std::current_exception();
      c.abort_reason = "collective '" + label + "' failed";
    }
    c.arrived = 0;
    for (auto& s : c.slots) s.reset();
    c.result_gen = my_gen;
    ++c.generation;
    c.cv.notify_all();
    if (c.failure) std::rethrow_exception(c.failure);
    return std::any_cast<Result>(c.result);
  }
  bool done = c.cv.wait_for(lock, std::chrono::milliseconds(c.budget_ms), [&] {
    return c.result_gen >= my_gen || c.failure != nullptr;
  });
  if (!done) {
    throw CollectiveError("deadlock detector fired after " +
                          std::to_string(c.budget_ms) + " ms in collective '" +
                          label + "': " + std::to_string(c.procs - c.arrived) +
                          " of " + std::to_string(c.procs) +
                          " ranks never arrived");
  }
  if (c.failure) std::rethrow_exception(c.failure);
  return std::any_cast<Result>(c.result);
}

struct TsqrPayload {
  std::vector<TsqrLeafContribution> leaves;
  std::vector<ExactAccumulator> grid;
};

}  // namespace

Communicator::Communicator(std::shared_ptr<CollectiveContext> ctx, int rank)
    : ctx_(std::move(ctx)), rank_(rank) {}

int Communicator::size() const { return ctx_->procs; }

Backend Communicator::backend() const {
  return ctx_->procs == 1 ? Backend::serial : Backend::simulated;
}

SyncStats Communicator::stats() const { return collective_stats(*ctx_); }

void Communicator::reset_stats() {
  std::lock_guard<std::mutex> lock(ctx_->mu);
  ctx_->stats.reset();
}

int Communicator::last_collective_rounds() const {
  std::lock_guard<std::mutex> lock(ctx_->mu);
  return ctx_->last_rounds;
}

DenseMatrix Communicator::allreduce_sum(const DenseMatrix& local,
                                        const std::string& label) {
  std::string header = "allreduce_sum:" + label + ":" + shape_string(local);
  int procs = ctx_->procs;
  return rendezvous<DenseMatrix>(
      *ctx_, rank_, header, label, local,
      [procs](std::vector<std::any>& slots)
          -> std::tuple<std::any, long, int> {
        DenseMatrix acc = std::any_cast<DenseMatrix&>(slots[0]);
        for (size_t r = 1; r < slots.size(); ++r) {
          acc = acc + std::any_cast<DenseMatrix&>(slots[r]);
        }
        long words = acc.size();
        return {std::any(std::move(acc)), words, modeled_rounds(procs)};
      });
}

DenseMatrix Communicator::reduce_factor_tree(
    const DenseMatrix& local_r,
    const std::function<DenseMatrix(const DenseMatrix&, const DenseMatrix&)>&
        combine,
    const std::string& label) {
  std::string header =
      "reduce_factor_tree:" + label + ":" + shape_string(local_r);
  return rendezvous<DenseMatrix>(
      *ctx_, rank_, header, label, local_r,
      [&combine](std::vector<std::any>& slots)
          -> std::tuple<std::any, long, int> {
        std::vector<DenseMatrix> level;
        level.reserve(slots.size());
        for (auto& s : slots) {
          level.push_back(std::any_cast<DenseMatrix&>(s));
        }
        int rounds = 0;
        while (level.size() > 1) {
          std::vector<DenseMatrix> next;
          next.reserve((level.size() + 1) / 2);
          for (size_t i = 0; i < level.size(); i += 2) {
            if (i + 1 < level.size()) {
              next.push_back(combine(level[i], level[i + 1]));
            } else {
              next.push_back(std::move(level[i]));
            }
          }
          level = std::move(next);
          ++rounds;
        }
        long words = level[0].size();
        return {std::any(std::move(level[0])), words, rounds};
      });
}

DenseMatrix Communicator::exact_allreduce(long rows, long cols,
                                          std::vector<ExactAccumulator> grid,
                                          const std::string& label) {
  if (grid.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    throw DimensionError("exact_allreduce: grid size mismatch");
  }
  std::string header = "exact_allreduce:" + label + ":" +
                       std::to_string(rows) + "x" + std::to_string(cols);
  int procs = ctx_->procs;
  return rendezvous<DenseMatrix>(
      *ctx_, rank_, header, label, std::move(grid),
      [rows, cols, procs](std::vector<std::any>& slots)
          -> std::tuple<std::any, long, int> {
        auto& acc = std::any_cast<std::vector<ExactAccumulator>&>(slots[0]);
        for (size_t r = 1; r < slots.size(); ++r) {
          auto& g = std::any_cast<std::vector<ExactAccumulator>&>(slots[r]);
          for (size_t i = 0; i < acc.size(); ++i) {
            acc[i].merge(g[i]);
          }
        }
        DenseMatrix out = round_accumulators(rows, cols, acc);
        long words = out.size();
        return {std::any(std::move(out)), words, modeled_rounds(procs)};
      });
}

TsqrReduceOutcome Communicator::tsqr_leaf_reduce(
    std::vector<TsqrLeafContribution> leaves, long total_leaves, long cols,
    std::vector<ExactAccumulator> fused_grid, long fused_rows, long fused_cols,
    const std::string& label) {
  bool has_fused = fused_rows > 0 && fused_cols > 0;
  if (has_fused && fused_grid.size() != static_cast<size_t>(fused_rows) *
                                            static_cast<size_t>(fused_cols)) {
    throw DimensionError("tsqr_leaf_reduce: fused grid size mismatch");
  }
  std::string header = "tsqr_leaf_reduce:" + label + ":" +
                       std::to_string(total_leaves) + ":" +
                       std::to_string(cols) + ":" + std::to_string(fused_rows) +
                       "x" + std::to_string(fused_cols);
  TsqrPayload payload{std::move(leaves), std::move(fused_grid)};
  return rendezvous<TsqrReduceOutcome>(
      *ctx_, rank_, header, label, std::move(payload),
      [total_leaves, cols, has_fused, fused_rows, fused_cols](
          std::vector<std::any>& slots) -> std::tuple<std::any, long, int> {
        std::vector<DenseMatrix> leaf_rs(static_cast<size_t>(total_leaves));
        std::vector<bool> seen(static_cast<size_t>(total_leaves), false);
        for (auto& s : slots) {
          auto& p = std::any_cast<TsqrPayload&>(s);
          for (auto& leaf : p.leaves) {
            if (leaf.leaf_index < 0 || leaf.leaf_index >= total_leaves ||
                seen[static_cast<size_t>(leaf.leaf_index)]) {
              throw CollectiveError(
                  "tsqr reduction: duplicate or out-of-range leaf " +
                  std::to_string(leaf.leaf_index));
            }
            if (leaf.r.cols() != cols) {
              throw CollectiveError("tsqr reduction: leaf " +
                                    std::to_string(leaf.leaf_index) +
                                    " has wrong column count");
            }
            seen[static_cast<size_t>(leaf.leaf_index)] = true;
            leaf_rs[static_cast<size_t>(leaf.leaf_index)] = std::move(leaf.r);
          }
        }
        for (long i = 0; i < total_leaves; ++i) {
          if (!seen[static_cast<size_t>(i)]) {
            throw CollectiveError("tsqr reduction: leaf " + std::to_string(i) +
                                  " was contributed by no rank");
          }
        }
        TsqrTreeResult tree = combine_leaf_factors(leaf_rs);
        TsqrReduceOutcome out;
        out.leaf_heights.reserve(leaf_rs.size());
        for (const auto& r : leaf_rs) out.leaf_heights.push_back(r.rows());
        out.root_r = std::move(tree.root_r);
        out.nodes = std::move(tree.nodes);
        long words = out.root_r.size();
        if (has_fused) {
          auto& acc =
              std::any_cast<TsqrPayload&>(slots[0]).grid;
          for (size_t r = 1; r < slots.size(); ++r) {
            auto& g = std::any_cast<TsqrPayload&>(slots[r]).grid;
            for (size_t i = 0; i < acc.size(); ++i) {
              acc[i].merge(g[i]);
            }
          }
          out.fused = round_accumulators(fused_rows, fused_cols, acc);
          words += out.fused.size();
        }
        return {std::any(std::move(out)), words, tree.rounds};
      });
}

DenseMatrix Communicator::gather_rows(const DenseMatrix& local,
                                      const std::string& label) {
  // Shard heights differ by rank, so the header pins only the column count.
  std::string header =
      "gather_rows:" + label + ":" + std::to_string(local.cols());
  int procs = ctx_->procs;
  return rendezvous<DenseMatrix>(
      *ctx_, rank_, header, label, local,
      [procs](std::vector<std::any>& slots)
          -> std::tuple<std::any, long, int> {
        DenseMatrix full = std::any_cast<DenseMatrix&>(slots[0]);
        for (size_t r = 1; r < slots.size(); ++r) {
          full = vstack(full, std::any_cast<DenseMatrix&>(slots[r]));
        }
        long words = full.size();
        return {std::any(std::move(full)), words, modeled_rounds(procs)};
      });
}

}  // namespace blockgs
