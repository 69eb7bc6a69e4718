#include "blockgs/runner.hpp"

#include <utility>

#include "blockgs/dist_block.hpp"
#include "blockgs/errors.hpp"

namespace blockgs {

namespace {

struct RankView {
  DenseMatrix q_full;
  UpperTriangular r;
  SyncStats stats;
};

void check_replication(const std::vector<RankView>& views) {
  for (size_t r = 1; r < views.size(); ++r) {
    if (!bitwise_equal(views[r].q_full, views[0].q_full)) {
      throw Error("run_factor: gathered Q differs between ranks 0 and " +
                  std::to_string(r));
    }
    if (!bitwise_equal(views[r].r.to_dense(), views[0].r.to_dense())) {
      throw Error("run_factor: replicated R differs between ranks 0 and " +
                  std::to_string(r));
    }
    if (views[r].stats.sync_count != views[0].stats.sync_count ||
        views[r].stats.words_reduced != views[0].stats.words_reduced ||
        views[r].stats.event_labels != views[0].stats.event_labels) {
      throw Error("run_factor: sync accounting differs between ranks 0 and " +
                  std::to_string(r));
    }
  }
}

}  // namespace

FactorOutcome run_factor(VariantId v, const DenseMatrix& x, long s, int procs,
                         const BcgsOptions& opts) {
  FactorOutcome out;
  try {
    auto [views, run_stats] = run_spmd(procs, [&](Communicator& comm) {
      DistBlockMatrix xd = distribute(x, s, comm);
      BcgsResult res = run_variant(v, xd, comm, opts);
      DenseMatrix q_full = gather(res.q);
      return RankView{std::move(q_full), std::move(res.r),
                      std::move(res.stats)};
    });
    (void)run_stats;
    check_replication(views);
    out.ok = true;
    out.q = std::move(views[0].q_full);
    out.r = std::move(views[0].r);
    out.stats = std::move(views[0].stats);
  } catch (const NotSpdError& e) {
    out.ok = false;
    out.error = e.what();
    out.not_spd_pivot = e.pivot;
    return out;
  }
  out.loo = loss_of_orthogonality(out.q);
  ResidualResult res = residual(x, out.q, out.r.to_dense());
  out.resid = res.value;
  out.x_was_zero = res.x_was_zero;
  return out;
}

}  // namespace blockgs
