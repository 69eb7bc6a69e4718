#include "blockgs/verify_suite.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "blockgs/bench.hpp"
#include "blockgs/cost_model.hpp"
#include "blockgs/dense_kernels.hpp"
#include "blockgs/matrix_gen.hpp"
#include "blockgs/runner.hpp"

namespace blockgs {

namespace {

using CheckFn = std::function<std::optional<std::string>()>;

bool strictly_lower_is_zero(const DenseMatrix& r) {
  for (long j = 0; j < r.cols(); ++j) {
    for (long i = j + 1; i < r.rows(); ++i) {
      if (r(i, j) != 0.0) return false;
    }
  }
  return true;
}

DenseMatrix test_matrix(long n, long m, long s, double kappa,
                        std::uint64_t seed) {
  MatrixSpec spec;
  spec.n = n;
  spec.m = m;
  spec.s = s;
  spec.kappa = kappa;
  spec.seed = seed;
  return gen_matrix(spec);
}

std::optional<std::string> check_sync_formulas() {
  const DenseMatrix x = test_matrix(64, 8, 2, 1e2, 7);
  for (int procs : {1, 3}) {
    for (VariantId v : all_variants()) {
      FactorOutcome run = run_factor(v, x, 2, procs);
      if (!run.ok) {
        return variant_name(v) + " aborted on a kappa=1e2 input: " + run.error;
      }
      const long want = expected_syncs(v, 4);
      if (run.stats.sync_count != want) {
        std::ostringstream os;
        os << variant_name(v) << " at q=4, P=" << procs << ": expected "
           << want << " syncs, measured " << run.stats.sync_count;
        return os.str();
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_single_block_degenerates() {
  const DenseMatrix x = test_matrix(32, 4, 4, 1e2, 11);
  for (VariantId v : all_variants()) {
    FactorOutcome run = run_factor(v, x, 4, 2);
    if (!run.ok) return variant_name(v) + " aborted at q=1: " + run.error;
    if (run.stats.sync_count != 1) {
      return variant_name(v) + " at q=1 should cost exactly 1 sync, measured " +
             std::to_string(run.stats.sync_count);
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_distribution_transparency() {
  const DenseMatrix x = test_matrix(96, 8, 2, 1e2, 3);
  for (VariantId v : {VariantId::BcgsIro, VariantId::BcgsIp1s}) {
    FactorOutcome ref = run_factor(v, x, 2, 1);
    if (!ref.ok) return variant_name(v) + " aborted: " + ref.error;
    for (int procs : {2, 4}) {
      FactorOutcome run = run_factor(v, x, 2, procs);
      if (!run.ok) return variant_name(v) + " aborted: " + run.error;
      if (!bitwise_equal(run.q, ref.q)) {
        return variant_name(v) + ": Q differs bitwise between P=1 and P=" +
               std::to_string(procs);
      }
      if (!bitwise_equal(run.r.to_dense(), ref.r.to_dense())) {
        return variant_name(v) + ": R differs bitwise between P=1 and P=" +
               std::to_string(procs);
      }
      if (run.stats.sync_count != ref.stats.sync_count) {
        return variant_name(v) + ": sync count depends on P";
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_factorization_quality() {
  const DenseMatrix x = test_matrix(128, 16, 4, 1e2, 19);
  for (VariantId v : all_variants()) {
    FactorOutcome run = run_factor(v, x, 4, 1);
    if (!run.ok) {
      return variant_name(v) + " aborted on a kappa=1e2 input: " + run.error;
    }
    if (!(run.loo <= 1e-10)) {
      return variant_name(v) + ": loss of orthogonality " +
             format_real(run.loo) + " above 1e-10 at kappa=1e2";
    }
    if (!(run.resid <= 1e-12)) {
      return variant_name(v) + ": relative residual " + format_real(run.resid) +
             " above 1e-12";
    }
    if (!strictly_lower_is_zero(run.r.to_dense())) {
      return variant_name(v) + ": R has a nonzero below the diagonal";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_reprojection_identity() {
  const DenseMatrix x = test_matrix(100, 16, 4, 1e3, 23);
  double worst = 0.0;
  RecurrenceProbe probe;
  probe.on_eval = [&](long, const DenseMatrix& s2, const DenseMatrix& q_local,
                      const DenseMatrix& x_local) {
    const DenseMatrix direct = gram(q_local, x_local);
    const DenseMatrix diff = s2 - direct;
    worst = std::max(worst, diff.max_abs());
  };
  BcgsOptions opts;
  opts.probe = &probe;
  FactorOutcome run = run_factor(VariantId::BcgsIp1s, x, 4, 1, opts);
  if (!run.ok) return std::string("BCGSI+P-1S aborted: ") + run.error;
  if (!(worst <= 1e-10)) {
    return "recurrence deviates from the direct product by " +
           format_real(worst);
  }
  return std::nullopt;
}

std::optional<std::string> check_speedup_asymptotics() {
  const CostModel alpha_only{1e-5, 0.0, 0.0, 1};
  const long q = 64;
  auto cost_of = [&](VariantId v) {
    return RunCost{expected_syncs(v, q), 0, 0.0};
  };
  const double one_sync = predict_speedup(alpha_only, cost_of(VariantId::BcgsIp1s),
                                          cost_of(VariantId::BcgsIro));
  const double two_sync = predict_speedup(alpha_only, cost_of(VariantId::BcgsIp2s),
                                          cost_of(VariantId::BcgsIro));
  if (!(one_sync >= 3.9 && one_sync <= 4.0)) {
    return "one-sync speedup at q=64 out of band: " + format_real(one_sync);
  }
  if (!(two_sync >= 1.95 && two_sync <= 2.0)) {
    return "two-sync speedup at q=64 out of band: " + format_real(two_sync);
  }
  return std::nullopt;
}

}  // namespace

int run_verify_suite(std::ostream& os) {
  const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"sync-count formulas (q=4, P in {1,3})", check_sync_formulas},
      {"single-block degenerate case costs 1 sync", check_single_block_degenerates},
      {"distribution transparency (bitwise across P)", check_distribution_transparency},
      {"factorization quality at kappa=1e2", check_factorization_quality},
      {"delayed-reprojection identity", check_reprojection_identity},
      {"speedup asymptotics at q=64", check_speedup_asymptotics},
  };
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    std::optional<std::string> problem;
    try {
      problem = fn();
    } catch (const std::exception& e) {
      problem = std::string("unexpected exception: ") + e.what();
    }
    if (problem) {
      ++failures;
      os << "FAIL " << name << ": " << *problem << "\n";
    } else {
      os << "PASS " << name << "\n";
    }
  }
  if (failures > 0) {
    os << failures << " of " << checks.size() << " checks failed\n";
    return 1;
  }
  os << "all " << checks.size() << " checks passed\n";
  return 0;
}

}  // namespace blockgs
