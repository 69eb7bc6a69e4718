#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "doctest.h"

#include "blockgs/bcgs.hpp"
#include "blockgs/dense_kernels.hpp"
#include "blockgs/errors.hpp"
#include "blockgs/matrix_gen.hpp"
#include "blockgs/metrics.hpp"
#include "blockgs/runner.hpp"
#include "oracles.hpp"

using namespace blockgs;
using namespace blockgs::testing;

namespace {

constexpr double kU = 0x1.0p-53;

DenseMatrix geometric(long n, long m, long s, double kappa,
                      std::uint64_t seed = 12345) {
  MatrixSpec spec;
  spec.n = n;
  spec.m = m;
  spec.s = s;
  spec.kappa = kappa;
  spec.seed = seed;
  return gen_matrix(spec);
}

double column_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (long j = 0; j < a.cols(); ++j) {
    for (long i = 0; i < a.rows(); ++i) {
      worst = std::fmax(worst, std::fabs(a(i, j) - b(i, j)));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("bcgs") {

TEST_CASE("sync-count formulas hold exactly for every variant, q and P") {
  DenseMatrix x = geometric(64, 32, 2, 1e1);
  for (long q : {2L, 4L, 8L, 16L}) {
    DenseMatrix xq = x.sub(0, 64, 0, q * 2);
    for (int procs : {1, 3}) {
      for (VariantId v : all_variants()) {
        FactorOutcome out = run_factor(v, xq, 2, procs);
        REQUIRE(out.ok);
        CHECK(out.stats.sync_count == expected_syncs(v, q));
      }
    }
  }
}

TEST_CASE("expected_syncs implements the variant table") {
  CHECK(expected_syncs(VariantId::Bcgs, 8) == 15);
  CHECK(expected_syncs(VariantId::BcgsIro, 8) == 29);  // 4q - 3
  CHECK(expected_syncs(VariantId::BcgsPipiPlus, 8) == 15);
  CHECK(expected_syncs(VariantId::BcgsIp1s, 8) == 8);
  CHECK(expected_syncs(VariantId::BcgsIp2s, 8) == 15);
  CHECK(expected_syncs(VariantId::BcgsI1s, 8) == 8);
  for (VariantId v : all_variants()) CHECK(expected_syncs(v, 1) == 1);
}

TEST_CASE("q = 1 degenerates to a single TSQR for every variant") {
  DenseMatrix x = geometric(32, 4, 4, 1e2);
  FactorOutcome reference = run_factor(VariantId::BcgsIro, x, 4, 2);
  REQUIRE(reference.ok);
  CHECK(reference.stats.sync_count == 1);
  for (VariantId v : all_variants()) {
    FactorOutcome out = run_factor(v, x, 4, 2);
    REQUIRE(out.ok);
    CHECK(out.stats.sync_count == 1);
    CHECK(bitwise_equal(out.q, reference.q));
    CHECK(bitwise_equal(out.r.to_dense(), reference.r.to_dense()));
  }
}

TEST_CASE("results are bitwise independent of the process count") {
  DenseMatrix x = geometric(96, 8, 2, 1e2);
  for (VariantId v : all_variants()) {
    FactorOutcome p1 = run_factor(v, x, 2, 1);
    REQUIRE(p1.ok);
    for (int procs : {2, 4}) {
      FactorOutcome pn = run_factor(v, x, 2, procs);
      REQUIRE(pn.ok);
      CHECK(bitwise_equal(p1.q, pn.q));
      CHECK(bitwise_equal(p1.r.to_dense(), pn.r.to_dense()));
      CHECK(p1.stats.sync_count == pn.stats.sync_count);
      CHECK(p1.stats.event_labels == pn.stats.event_labels);
    }
  }
}

TEST_CASE("the one-sync and two-sync variants agree on benign inputs") {
  DenseMatrix x = geometric(96, 16, 4, 1e2);
  FactorOutcome one = run_factor(VariantId::BcgsIp1s, x, 4, 1);
  FactorOutcome two = run_factor(VariantId::BcgsIp2s, x, 4, 1);
  FactorOutcome pipi = run_factor(VariantId::BcgsPipiPlus, x, 4, 1);
  REQUIRE(one.ok);
  REQUIRE(two.ok);
  REQUIRE(pipi.ok);
  CHECK(column_diff(one.q, two.q) <= 1e-12);
  CHECK(column_diff(one.q, pipi.q) <= 1e-12);
  CHECK(column_diff(one.r.to_dense(), two.r.to_dense()) <= 1e-12);
}

TEST_CASE("s = 1 reorthogonalized BCGS reproduces the Householder factors") {
  DenseMatrix x = geometric(60, 6, 1, 1e1);
  FactorOutcome out = run_factor(VariantId::BcgsIro, x, 1, 1);
  REQUIRE(out.ok);
  QrResult hh = householder_qr(x);
  // Both sides canonicalize R's diagonal to be nonnegative, so columns
  // align sign-for-sign on a full-rank input.
  CHECK(column_diff(out.q, hh.q) <= 1e-10);
  CHECK(column_diff(out.r.to_dense(), hh.r) <= 1e-10);
}

TEST_CASE("stability ordering at kappa = 1e6 matches the variant table") {
  DenseMatrix x = geometric(1000, 32, 4, 1e6);
  const VariantId stable[] = {VariantId::BcgsIro, VariantId::BcgsPipiPlus,
                              VariantId::BcgsIp1s, VariantId::BcgsIp2s};
  double stable_worst = 0.0;
  for (VariantId v : stable) {
    FactorOutcome out = run_factor(v, x, 4, 1);
    REQUIRE(out.ok);
    CHECK(out.loo <= 1e-12);
    stable_worst = std::fmax(stable_worst, out.loo);
  }
  FactorOutcome classic = run_factor(VariantId::Bcgs, x, 4, 1);
  FactorOutcome onesync = run_factor(VariantId::BcgsI1s, x, 4, 1);
  REQUIRE(classic.ok);
  REQUIRE(onesync.ok);
  // The uncorrected variants sit well above the corrected group.
  CHECK(classic.loo >= 10.0 * stable_worst);
  CHECK(onesync.loo >= 10.0 * stable_worst);
}

TEST_CASE("classic BCGS loses orthogonality with kappa; TSQR keeps residual tiny") {
  double loo_small = 0.0;
  double loo_large = 0.0;
  for (double kappa : {1e1, 1e3}) {
    DenseMatrix x = geometric(300, 16, 4, kappa);
    FactorOutcome out = run_factor(VariantId::Bcgs, x, 4, 1);
    REQUIRE(out.ok);
    CHECK(out.resid <= 1e-13);
    (kappa == 1e1 ? loo_small : loo_large) = out.loo;
  }
  // Two decades of kappa cost at least two decades of orthogonality.
  CHECK(loo_large >= 1e2 * loo_small);
}

TEST_CASE("R is exactly block-upper-triangular with a canonical diagonal") {
  DenseMatrix x = geometric(80, 16, 4, 1e2);
  for (VariantId v : all_variants()) {
    FactorOutcome out = run_factor(v, x, 4, 1);
    REQUIRE(out.ok);
    const DenseMatrix& r = out.r.to_dense();
    for (long j = 0; j < r.cols(); ++j) {
      for (long i = j + 1; i < r.rows(); ++i) {
        CHECK(r(i, j) == 0.0);  // stored zeros, not just small values
      }
    }
    for (long j = 0; j < r.cols(); ++j) CHECK(r(j, j) >= 0.0);
    CHECK(out.resid <= 1e-13);
    // Library-wide factorization invariant.
    double xf = x.frobenius_norm();
    CHECK(out.resid * xf <= 100 * kU * 4 * xf);
  }
}

TEST_CASE("sync events carry complete label accounting") {
  DenseMatrix x = geometric(64, 16, 4, 1e2);

  FactorOutcome onesync = run_factor(VariantId::BcgsIp1s, x, 4, 1);
  REQUIRE(onesync.ok);
  const std::vector<std::string> expected = {
      "reduce_factor_tree:prologue", "fused_gram:wide", "fused_gram:wide",
      "fused_gram:final"};
  CHECK(onesync.stats.event_labels == expected);
  CHECK(onesync.stats.words_reduced > 0);

  FactorOutcome classic = run_factor(VariantId::Bcgs, x, 4, 1);
  REQUIRE(classic.ok);
  CHECK(classic.stats.label_counts.at("fused_gram:proj") == 3);
  CHECK(classic.stats.label_counts.at("reduce_factor_tree:tsqr") == 4);
  long total = 0;
  for (const auto& [label, count] : classic.stats.label_counts) total += count;
  CHECK(total == classic.stats.sync_count);
  CHECK(classic.stats.event_labels.size() ==
        static_cast<size_t>(classic.stats.sync_count));
}

TEST_CASE("NotSPD aborts carry a semantic diagnosis") {
  // Far beyond the u * kappa^2 <= 1 regime the Pythagorean complement stops
  // being positive definite.
  DenseMatrix x = geometric(200, 8, 4, 1e12);
  FactorOutcome pipi = run_factor(VariantId::BcgsPipiPlus, x, 4, 1);
  if (!pipi.ok) {
    CHECK(pipi.not_spd_pivot >= 1);
    CHECK(pipi.error.find("Pythagorean normalization") != std::string::npos);
    CHECK(pipi.error.find("block column") != std::string::npos);
    CHECK(pipi.error.find("BCGSPIPI+") != std::string::npos);
  } else {
    CHECK(pipi.loo > 1e-8);  // assumption violated: orthogonality is gone
  }

  BcgsOptions cholqr_classic;
  cholqr_classic.classic_intra = IntraorthKind::CholQr;
  FactorOutcome classic =
      run_factor(VariantId::Bcgs, geometric(200, 8, 4, 1e9), 4, 1,
                 cholqr_classic);
  if (!classic.ok) {
    CHECK(classic.error.find("intra-block Cholesky QR") != std::string::npos);
  } else {
    CHECK(classic.loo > 1e-6);
  }
}

TEST_CASE("the delayed-reprojection probe fires once per lookahead block per rank") {
  DenseMatrix x = geometric(64, 16, 4, 1e2);
  std::mutex mu;
  std::vector<long> fired;
  RecurrenceProbe probe;
  probe.on_eval = [&](long k, const DenseMatrix& s2, const DenseMatrix&,
                      const DenseMatrix&) {
    std::lock_guard<std::mutex> lock(mu);
    CHECK(s2.rows() == 4);
    CHECK(s2.cols() == 4);
    fired.push_back(k);
  };
  BcgsOptions opts;
  opts.probe = &probe;
  FactorOutcome out = run_factor(VariantId::BcgsIp1s, x, 4, 2, opts);
  REQUIRE(out.ok);
  // q = 4 blocks: the recurrence runs for the two lookahead iterations
  // (k = 2, 3), on each of the two ranks.
  std::sort(fired.begin(), fired.end());
  CHECK(fired == std::vector<long>{2, 2, 3, 3});
}

TEST_CASE("run_variant dispatches to the same code as the direct entry points") {
  DenseMatrix x = geometric(48, 8, 4, 1e1);
  auto [results, stats] = run_spmd(2, [&](Communicator& comm) {
    DistBlockMatrix d = distribute(x, 4, comm);
    BcgsResult direct = bcgs_pipi_plus(d, comm);
    BcgsResult dispatched = run_variant(VariantId::BcgsPipiPlus, d, comm);
    CHECK(bitwise_equal(gather(direct.q), gather(dispatched.q)));
    CHECK(bitwise_equal(direct.r.to_dense(), dispatched.r.to_dense()));
    return DenseMatrix(1, 1);
  });
}

TEST_CASE("malformed inputs are rejected up front") {
  DenseMatrix x = lcg_matrix(16, 6, 23);
  CHECK_THROWS_AS(run_factor(VariantId::BcgsIro, x, 4, 1),
                  DimensionError);  // 6 % 4 != 0
  DenseMatrix short_x = lcg_matrix(4, 8, 24);
  CHECK_THROWS_AS(run_factor(VariantId::BcgsIro, short_x, 2, 1),
                  DimensionError);  // n < m
}

}  // TEST_SUITE
