#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "blockgs/bench.hpp"
#include "blockgs/cost_model.hpp"
#include "blockgs/errors.hpp"
#include "blockgs/matrix_gen.hpp"
#include "blockgs/metrics.hpp"
#include "oracles.hpp"

using namespace blockgs;
using namespace blockgs::testing;

namespace {

MatrixSpec spec_of(long n, long m, double kappa, std::uint64_t seed = 7,
                   long s = 1) {
  MatrixSpec spec;
  spec.n = n;
  spec.m = m;
  spec.s = s;
  spec.kappa = kappa;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("gen_matrix hits the requested condition number") {
  DenseMatrix x = gen_matrix(spec_of(120, 10, 1e4));
  REQUIRE(x.rows() == 120);
  REQUIRE(x.cols() == 10);
  CHECK(x.all_finite());
  double kappa = kappa_oracle(x);
  CHECK(kappa >= 0.95e4);
  CHECK(kappa <= 1.05e4);

  DenseMatrix perfect = gen_matrix(spec_of(40, 6, 1.0));
  double k1 = kappa_oracle(perfect);
  CHECK(k1 >= 1.0);
  CHECK(k1 <= 1.0001);
}

TEST_CASE("gen_matrix is a pure function of its spec") {
  MatrixSpec spec = spec_of(30, 8, 1e3, 99, 4);
  CHECK(bitwise_equal(gen_matrix(spec), gen_matrix(spec)));

  MatrixSpec other_seed = spec;
  other_seed.seed = 100;
  CHECK(!bitwise_equal(gen_matrix(spec), gen_matrix(other_seed)));

  MatrixSpec gaussian = spec;
  gaussian.distribution = MatrixDistribution::RandomGaussian;
  CHECK(bitwise_equal(gen_matrix(gaussian), gen_matrix(gaussian)));
  CHECK(!bitwise_equal(gen_matrix(gaussian), gen_matrix(spec)));
}

TEST_CASE("gen_matrix rejects impossible specs") {
  CHECK_THROWS_AS(gen_matrix(spec_of(5, 8, 1e2)), DimensionError);
  CHECK_THROWS_AS(gen_matrix(spec_of(20, 6, 1e2, 7, 4)), DimensionError);
  CHECK_THROWS_AS(gen_matrix(spec_of(20, 4, 0.5)), ConfigError);
}

TEST_CASE("loss_of_orthogonality measures the spectral gap from identity") {
  DenseMatrix exact(5, 2);
  exact(0, 0) = 1.0;
  exact(1, 1) = 1.0;
  CHECK(loss_of_orthogonality(exact) == 0.0);

  DenseMatrix duplicated(5, 2);
  duplicated(0, 0) = 1.0;
  duplicated(0, 1) = 1.0;  // same column twice: Q^T Q - I = [[0,1],[1,0]]
  CHECK(loss_of_orthogonality(duplicated) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("residual flags an all-zero input instead of dividing by zero") {
  DenseMatrix x(4, 2);
  DenseMatrix q(4, 2);
  q(0, 0) = 1.0;
  q(1, 1) = 1.0;
  DenseMatrix r = DenseMatrix::identity(2);
  ResidualResult res = residual(x, q, r);
  CHECK(res.x_was_zero);
  CHECK(res.value == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(residual(x, q, DenseMatrix::identity(3)), DimensionError);
}

TEST_CASE("predicted_time is the three-term alpha/beta/gamma model") {
  CostModel model;
  model.alpha = 2e-5;
  model.beta = 3e-9;
  model.gamma = 5e-10;
  model.procs = 4;
  RunCost cost{7, 100, 1e6};
  CHECK(predicted_time(model, cost) ==
        2e-5 * 7 + 3e-9 * 100 + 5e-10 * 1e6 / 4);

  CostModel bad = model;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(predicted_time(bad, cost), ConfigError);
  bad = model;
  bad.procs = 0;
  CHECK_THROWS_AS(predicted_time(bad, cost), ConfigError);
}

TEST_CASE("predict_speedup is a pure latency ratio when only alpha is set") {
  CostModel model;
  model.alpha = 1.0;
  model.beta = 0.0;
  model.gamma = 0.0;
  RunCost fast{16, 0, 0.0};
  RunCost slow{61, 0, 0.0};
  CHECK(predict_speedup(model, fast, slow) == 61.0 / 16.0);  // 3.8125 exactly
  CHECK(predict_speedup(model, slow, fast) == 16.0 / 61.0);

  RunCost empty{0, 0, 0.0};
  CHECK_THROWS_AS(predict_speedup(model, fast, empty), ConfigError);
}

TEST_CASE("variant_flops counts the classic sweep and the q = 1 degenerate case") {
  // n = 8, m = 4, s = 2, q = 2: one block QR (128 flops) for block 1, then
  // one Gram (64), one update (64) and one block QR (128) for block 2.
  CHECK(variant_flops(VariantId::Bcgs, 8, 4, 2) == 384.0);
  // Reorthogonalization doubles everything after the first block QR.
  CHECK(variant_flops(VariantId::BcgsIro, 8, 4, 2) == 128.0 + 2.0 * 256.0);
  for (VariantId v : all_variants()) {
    CHECK(variant_flops(v, 8, 2, 2) == 128.0);  // single block: just the QR
  }
  // More syncs saved never means fewer flops: the one-sync family does
  // strictly more arithmetic than classic BCGS at the same shape.
  CHECK(variant_flops(VariantId::BcgsIp1s, 64, 16, 4) >
        variant_flops(VariantId::Bcgs, 64, 16, 4));
  CHECK_THROWS_AS(variant_flops(VariantId::Bcgs, 8, 6, 4), DimensionError);
  CHECK_THROWS_AS(variant_flops(VariantId::Bcgs, 4, 8, 2), DimensionError);
}

TEST_CASE("bench config parser round-trips a commented file") {
  std::istringstream in(
      "# sweep over two shapes\n"
      "variants = BCGS, BCGSI+P-1S\n"
      "n = 64, 128\n"
      "m = 8\n"
      "s = 2, 4\n"
      "kappa = 1e2, 1e6\n"
      "procs = 1, 4\n"
      "seeds = 2\n"
      "seed = 777\n"
      "alpha = 2e-5\n"
      "out = /tmp/rows.csv   # trailing comment\n"
      "format = json\n");
  BenchConfig c = parse_bench_config(in);
  CHECK(c.variants ==
        std::vector<VariantId>{VariantId::Bcgs, VariantId::BcgsIp1s});
  CHECK(c.n_values == std::vector<long>{64, 128});
  CHECK(c.m_values == std::vector<long>{8});
  CHECK(c.s_values == std::vector<long>{2, 4});
  CHECK(c.kappa_values == std::vector<double>{1e2, 1e6});
  CHECK(c.procs_values == std::vector<int>{1, 4});
  CHECK(c.seeds == 2);
  CHECK(c.base_seed == 777);
  CHECK(c.alpha == 2e-5);
  CHECK(c.out == "/tmp/rows.csv");
  CHECK(c.format == "json");
}

TEST_CASE("bench config parser rejects bad input with a line number") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_bench_config(in);
  };
  auto message_of = [&](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  std::string unknown = message_of("n = 8\nm = 4\nwidth = 2\ns = 2\n");
  CHECK(unknown.find("line 3") != std::string::npos);
  CHECK(unknown.find("width") != std::string::npos);

  CHECK(message_of("n = 8\nm = 4\ns = two\n").find("line 3") !=
        std::string::npos);
  CHECK_THROWS_AS(parse("n = 8\nm = 4\n"), ConfigError);          // no s
  CHECK_THROWS_AS(parse("n = 8\nm = 6\ns = 4\n"), ConfigError);   // 6 % 4
  CHECK_THROWS_AS(parse("n = 8\nm = 16\ns = 2\n"), ConfigError);  // n < m
  CHECK_THROWS_AS(parse("n = 8\nm = 4\ns = 2\nseeds = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 8\nm = 4\ns = 2\nkappa = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 8\nm = 4\ns = 2\nformat = yaml\n"), ConfigError);
}

TEST_CASE("CSV output is byte-deterministic with the documented header") {
  std::istringstream in(
      "variants = BCGSI+, BCGS\n"
      "n = 32\n"
      "m = 4\n"
      "s = 1, 2\n"
      "kappa = 10\n"
      "procs = 1, 2\n"
      "seeds = 1\n");
  BenchConfig c = parse_bench_config(in);
  BenchReport report = run_bench(c);
  CHECK(report.exit_code == 0);
  REQUIRE(report.rows.size() == 8);  // 2 variants x 2 widths x 2 proc counts

  std::ostringstream first;
  write_csv(report, first);
  std::string text = first.str();
  CHECK(text.rfind("variant,n,m,s,q,P,kappa,seed_count,sync_count,"
                   "words_reduced,flops,loo,residual,predicted_time,"
                   "speedup_vs_bcgsi+\n",
                   0) == 0);

  // The s = 1 BCGSI+ rows are their own speedup baseline.
  for (const BenchRow& row : report.rows) {
    if (row.variant == "BCGSI+" && row.s == 1) {
      CHECK(format_real(row.speedup) == "1");
    }
    CHECK(row.q == row.m / row.s);
    CHECK(!row.failed);
  }

  std::ostringstream second;
  write_csv(run_bench(c), second);
  CHECK(text == second.str());
}

TEST_CASE("JSON output parses back and encodes aborted cells as nulls") {
  std::istringstream in(
      "variants = BCGSPIPI+\n"
      "n = 64\n"
      "m = 8\n"
      "s = 4\n"
      "kappa = 1e14\n"
      "procs = 1\n"
      "seeds = 1\n");
  BenchConfig c = parse_bench_config(in);
  BenchReport report = run_bench(c);
  REQUIRE(report.rows.size() == 1);
  REQUIRE(report.rows[0].failed);
  CHECK(report.rows[0].failure_expected);  // u * kappa^2 >> 1 at kappa = 1e14
  CHECK(report.exit_code == 0);

  std::ostringstream os;
  write_json(report, os);
  nlohmann::json rows = nlohmann::json::parse(os.str());
  REQUIRE(rows.is_array());
  REQUIRE(rows.size() == 1);
  const nlohmann::json& row = rows[0];
  CHECK(row["variant"] == "BCGSPIPI+");
  CHECK(row["q"] == 2);
  CHECK(row["loo"].is_null());  // NaN has no JSON literal
  CHECK(row["failed"] == true);
  CHECK(row["failure_expected"] == true);
  CHECK(row["error"].is_string());
}

TEST_CASE("format_real keeps round-trip precision without padding") {
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(-2.5) == "-2.5");
}

}  // TEST_SUITE
