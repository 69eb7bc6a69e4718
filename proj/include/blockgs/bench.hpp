#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "blockgs/cost_model.hpp"
#include "blockgs/matrix_gen.hpp"
#include "blockgs/variant.hpp"

namespace blockgs {

/// Parsed form of the flat key = value sweep config (see README for the
/// format).  Keys n, m, s, kappa, procs, variants accept comma-separated
/// sweep lists; the cartesian product defines the cells.
struct BenchConfig {
  std::vector<VariantId> variants = all_variants();
  std::vector<long> n_values;
  std::vector<long> m_values;
  std::vector<long> s_values;
  std::vector<double> kappa_values = {1e2};
  std::vector<int> procs_values = {1};
  int seeds = 3;
  std::uint64_t base_seed = 12345;
  MatrixDistribution distribution =
      MatrixDistribution::GeometricSingularValues;
  double alpha = 1e-5;
  double beta = 1e-9;
  double gamma = 1e-10;
  std::string out;               // output path; empty = stdout
  std::string format = "csv";    // csv | json
};

/// Throws ConfigError (with the offending line) on any parse problem,
/// unknown key, malformed number, or inconsistent sweep (m not a multiple of
/// some s, n smaller than some m).
BenchConfig parse_bench_config(std::istream& in);
BenchConfig parse_bench_config_file(const std::string& path);

struct BenchRow {
  std::string variant;
  long n = 0;
  long m = 0;
  long s = 0;
  long q = 0;
  int procs = 1;
  double kappa = 1.0;
  int seed_count = 0;
  long sync_count = 0;
  long words_reduced = 0;
  double flops = 0.0;
  double loo = 0.0;
  double resid = 0.0;
  double predicted_time = 0.0;
  double speedup = 0.0;          // vs the s = 1 BCGSI+ baseline
  bool failed = false;           // NotSpd abort; loo/resid are NaN
  bool failure_expected = false; // the variant's LOO assumption was violated
  std::string error;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  /// 0: clean (failures only where the stability assumption predicts them);
  /// 1: some variant aborted inside its assumed-safe regime.
  int exit_code = 0;
};

/// Run every cell of the sweep (sequentially and deterministically: same
/// config + seeds give a byte-identical report).
BenchReport run_bench(const BenchConfig& config);

void write_csv(const BenchReport& report, std::ostream& os);
void write_json(const BenchReport& report, std::ostream& os);

/// 17 significant digits (printf %.17g), '.' decimal separator.
std::string format_real(double v);

}  // namespace blockgs
