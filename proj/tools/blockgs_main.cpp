#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "blockgs/bench.hpp"
#include "blockgs/errors.hpp"
#include "blockgs/runner.hpp"
#include "blockgs/verify_suite.hpp"

namespace {

struct CostOverrides {
  double alpha = -1.0;
  double beta = -1.0;
  double gamma = -1.0;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--cost-alpha", alpha,
                    "Override: seconds per synchronization");
    cmd->add_option("--cost-beta", beta, "Override: seconds per word reduced");
    cmd->add_option("--cost-gamma", gamma,
                    "Override: seconds per flop per process");
  }

  void apply(blockgs::BenchConfig& cfg) const {
    if (alpha >= 0.0) cfg.alpha = alpha;
    if (beta >= 0.0) cfg.beta = beta;
    if (gamma >= 0.0) cfg.gamma = gamma;
  }
};

int emit_report(const blockgs::BenchReport& report, const std::string& out,
                const std::string& format) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty()) {
    file.open(out, std::ios::out | std::ios::binary);
    if (!file) {
      throw blockgs::ConfigError("cannot open output file '" + out + "'");
    }
    os = &file;
  }
  if (format == "json") {
    blockgs::write_json(report, *os);
  } else {
    blockgs::write_csv(report, *os);
  }
  return report.exit_code;
}

int run_bench_command(const std::string& config_path,
                      const CostOverrides& costs) {
  blockgs::BenchConfig cfg = blockgs::parse_bench_config_file(config_path);
  costs.apply(cfg);
  blockgs::BenchReport report = blockgs::run_bench(cfg);
  return emit_report(report, cfg.out, cfg.format);
}

int run_factor_command(const std::string& variant, long n, long m, long s,
                       double kappa, std::uint64_t seed, int procs,
                       const std::string& distribution,
                       const std::string& format, const CostOverrides& costs) {
  blockgs::BenchConfig cfg;
  cfg.variants = {blockgs::parse_variant(variant)};
  cfg.n_values = {n};
  cfg.m_values = {m};
  cfg.s_values = {s};
  cfg.kappa_values = {kappa};
  cfg.procs_values = {procs};
  cfg.seeds = 1;
  cfg.base_seed = seed;
  if (distribution == "gaussian" || distribution == "random-gaussian") {
    cfg.distribution = blockgs::MatrixDistribution::RandomGaussian;
  } else if (distribution == "geometric" ||
             distribution == "geometric-singular-values") {
    cfg.distribution = blockgs::MatrixDistribution::GeometricSingularValues;
  } else {
    throw blockgs::ConfigError("unknown distribution '" + distribution + "'");
  }
  if (format != "csv" && format != "json") {
    throw blockgs::ConfigError("--out must be csv or json");
  }
  cfg.format = format;
  costs.apply(cfg);
  blockgs::BenchReport report = blockgs::run_bench(cfg);
  return emit_report(report, "", cfg.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block Gram-Schmidt factorization and sync-cost harness"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand(
      "bench", "Run a benchmark sweep described by a config file");
  std::string config_path;
  bench->add_option("--config", config_path, "Path to the sweep config")
      ->required();
  CostOverrides bench_costs;
  bench_costs.add_flags(bench);

  auto* factor =
      app.add_subcommand("factor", "Factor one random test matrix and report");
  std::string variant;
  long n = 0, m = 0, s = 1;
  double kappa = 1e2;
  std::uint64_t seed = 12345;
  int procs = 1;
  std::string out_format = "csv";
  std::string distribution = "geometric";
  factor->add_option("--variant", variant, "Variant name (e.g. BCGSI+P-1S)")
      ->required();
  factor->add_option("--n", n, "Rows")->required();
  factor->add_option("--m", m, "Columns")->required();
  factor->add_option("--s", s, "Block width")->required();
  factor->add_option("--kappa", kappa, "Target condition number");
  factor->add_option("--seed", seed, "Generator seed");
  factor->add_option("--procs", procs, "Simulated process count");
  factor->add_option("--out", out_format, "Report format: csv or json");
  factor->add_option("--distribution", distribution,
                     "Matrix distribution: geometric or gaussian");
  CostOverrides factor_costs;
  factor_costs.add_flags(factor);

  auto* verify =
      app.add_subcommand("verify", "Run the built-in invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) {
      return run_bench_command(config_path, bench_costs);
    }
    if (factor->parsed()) {
      return run_factor_command(variant, n, m, s, kappa, seed, procs,
                                distribution, out_format, factor_costs);
    }
    if (verify->parsed()) {
      return blockgs::run_verify_suite(std::cout);
    }
  } catch (const blockgs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
