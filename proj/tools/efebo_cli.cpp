// efebo: benchmark, Van der Pol demo and theory checks for the EFE acquisition.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "efebo/bench.hpp"
#include "efebo/errors.hpp"
#include "efebo/report_io.hpp"
#include "efebo/theory_checks.hpp"

namespace {

enum ExitCode { kOk = 0, kCheckFailure = 1, kConfigError = 2, kIoError = 3 };

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_bench(const std::optional<std::string>& config_path, const std::optional<std::uint64_t>& seed,
              const std::string& out_dir, const std::optional<std::size_t>& workers,
              const std::optional<std::string>& methods) {
  efebo::BenchmarkConfig cfg =
      config_path ? efebo::load_benchmark_config(*config_path) : efebo::BenchmarkConfig::defaults();
  if (seed) cfg.master_seed = *seed;
  if (workers) cfg.workers = *workers;
  if (methods) {
    try {
      cfg.select_methods(split_list(*methods));
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw efebo::ConfigError(e.what());
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const efebo::BenchmarkResult result = efebo::run_benchmark(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  efebo::write_benchmark_outputs(out_dir, cfg, result);

  std::printf("%-10s %8s %22s %26s\n", "method", "runs", "mean final MSE (sd)", "mean final regret (sd)");
  for (const auto& s : result.report.summary) {
    std::printf("%-10s %8zu %10.4f (%9.4f) %14.4f (%9.4f)\n", s.method.c_str(), s.n_runs, s.mean_final_mse,
                s.sd_final_mse, s.mean_final_regret, s.sd_final_regret);
  }
  std::printf("completed %zu run(s), %zu failed, %.1f s; outputs in %s\n", result.report.completed,
              result.report.failed, secs, out_dir.c_str());
  return kOk;
}

int cmd_vdp(const std::optional<std::uint64_t>& seed, const std::string& out_dir,
            const std::optional<std::size_t>& iterations) {
  efebo::VdpDemoConfig cfg = efebo::VdpDemoConfig::defaults();
  if (seed) cfg.vdp.seed = *seed;
  if (iterations) {
    if (*iterations < 1) throw efebo::ConfigError("--iterations must be >= 1");
    cfg.iterations = *iterations;
  }
  const efebo::VdpDemoResult result = efebo::run_vdp_demo(cfg);
  efebo::write_vdp_outputs(out_dir, cfg, result);
  std::printf("%-10s %12s %16s\n", "mode", "best kappa", "final GP MSE");
  std::printf("%-10s %12.4f %16.6f\n", "adaptive", result.adaptive.best_kappa, result.adaptive.final_gp_mse);
  std::printf("%-10s %12.4f %16.6f\n", "fixed", result.fixed.best_kappa, result.fixed.final_gp_mse);
  std::printf("outputs in %s\n", out_dir.c_str());
  return kOk;
}

int cmd_theory(std::size_t mc_samples) {
  const auto rows = efebo::run_theory_checks(mc_samples);
  efebo::print_check_table(std::cout, rows);
  return efebo::all_passed(rows) ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EFE Bayesian optimization benchmark harness"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> bench_seed;
  std::string bench_out = "bench_out";
  std::optional<std::size_t> workers;
  std::optional<std::string> methods;
  auto* bench = app.add_subcommand("bench", "Run the multi-method random-objective benchmark");
  bench->add_option("--config", config_path, "Benchmark config file (JSON)")->check(CLI::ExistingFile);
  bench->add_option("--seed", bench_seed, "Master seed (overrides the config)");
  bench->add_option("--out", bench_out, "Output directory");
  bench->add_option("--workers", workers, "Worker threads (overrides the config)");
  bench->add_option("--methods", methods, "Comma-separated subset of method names");

  std::optional<std::uint64_t> vdp_seed;
  std::string vdp_out = "vdp_out";
  std::optional<std::size_t> vdp_iterations;
  auto* vdp = app.add_subcommand("vdp", "Adaptive vs fixed EFE on Van der Pol identification");
  vdp->add_option("--seed", vdp_seed, "Seed for the reference-trajectory noise");
  vdp->add_option("--out", vdp_out, "Output directory");
  vdp->add_option("--iterations", vdp_iterations, "BO iterations per mode");

  std::size_t mc_samples = 1'000'000;
  auto* theory = app.add_subcommand("theory-check", "Run the analytic and Monte Carlo identity checks");
  theory->add_option("--mc-samples", mc_samples, "Samples per Monte Carlo check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*bench) return cmd_bench(config_path, bench_seed, bench_out, workers, methods);
    if (*vdp) return cmd_vdp(vdp_seed, vdp_out, vdp_iterations);
    if (*theory) return cmd_theory(mc_samples);
  } catch (const efebo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const efebo::IoFailure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
  return kOk;
}
