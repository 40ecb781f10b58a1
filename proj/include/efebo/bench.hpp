#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efebo/acquisition.hpp"
#include "efebo/engine.hpp"
#include "efebo/objectives.hpp"

namespace efebo {

/// Multi-method comparison over a family of random sinusoid objectives.
struct BenchmarkConfig {
  std::size_t n_objectives = 50;
  std::vector<AcquisitionSpec> methods;
  /// Shared settings; its acquisition and seed are overwritten per run.
  RunConfig run;
  std::uint64_t master_seed = 1;
  std::size_t workers = 4;

  /// UCB(2), EI, PI(0.01), VAR, TS, EFE adaptive [1, 30], KG on a 400-point
  /// grid over [-8, 8] with lengthscale 0.5 and noise sd 0.2.
  static BenchmarkConfig defaults();
  void validate() const;
  /// Keeps only methods whose names appear in `names` (case-insensitive).
  void select_methods(const std::vector<std::string>& names);
};

/// Sub-seed for objective `index`. Depends only on (master_seed, index).
std::uint64_t objective_seed(std::uint64_t master_seed, std::size_t index);

struct BenchmarkRun {
  std::string method;
  std::size_t objective_index = 0;
  std::uint64_t objective_seed = 0;
  std::optional<RunRecord> record;
  /// Failure message when record is empty.
  std::string error;
};

struct MethodSummary {
  std::string method;
  std::size_t n_runs = 0;
  std::size_t n_failed = 0;
  double mean_final_mse = 0.0;
  double sd_final_mse = 0.0;
  double mean_final_regret = 0.0;
  double sd_final_regret = 0.0;

  bool operator==(const MethodSummary&) const = default;
};

struct ScatterRow {
  std::string method;
  std::size_t objective_index = 0;
  std::uint64_t objective_seed = 0;
  double final_mse = 0.0;
  double final_regret = 0.0;

  bool operator==(const ScatterRow&) const = default;
};

struct AggregateReport {
  std::vector<MethodSummary> summary;
  std::vector<ScatterRow> scatter;
  std::size_t completed = 0;
  std::size_t failed = 0;

  const MethodSummary* find(const std::string& method) const;
  bool operator==(const AggregateReport&) const = default;
};

/// Aggregates completed runs; failed runs only bump the failure counts.
/// Methods are listed in `method_order`, scatter rows by method then objective.
AggregateReport build_report(const std::vector<std::string>& method_order, const std::vector<BenchmarkRun>& runs);

struct BenchmarkResult {
  AggregateReport report;
  std::vector<BenchmarkRun> runs;
};

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

/// Paired adaptive / fixed-tau EFE runs on the Van der Pol identification cost.
struct VdpDemoConfig {
  VdpConfig vdp;
  GpConfig gp;
  std::vector<double> initial_points{1.0, 2.75, 4.5};
  std::size_t iterations = 50;
  double tau_sq_min = 1.0;
  double tau_sq_max = 30.0;
  double fixed_tau_sq = 1.0;

  static VdpDemoConfig defaults();
};

struct VdpDemoRun {
  RunRecord record;
  double best_kappa = 0.0;
  double final_gp_mse = 0.0;
  Eigen::VectorXd mu;
  Eigen::VectorXd sd;
};

struct VdpDemoResult {
  Eigen::VectorXd kappas;
  Eigen::VectorXd true_cost;
  VdpDemoRun adaptive;
  VdpDemoRun fixed;
};

VdpDemoResult run_vdp_demo(const VdpDemoConfig& cfg);

}  // namespace efebo
