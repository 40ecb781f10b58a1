#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "efebo/bench.hpp"
#include "efebo/engine.hpp"

namespace efebo {

enum class ReportFormat { Csv, Json };

inline constexpr std::string_view kSummaryCsvHeader =
    "method,n_runs,n_failed,mean_final_mse,sd_final_mse,mean_final_regret,sd_final_regret";
inline constexpr std::string_view kScatterCsvHeader = "method,objective_index,objective_seed,final_mse,final_regret";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

nlohmann::json acquisition_to_json(const AcquisitionSpec& spec);
/// Throws ConfigError on unknown keys, bad kinds, or invalid parameters.
AcquisitionSpec acquisition_from_json(const nlohmann::json& j);

nlohmann::json benchmark_config_to_json(const BenchmarkConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j);
/// Throws IoFailure if unreadable, ConfigError if malformed.
BenchmarkConfig load_benchmark_config(const std::string& path);

nlohmann::json run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const AggregateReport& report);
AggregateReport report_from_json(const nlohmann::json& j);

/// Csv writes summary.csv and scatter.csv; Json writes report.json.
void export_report(const AggregateReport& report, const std::string& dir, ReportFormat format);
AggregateReport import_report(const std::string& dir, ReportFormat format);

/// summary.csv, scatter.csv, report.json, config.replay.json and
/// runs/<method>/<objective_seed>.json for every completed run.
void write_benchmark_outputs(const std::string& dir, const BenchmarkConfig& cfg, const BenchmarkResult& result);

/// Reloads the per-run records written by write_benchmark_outputs. Runs with no
/// file are returned as failures.
std::vector<BenchmarkRun> load_runs(const std::string& dir, const BenchmarkConfig& cfg);

/// vdp_curve.csv, vdp_queries.csv, vdp_adaptive.json, vdp_fixed.json, vdp_summary.json.
void write_vdp_outputs(const std::string& dir, const VdpDemoConfig& cfg, const VdpDemoResult& result);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace efebo
