#include "efebo/report_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <system_error>

#include "efebo/errors.hpp"

namespace efebo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename Int>
Int parse_int(std::string_view text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> read_csv_rows(const std::string& path, std::string_view header) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoFailure(path, "unexpected CSV header");
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  return rows;
}

json iteration_to_json(const IterationRecord& it) {
  json j;
  j["iteration"] = it.iteration;
  j["x"] = it.x;
  j["y"] = it.y;
  j["x_hat"] = it.x_hat;
  j["f_hat"] = it.f_hat;
  j["simple_regret"] = it.simple_regret;
  j["gp_mse"] = it.gp_mse;
  j["tau_sq"] = it.tau_sq ? json(*it.tau_sq) : json(nullptr);
  return j;
}

IterationRecord iteration_from_json(const json& j) {
  IterationRecord it;
  it.iteration = j.at("iteration").get<std::size_t>();
  it.x = j.at("x").get<double>();
  it.y = j.at("y").get<double>();
  it.x_hat = j.at("x_hat").get<double>();
  it.f_hat = j.at("f_hat").get<double>();
  it.simple_regret = j.at("simple_regret").get<double>();
  it.gp_mse = j.at("gp_mse").get<double>();
  if (j.contains("tau_sq") && !j.at("tau_sq").is_null()) it.tau_sq = j.at("tau_sq").get<double>();
  return it;
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) c = '_';
  }
  return out;
}

fs::path run_path(const fs::path& dir, const std::string& method, std::uint64_t seed) {
  return dir / "runs" / sanitize(method) / (std::to_string(seed) + ".json");
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoFailure(p.string(), "cannot create directory (" + ec.message() + ")");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

json acquisition_to_json(const AcquisitionSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  if (!spec.label.empty()) j["label"] = spec.label;
  switch (spec.kind) {
    case AcquisitionKind::UCB: j["beta"] = spec.ucb_beta; break;
    case AcquisitionKind::PI: j["xi"] = spec.pi_xi; break;
    case AcquisitionKind::EFE:
      if (spec.efe->mode == TauMode::Adaptive) {
        j["mode"] = "adaptive";
        j["tau_sq_min"] = spec.efe->tau_sq_min;
        j["tau_sq_max"] = spec.efe->tau_sq_max;
      } else {
        j["mode"] = "fixed";
        j["tau_sq"] = spec.efe->tau_sq_fixed;
      }
      break;
    default: break;
  }
  return j;
}

AcquisitionSpec acquisition_from_json(const json& j) {
  const std::string where = "method";
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ": missing 'kind'");
  AcquisitionSpec spec;
  try {
    spec.kind = parse_acquisition_kind(j.at("kind").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  read_opt(j, "label", spec.label, where);
  switch (spec.kind) {
    case AcquisitionKind::UCB:
      check_keys(j, {"kind", "label", "beta"}, where);
      read_opt(j, "beta", spec.ucb_beta, where);
      break;
    case AcquisitionKind::PI:
      check_keys(j, {"kind", "label", "xi"}, where);
      read_opt(j, "xi", spec.pi_xi, where);
      break;
    case AcquisitionKind::EFE: {
      check_keys(j, {"kind", "label", "mode", "tau_sq_min", "tau_sq_max", "tau_sq"}, where);
      std::string mode = "adaptive";
      read_opt(j, "mode", mode, where);
      if (mode == "adaptive") {
        EfePreference pref;
        read_opt(j, "tau_sq_min", pref.tau_sq_min, where);
        read_opt(j, "tau_sq_max", pref.tau_sq_max, where);
        if (j.contains("tau_sq")) throw ConfigError(where + ": 'tau_sq' is only valid in fixed mode");
        spec.efe = pref;
      } else if (mode == "fixed") {
        if (!j.contains("tau_sq")) throw ConfigError(where + ": fixed EFE requires 'tau_sq'");
        double tau_sq = 0.0;
        read_opt(j, "tau_sq", tau_sq, where);
        const std::string label = spec.label;
        spec = AcquisitionSpec::efe_fixed(tau_sq);
        spec.label = label;
      } else {
        throw ConfigError(where + ": EFE mode must be 'adaptive' or 'fixed'");
      }
      break;
    }
    default: check_keys(j, {"kind", "label"}, where); break;
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

json benchmark_config_to_json(const BenchmarkConfig& cfg) {
  json j;
  j["n_objectives"] = cfg.n_objectives;
  j["master_seed"] = cfg.master_seed;
  j["workers"] = cfg.workers;
  json run;
  run["grid"] = {{"lower", cfg.run.grid_lower}, {"upper", cfg.run.grid_upper}, {"points", cfg.run.grid_points}};
  run["gp"] = {{"lengthscale", cfg.run.gp.lengthscale},
               {"signal_variance", cfg.run.gp.signal_variance},
               {"noise_variance", cfg.run.gp.noise_variance},
               {"jitter", cfg.run.gp.jitter}};
  run["initial_points"] = cfg.run.initial_points;
  run["iterations"] = cfg.run.iterations;
  run["obs_noise_std"] = cfg.run.obs_noise_std;
  j["run"] = run;
  j["methods"] = json::array();
  for (const auto& m : cfg.methods) j["methods"].push_back(acquisition_to_json(m));
  return j;
}

BenchmarkConfig benchmark_config_from_json(const json& j) {
  BenchmarkConfig cfg = BenchmarkConfig::defaults();
  check_keys(j, {"n_objectives", "master_seed", "workers", "run", "methods"}, "config");
  read_opt(j, "n_objectives", cfg.n_objectives, "config");
  read_opt(j, "master_seed", cfg.master_seed, "config");
  read_opt(j, "workers", cfg.workers, "config");
  if (j.contains("run")) {
    const json& run = j.at("run");
    check_keys(run, {"grid", "gp", "initial_points", "iterations", "obs_noise_std"}, "config.run");
    if (run.contains("grid")) {
      const json& g = run.at("grid");
      check_keys(g, {"lower", "upper", "points"}, "config.run.grid");
      read_opt(g, "lower", cfg.run.grid_lower, "config.run.grid");
      read_opt(g, "upper", cfg.run.grid_upper, "config.run.grid");
      read_opt(g, "points", cfg.run.grid_points, "config.run.grid");
    }
    if (run.contains("gp")) {
      const json& g = run.at("gp");
      check_keys(g, {"lengthscale", "signal_variance", "noise_variance", "jitter"}, "config.run.gp");
      read_opt(g, "lengthscale", cfg.run.gp.lengthscale, "config.run.gp");
      read_opt(g, "signal_variance", cfg.run.gp.signal_variance, "config.run.gp");
      cfg.run.gp.jitter = GpConfig::default_jitter(cfg.run.gp.signal_variance);
      read_opt(g, "noise_variance", cfg.run.gp.noise_variance, "config.run.gp");
      read_opt(g, "jitter", cfg.run.gp.jitter, "config.run.gp");
    }
    read_opt(run, "initial_points", cfg.run.initial_points, "config.run");
    read_opt(run, "iterations", cfg.run.iterations, "config.run");
    read_opt(run, "obs_noise_std", cfg.run.obs_noise_std, "config.run");
  }
  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) throw ConfigError("config.methods: expected an array");
    cfg.methods.clear();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(acquisition_from_json(m));
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return benchmark_config_from_json(j);
}

json run_record_to_json(const RunRecord& record) {
  json j;
  j["method"] = record.method;
  j["initial_xs"] = record.initial_xs;
  j["initial_ys"] = record.initial_ys;
  j["iterations"] = json::array();
  for (const auto& it : record.iterations) j["iterations"].push_back(iteration_to_json(it));
  if (!record.iterations.empty()) j["final"] = iteration_to_json(record.final());
  return j;
}

RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  r.method = j.at("method").get<std::string>();
  r.initial_xs = j.at("initial_xs").get<std::vector<double>>();
  r.initial_ys = j.at("initial_ys").get<std::vector<double>>();
  for (const auto& it : j.at("iterations")) r.iterations.push_back(iteration_from_json(it));
  return r;
}

json report_to_json(const AggregateReport& report) {
  json j;
  j["completed"] = report.completed;
  j["failed"] = report.failed;
  j["summary"] = json::array();
  for (const auto& s : report.summary) {
    j["summary"].push_back({{"method", s.method},
                            {"n_runs", s.n_runs},
                            {"n_failed", s.n_failed},
                            {"mean_final_mse", s.mean_final_mse},
                            {"sd_final_mse", s.sd_final_mse},
                            {"mean_final_regret", s.mean_final_regret},
                            {"sd_final_regret", s.sd_final_regret}});
  }
  j["scatter"] = json::array();
  for (const auto& r : report.scatter) {
    j["scatter"].push_back({{"method", r.method},
                            {"objective_index", r.objective_index},
                            {"objective_seed", r.objective_seed},
                            {"final_mse", r.final_mse},
                            {"final_regret", r.final_regret}});
  }
  return j;
}

AggregateReport report_from_json(const json& j) {
  AggregateReport report;
  report.completed = j.at("completed").get<std::size_t>();
  report.failed = j.at("failed").get<std::size_t>();
  for (const auto& s : j.at("summary")) {
    MethodSummary m;
    m.method = s.at("method").get<std::string>();
    m.n_runs = s.at("n_runs").get<std::size_t>();
    m.n_failed = s.at("n_failed").get<std::size_t>();
    m.mean_final_mse = s.at("mean_final_mse").get<double>();
    m.sd_final_mse = s.at("sd_final_mse").get<double>();
    m.mean_final_regret = s.at("mean_final_regret").get<double>();
    m.sd_final_regret = s.at("sd_final_regret").get<double>();
    report.summary.push_back(m);
  }
  for (const auto& s : j.at("scatter")) {
    report.scatter.push_back({s.at("method").get<std::string>(), s.at("objective_index").get<std::size_t>(),
                              s.at("objective_seed").get<std::uint64_t>(), s.at("final_mse").get<double>(),
                              s.at("final_regret").get<double>()});
  }
  return report;
}

void export_report(const AggregateReport& report, const std::string& dir, ReportFormat format) {
  ensure_dir(dir);
  const fs::path base(dir);
  if (format == ReportFormat::Json) {
    write_text_file((base / "report.json").string(), report_to_json(report).dump(2) + "\n");
    return;
  }
  std::string summary(kSummaryCsvHeader);
  summary += '\n';
  for (const auto& s : report.summary) {
    summary += s.method + ',' + std::to_string(s.n_runs) + ',' + std::to_string(s.n_failed) + ',' +
               format_double(s.mean_final_mse) + ',' + format_double(s.sd_final_mse) + ',' +
               format_double(s.mean_final_regret) + ',' + format_double(s.sd_final_regret) + '\n';
  }
  write_text_file((base / "summary.csv").string(), summary);

  std::string scatter(kScatterCsvHeader);
  scatter += '\n';
  for (const auto& r : report.scatter) {
    scatter += r.method + ',' + std::to_string(r.objective_index) + ',' + std::to_string(r.objective_seed) + ',' +
               format_double(r.final_mse) + ',' + format_double(r.final_regret) + '\n';
  }
  write_text_file((base / "scatter.csv").string(), scatter);
}

AggregateReport import_report(const std::string& dir, ReportFormat format) {
  const fs::path base(dir);
  if (format == ReportFormat::Json) {
    const std::string path = (base / "report.json").string();
    try {
      return report_from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
      throw IoFailure(path, std::string("malformed report (") + e.what() + ")");
    }
  }
  AggregateReport report;
  const std::string summary_path = (base / "summary.csv").string();
  const std::string scatter_path = (base / "scatter.csv").string();
  try {
    for (const auto& line : read_csv_rows(summary_path, kSummaryCsvHeader)) {
      const auto c = split_csv_line(line);
      if (c.size() != 7) throw std::invalid_argument("expected 7 columns");
      MethodSummary s{c[0],
                      parse_int<std::size_t>(c[1]),
                      parse_int<std::size_t>(c[2]),
                      parse_double(c[3]),
                      parse_double(c[4]),
                      parse_double(c[5]),
                      parse_double(c[6])};
      report.completed += s.n_runs;
      report.failed += s.n_failed;
      report.summary.push_back(s);
    }
  } catch (const std::invalid_argument& e) {
    throw IoFailure(summary_path, std::string("malformed row (") + e.what() + ")");
  }
  try {
    for (const auto& line : read_csv_rows(scatter_path, kScatterCsvHeader)) {
      const auto c = split_csv_line(line);
      if (c.size() != 5) throw std::invalid_argument("expected 5 columns");
      report.scatter.push_back({c[0], parse_int<std::size_t>(c[1]), parse_int<std::uint64_t>(c[2]),
                                parse_double(c[3]), parse_double(c[4])});
    }
  } catch (const std::invalid_argument& e) {
    throw IoFailure(scatter_path, std::string("malformed row (") + e.what() + ")");
  }
  return report;
}

void write_benchmark_outputs(const std::string& dir, const BenchmarkConfig& cfg, const BenchmarkResult& result) {
  const fs::path base(dir);
  export_report(result.report, dir, ReportFormat::Csv);
  export_report(result.report, dir, ReportFormat::Json);
  write_text_file((base / "config.replay.json").string(), benchmark_config_to_json(cfg).dump(2) + "\n");
  for (const auto& r : result.runs) {
    if (!r.record) continue;
    const fs::path p = run_path(base, r.method, r.objective_seed);
    ensure_dir(p.parent_path());
    json j = run_record_to_json(*r.record);
    j["objective_index"] = r.objective_index;
    j["objective_seed"] = r.objective_seed;
    write_text_file(p.string(), j.dump(2) + "\n");
  }
}

std::vector<BenchmarkRun> load_runs(const std::string& dir, const BenchmarkConfig& cfg) {
  std::vector<BenchmarkRun> runs;
  for (std::size_t o = 0; o < cfg.n_objectives; ++o) {
    for (const auto& m : cfg.methods) {
      BenchmarkRun r;
      r.method = m.name();
      r.objective_index = o;
      r.objective_seed = objective_seed(cfg.master_seed, o);
      const fs::path p = run_path(dir, r.method, r.objective_seed);
      if (fs::exists(p)) {
        try {
          r.record = run_record_from_json(json::parse(read_text_file(p.string())));
        } catch (const json::exception& e) {
          throw IoFailure(p.string(), std::string("malformed run record (") + e.what() + ")");
        }
      } else {
        r.error = "missing run record";
      }
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

void write_vdp_outputs(const std::string& dir, const VdpDemoConfig& cfg, const VdpDemoResult& result) {
  ensure_dir(dir);
  const fs::path base(dir);
  std::string curve = "kappa,true_cost,adaptive_mu,adaptive_sd,fixed_mu,fixed_sd\n";
  for (Eigen::Index i = 0; i < result.kappas.size(); ++i) {
    curve += format_double(result.kappas[i]) + ',' + format_double(result.true_cost[i]) + ',' +
             format_double(result.adaptive.mu[i]) + ',' + format_double(result.adaptive.sd[i]) + ',' +
             format_double(result.fixed.mu[i]) + ',' + format_double(result.fixed.sd[i]) + '\n';
  }
  write_text_file((base / "vdp_curve.csv").string(), curve);

  std::string queries = "mode,iteration,kappa,y,tau_sq\n";
  for (const auto* mode : {&result.adaptive, &result.fixed}) {
    const std::string name = mode == &result.adaptive ? "adaptive" : "fixed";
    for (std::size_t i = 0; i < mode->record.initial_xs.size(); ++i) {
      queries += name + ",0," + format_double(mode->record.initial_xs[i]) + ',' +
                 format_double(mode->record.initial_ys[i]) + ",\n";
    }
    for (const auto& it : mode->record.iterations) {
      queries += name + ',' + std::to_string(it.iteration) + ',' + format_double(it.x) + ',' + format_double(it.y) +
                 ',' + (it.tau_sq ? format_double(*it.tau_sq) : std::string()) + '\n';
    }
  }
  write_text_file((base / "vdp_queries.csv").string(), queries);
  write_text_file((base / "vdp_adaptive.json").string(), run_record_to_json(result.adaptive.record).dump(2) + "\n");
  write_text_file((base / "vdp_fixed.json").string(), run_record_to_json(result.fixed.record).dump(2) + "\n");

  json summary;
  summary["seed"] = cfg.vdp.seed;
  summary["kappa_true"] = cfg.vdp.kappa_true;
  summary["iterations"] = cfg.iterations;
  summary["fixed_tau_sq"] = cfg.fixed_tau_sq;
  summary["tau_sq_min"] = cfg.tau_sq_min;
  summary["tau_sq_max"] = cfg.tau_sq_max;
  summary["gp"] = {{"lengthscale", cfg.gp.lengthscale},
                   {"signal_variance", cfg.gp.signal_variance},
                   {"noise_variance", cfg.gp.noise_variance},
                   {"jitter", cfg.gp.jitter}};
  summary["adaptive"] = {{"best_kappa", result.adaptive.best_kappa}, {"final_gp_mse", result.adaptive.final_gp_mse}};
  summary["fixed"] = {{"best_kappa", result.fixed.best_kappa}, {"final_gp_mse", result.fixed.final_gp_mse}};
  write_text_file((base / "vdp_summary.json").string(), summary.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(path, "cannot open for writing");
  out << contents;
  if (!out) throw IoFailure(path, "write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace efebo
