#include "efebo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>
#include <thread>

#include "efebo/errors.hpp"

namespace efebo {

namespace {

constexpr std::uint64_t kObjectiveStream = 0x6f626a656374ULL;  // "object"

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and sample (n-1) standard deviation; sd is 0 for fewer than 2 values.
Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return m;
}

}  // namespace

BenchmarkConfig BenchmarkConfig::defaults() {
  BenchmarkConfig cfg;
  cfg.run.grid_lower = SinusoidObjective::kLower;
  cfg.run.grid_upper = SinusoidObjective::kUpper;
  cfg.run.grid_points = 400;
  cfg.run.gp.lengthscale = 0.5;
  cfg.run.gp.signal_variance = 1.0;
  cfg.run.gp.noise_variance = 0.04;
  cfg.run.gp.jitter = GpConfig::default_jitter(1.0);
  cfg.run.initial_points = {-5.0, 0.0, 5.0};
  cfg.run.iterations = 50;
  cfg.run.obs_noise_std = 0.2;
  cfg.methods = {AcquisitionSpec::ucb(2.0), AcquisitionSpec::ei(),  AcquisitionSpec::pi(0.01),
                 AcquisitionSpec::var(),    AcquisitionSpec::ts(),  AcquisitionSpec::efe_adaptive(1.0, 30.0),
                 AcquisitionSpec::kg()};
  return cfg;
}

void BenchmarkConfig::validate() const {
  if (n_objectives < 1) throw std::invalid_argument("BenchmarkConfig: n_objectives must be >= 1");
  if (methods.empty()) throw std::invalid_argument("BenchmarkConfig: at least one method is required");
  if (workers < 1) throw std::invalid_argument("BenchmarkConfig: workers must be >= 1");
  std::vector<std::string> names;
  for (const auto& m : methods) {
    m.validate();
    names.push_back(lower(m.name()));
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw std::invalid_argument("BenchmarkConfig: method names must be unique");
  }
  RunConfig probe = run;
  probe.acquisition = methods.front();
  probe.validate();
  if (run.grid_lower < SinusoidObjective::kLower || run.grid_upper > SinusoidObjective::kUpper) {
    throw std::invalid_argument("BenchmarkConfig: grid must lie inside the objective domain [-8, 8]");
  }
}

void BenchmarkConfig::select_methods(const std::vector<std::string>& names) {
  std::vector<AcquisitionSpec> kept;
  for (const auto& want : names) {
    auto it = std::find_if(methods.begin(), methods.end(),
                           [&](const AcquisitionSpec& m) { return lower(m.name()) == lower(want); });
    if (it == methods.end()) throw std::invalid_argument("unknown method '" + want + "'");
    kept.push_back(*it);
  }
  methods = std::move(kept);
}

std::uint64_t objective_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, {kObjectiveStream, index});
}

const MethodSummary* AggregateReport::find(const std::string& method) const {
  for (const auto& s : summary) {
    if (s.method == method) return &s;
  }
  return nullptr;
}

AggregateReport build_report(const std::vector<std::string>& method_order, const std::vector<BenchmarkRun>& runs) {
  std::map<std::string, std::vector<const BenchmarkRun*>> by_method;
  for (const auto& r : runs) by_method[r.method].push_back(&r);

  AggregateReport report;
  for (const auto& name : method_order) {
    auto& group = by_method[name];
    std::sort(group.begin(), group.end(), [](const BenchmarkRun* a, const BenchmarkRun* b) {
      return a->objective_index < b->objective_index;
    });
    MethodSummary s;
    s.method = name;
    std::vector<double> mse;
    std::vector<double> regret;
    for (const BenchmarkRun* r : group) {
      if (!r->record) {
        ++s.n_failed;
        continue;
      }
      const IterationRecord& fin = r->record->final();
      mse.push_back(fin.gp_mse);
      regret.push_back(fin.simple_regret);
      report.scatter.push_back({name, r->objective_index, r->objective_seed, fin.gp_mse, fin.simple_regret});
    }
    s.n_runs = mse.size();
    const Moments m = moments(mse);
    const Moments g = moments(regret);
    s.mean_final_mse = m.mean;
    s.sd_final_mse = m.sd;
    s.mean_final_regret = g.mean;
    s.sd_final_regret = g.sd;
    report.completed += s.n_runs;
    report.failed += s.n_failed;
    report.summary.push_back(s);
  }
  return report;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.run.grid();

  std::vector<SinusoidObjective> objectives;
  std::vector<Eigen::VectorXd> tables;
  for (std::size_t o = 0; o < cfg.n_objectives; ++o) {
    objectives.push_back(generate_sinusoid(objective_seed(cfg.master_seed, o)));
    tables.push_back(tabulate(objectives.back(), grid));
  }

  const std::size_t n_methods = cfg.methods.size();
  std::vector<BenchmarkRun> runs(cfg.n_objectives * n_methods);
  for (std::size_t o = 0; o < cfg.n_objectives; ++o) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      BenchmarkRun& r = runs[o * n_methods + m];
      r.method = cfg.methods[m].name();
      r.objective_index = o;
      r.objective_seed = objectives[o].seed;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < runs.size(); task = next++) {
      const std::size_t o = task / n_methods;
      const std::size_t m = task % n_methods;
      RunConfig rc = cfg.run;
      rc.acquisition = cfg.methods[m];
      // Same seed for every method on an objective: identical noise draws.
      rc.seed = objectives[o].seed;
      try {
        runs[task].record = run(rc, tables[o]);
      } catch (const std::exception& e) {
        runs[task].error = e.what();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.workers, runs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> order;
  for (const auto& m : cfg.methods) order.push_back(m.name());
  BenchmarkResult result{build_report(order, runs), std::move(runs)};
  if (result.report.failed > 0) {
    std::cerr << "warning: " << result.report.failed << " run(s) failed and were excluded from aggregates\n";
  }
  return result;
}

VdpDemoConfig VdpDemoConfig::defaults() {
  VdpDemoConfig c;
  // The cost spans roughly [-7.5, 0] with a peak about 0.3 wide in kappa.
  c.gp.lengthscale = 0.15;
  c.gp.signal_variance = 10.0;
  c.gp.noise_variance = 1e-4;
  c.gp.jitter = GpConfig::default_jitter(c.gp.signal_variance);
  return c;
}

namespace {

VdpDemoRun run_vdp_mode(const VdpDemoConfig& cfg, const AcquisitionSpec& spec, const Grid& grid,
                        const Eigen::VectorXd& cost) {
  RunConfig rc;
  rc.grid_lower = cfg.vdp.kappa_lower;
  rc.grid_upper = cfg.vdp.kappa_upper;
  rc.grid_points = cfg.vdp.kappa_points;
  rc.gp = cfg.gp;
  rc.acquisition = spec;
  rc.initial_points = cfg.initial_points;
  rc.iterations = cfg.iterations;
  // The reference trajectory already carries the measurement noise.
  rc.obs_noise_std = 0.0;
  rc.seed = cfg.vdp.seed;

  VdpDemoRun out;
  out.record = run(rc, cost);
  out.best_kappa = out.record.final().x_hat;
  out.final_gp_mse = out.record.final().gp_mse;
  const Posterior post = posterior(fit(cfg.gp, out.record.dataset()), grid);
  out.mu = post.mu;
  out.sd = post.var_latent.array().sqrt();
  return out;
}

}  // namespace

VdpDemoResult run_vdp_demo(const VdpDemoConfig& cfg) {
  cfg.vdp.validate();
  const Grid grid(cfg.vdp.kappa_lower, cfg.vdp.kappa_upper, cfg.vdp.kappa_points);
  const std::vector<double> reference = vdp_reference(cfg.vdp);

  VdpDemoResult result;
  result.kappas = grid.points();
  result.true_cost = tabulate([&](double k) { return vdp_objective(k, reference, cfg.vdp); }, grid);
  result.adaptive = run_vdp_mode(cfg, AcquisitionSpec::efe_adaptive(cfg.tau_sq_min, cfg.tau_sq_max), grid,
                                 result.true_cost);
  result.fixed = run_vdp_mode(cfg, AcquisitionSpec::efe_fixed(cfg.fixed_tau_sq), grid, result.true_cost);
  return result;
}

}  // namespace efebo
