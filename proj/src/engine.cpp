#include "efebo/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "efebo/errors.hpp"
#include "efebo/objectives.hpp"
#include "efebo/rng.hpp"

namespace efebo {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;     // "noise"
constexpr std::uint64_t kSamplerStream = 0x73616d706cULL;   // "sampl"

}  // namespace

void RunConfig::validate() const {
  gp.validate();
  acquisition.validate();
  if (initial_points.empty()) throw std::invalid_argument("RunConfig: initial_points must be nonempty");
  if (iterations < 1) throw std::invalid_argument("RunConfig: iterations must be >= 1");
  if (!(obs_noise_std >= 0.0)) throw std::invalid_argument("RunConfig: obs_noise_std must be >= 0");
  const Grid g = grid();
  for (double x : initial_points) {
    if (!g.contains(x)) throw std::invalid_argument("RunConfig: initial point outside the grid bounds");
  }
}

Dataset RunRecord::dataset() const {
  Dataset d;
  d.xs = initial_xs;
  d.ys = initial_ys;
  for (const auto& it : iterations) d.append(it.x, it.y);
  return d;
}

Incumbent incumbent(const Dataset& data, const Posterior& post, const Grid& grid) {
  if (data.empty()) throw EmptyDataset("incumbent requires at least one observation");
  Incumbent best;
  bool have = false;
  for (double x : data.xs) {
    const double mu = post.mu[static_cast<Eigen::Index>(grid.nearest_index(x))];
    if (!have || mu > best.mu_hat) {
      best = {x, mu};
      have = true;
    }
  }
  return best;
}

double simple_regret(const Eigen::VectorXd& f_on_grid, const Grid& grid, double x_hat) {
  const double f_hat = f_on_grid[static_cast<Eigen::Index>(grid.nearest_index(x_hat))];
  return f_on_grid.maxCoeff() - f_hat;
}

double gp_mse(const Posterior& post, const Eigen::VectorXd& f_on_grid) {
  if (post.mu.size() != f_on_grid.size()) throw std::invalid_argument("gp_mse: size mismatch");
  return (post.mu - f_on_grid).squaredNorm() / static_cast<double>(f_on_grid.size());
}

std::uint64_t observation_seed(std::uint64_t run_seed, std::size_t evaluation, std::size_t grid_index) {
  return derive_seed(run_seed, {kNoiseStream, evaluation, grid_index});
}

RunRecord run(const RunConfig& config, const Eigen::VectorXd& f_on_grid) {
  config.validate();
  const Grid grid = config.grid();
  if (static_cast<std::size_t>(f_on_grid.size()) != grid.size()) {
    throw std::invalid_argument("run: objective table does not match the grid");
  }

  std::size_t evaluation = 0;
  auto observe_at = [&](std::size_t idx) {
    ObservationChannel channel(config.obs_noise_std, observation_seed(config.seed, evaluation++, idx));
    return channel.observe(f_on_grid[static_cast<Eigen::Index>(idx)]);
  };

  RunRecord record;
  record.method = config.acquisition.name();
  Dataset data;
  for (double p : config.initial_points) {
    const std::size_t idx = grid.nearest_index(p);
    const double y = observe_at(idx);
    data.append(grid[idx], y);
    record.initial_xs.push_back(grid[idx]);
    record.initial_ys.push_back(y);
  }

  GpModel model = fit(config.gp, data);
  Posterior post = posterior(model, grid);
  record.iterations.reserve(config.iterations);
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    SeededRng sampler(derive_seed(config.seed, {kSamplerStream, it}));
    AcquisitionContext ctx;
    ctx.model = &model;
    ctx.grid = &grid;
    ctx.posterior = &post;
    ctx.incumbent = incumbent(data, post, grid).mu_hat;
    ctx.rng = &sampler;
    const AcquisitionResult acq = evaluate_acquisition(config.acquisition, ctx);

    const auto idx = static_cast<std::size_t>(acq.scores.argmax_index);
    IterationRecord rec;
    rec.iteration = it;
    rec.x = grid[idx];
    rec.y = observe_at(idx);
    if (acq.tau_sq.size() > 0) rec.tau_sq = acq.tau_sq[static_cast<Eigen::Index>(idx)];
    data.append(rec.x, rec.y);

    model = fit(config.gp, data);
    post = posterior(model, grid);
    const Incumbent inc = incumbent(data, post, grid);
    rec.x_hat = inc.x_hat;
    rec.f_hat = f_on_grid[static_cast<Eigen::Index>(grid.nearest_index(inc.x_hat))];
    rec.simple_regret = simple_regret(f_on_grid, grid, inc.x_hat);
    rec.gp_mse = gp_mse(post, f_on_grid);
    record.iterations.push_back(rec);
  }
  return record;
}

}  // namespace efebo
