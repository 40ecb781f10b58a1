#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efebo/acquisition.hpp"
#include "efebo/gp.hpp"

namespace efebo {

struct RunConfig {
  double grid_lower = -8.0;
  double grid_upper = 8.0;
  std::size_t grid_points = 400;
  GpConfig gp;
  AcquisitionSpec acquisition;
  /// Snapped to the nearest grid point before use.
  std::vector<double> initial_points{-5.0, 0.0, 5.0};
  std::size_t iterations = 50;
  double obs_noise_std = 0.2;
  /// Keys the observation noise and any acquisition randomness.
  std::uint64_t seed = 0;

  Grid grid() const { return Grid(grid_lower, grid_upper, grid_points); }
  void validate() const;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double x = 0.0;
  double y = 0.0;
  double x_hat = 0.0;
  double f_hat = 0.0;
  double simple_regret = 0.0;
  double gp_mse = 0.0;
  /// Preference variance at the selected point; EFE runs only.
  std::optional<double> tau_sq;
};

struct RunRecord {
  std::string method;
  std::vector<double> initial_xs;
  std::vector<double> initial_ys;
  std::vector<IterationRecord> iterations;

  const IterationRecord& final() const { return iterations.back(); }
  Dataset dataset() const;
};

/// The queried location with the largest posterior mean and that mean. Ties
/// go to the earliest query. Throws EmptyDataset.
struct Incumbent {
  double x_hat = 0.0;
  double mu_hat = 0.0;
};
Incumbent incumbent(const Dataset& data, const Posterior& post, const Grid& grid);

/// max over the grid of f minus f at the recommended point.
double simple_regret(const Eigen::VectorXd& f_on_grid, const Grid& grid, double x_hat);

/// Mean over the grid of (mu - f)^2.
double gp_mse(const Posterior& post, const Eigen::VectorXd& f_on_grid);

/// Derives the noise seed for the `evaluation`-th observation at grid index
/// `grid_index`. Two runs with the same seed that query the same index at the
/// same evaluation step see the same noise draw.
std::uint64_t observation_seed(std::uint64_t run_seed, std::size_t evaluation, std::size_t grid_index);

/// Runs sequential BO against an objective tabulated on the run's grid. The
/// optimizer only sees noisy observations; f_on_grid is also used for the
/// out-of-band regret and MSE metrics.
RunRecord run(const RunConfig& config, const Eigen::VectorXd& f_on_grid);

}  // namespace efebo
