#pragma once

#include <Eigen/Dense>
#include <vector>

#include "efebo/rng.hpp"

namespace efebo {

/// Fixed hyperparameters of the RBF-kernel GP. Nothing here is learned.
struct GpConfig {
  double lengthscale = 0.5;
  double signal_variance = 1.0;
  double noise_variance = 0.04;
  /// Added to the kernel diagonal before factorization.
  double jitter = 1e-8;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  /// Default jitter for a given signal variance (1e-8 relative).
  static double default_jitter(double signal_variance) { return 1e-8 * signal_variance; }
};

struct Dataset {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const noexcept { return xs.size(); }
  bool empty() const noexcept { return xs.empty(); }
  void append(double x, double y) {
    xs.push_back(x);
    ys.push_back(y);
  }
};

/// Equally spaced evaluation points on [lower, upper].
class Grid {
 public:
  /// n == 1 is allowed only when lower == upper.
  Grid(double lower, double upper, std::size_t n);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.size()); }
  /// Spacing between neighbours; 0 for a single-point grid.
  double spacing() const noexcept { return spacing_; }
  const Eigen::VectorXd& points() const noexcept { return points_; }
  double operator[](std::size_t i) const { return points_[static_cast<Eigen::Index>(i)]; }
  bool contains(double x) const noexcept;
  /// Index of the grid point closest to x (ties to the lower index).
  std::size_t nearest_index(double x) const;

 private:
  double lower_;
  double upper_;
  double spacing_;
  Eigen::VectorXd points_;
};

/// GP posterior evaluated on a grid.
struct Posterior {
  Eigen::VectorXd mu;
  /// sigma^2(x), clamped at 0.
  Eigen::VectorXd var_latent;
  /// sigma^2(x) + noise variance.
  Eigen::VectorXd var_predictive;
  /// Central second difference of mu. Empty when the grid has fewer than 3 points.
  Eigen::VectorXd mu_dd;

  Eigen::Index size() const noexcept { return mu.size(); }
};

/// Exact GP regression conditioned on a dataset. Immutable once built.
class GpModel {
 public:
  GpModel(GpConfig config, Dataset data);

  const GpConfig& config() const noexcept { return config_; }
  const Dataset& data() const noexcept { return data_; }

  double kernel(double a, double b) const noexcept;
  /// Cross-covariance k(xs_i, data_j).
  Eigen::MatrixXd cross_kernel(const Eigen::VectorXd& xs) const;
  /// Posterior mean and clamped latent variance at arbitrary points.
  void predict(const Eigen::VectorXd& xs, Eigen::VectorXd& mean, Eigen::VectorXd& var) const;
  /// Full posterior covariance over xs (no jitter added).
  Eigen::MatrixXd covariance(const Eigen::VectorXd& xs) const;

 private:
  GpConfig config_;
  Dataset data_;
  Eigen::VectorXd train_x_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

/// Fits the GP. Throws FactorizationFailure if K + (noise + jitter) I is not
/// positive definite.
GpModel fit(const GpConfig& config, const Dataset& data);

Posterior posterior(const GpModel& model, const Grid& grid);

/// Posterior covariance matrix over the grid points.
Eigen::MatrixXd posterior_covariance(const GpModel& model, const Grid& grid);

/// One joint draw from N(mean, cov + jitter I). An all-zero covariance
/// returns the mean unchanged.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, double jitter,
                           SeededRng& rng);

/// One joint posterior draw over the grid using the model's jitter.
Eigen::VectorXd sample_posterior(const GpModel& model, const Grid& grid, SeededRng& rng);

/// (v[i-1] - 2 v[i] + v[i+1]) / h^2 at interior points; endpoints copy their
/// neighbour. Throws GridTooSmall if v has fewer than 3 entries.
Eigen::VectorXd second_difference(const Eigen::VectorXd& values, double spacing);

/// mu'' of the posterior mean on the grid.
Eigen::VectorXd posterior_second_derivative(const GpModel& model, const Grid& grid);

}  // namespace efebo
