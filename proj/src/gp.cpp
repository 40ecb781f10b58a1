#include "efebo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "efebo/errors.hpp"

namespace efebo {

void GpConfig::validate() const {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw std::invalid_argument("GpConfig: lengthscale must be positive");
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw std::invalid_argument("GpConfig: signal_variance must be positive");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("GpConfig: noise_variance must be non-negative");
  }
  if (!(jitter > 0.0) || !std::isfinite(jitter)) {
    throw std::invalid_argument("GpConfig: jitter must be positive");
  }
}

Grid::Grid(double lower, double upper, std::size_t n) : lower_(lower), upper_(upper), spacing_(0.0) {
  if (n == 0) throw std::invalid_argument("Grid: need at least one point");
  if (!std::isfinite(lower) || !std::isfinite(upper)) throw std::invalid_argument("Grid: bounds must be finite");
  if (n == 1) {
    if (lower != upper) throw std::invalid_argument("Grid: a single-point grid needs lower == upper");
  } else if (!(upper > lower)) {
    throw std::invalid_argument("Grid: upper must exceed lower");
  }
  points_.resize(static_cast<Eigen::Index>(n));
  if (n == 1) {
    points_[0] = lower;
    return;
  }
  spacing_ = (upper - lower) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    points_[static_cast<Eigen::Index>(i)] = lower + static_cast<double>(i) * spacing_;
  }
  points_[static_cast<Eigen::Index>(n - 1)] = upper;
}

bool Grid::contains(double x) const noexcept { return x >= lower_ && x <= upper_; }

std::size_t Grid::nearest_index(double x) const {
  if (size() == 1) return 0;
  const double pos = std::round((x - lower_) / spacing_);
  const double clamped = std::clamp(pos, 0.0, static_cast<double>(size() - 1));
  return static_cast<std::size_t>(clamped);
}

GpModel::GpModel(GpConfig config, Dataset data) : config_(config), data_(std::move(data)) {
  config_.validate();
  if (data_.xs.size() != data_.ys.size()) {
    throw std::invalid_argument("Dataset: xs and ys differ in length");
  }
  const auto m = static_cast<Eigen::Index>(data_.size());
  train_x_ = Eigen::Map<const Eigen::VectorXd>(data_.xs.data(), m);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data_.ys.data(), m);
  if (!train_x_.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entries");
  }
  if (m == 0) return;

  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = kernel(train_x_[i], train_x_[j]);
      k(j, i) = k(i, j);
    }
  }
  k.diagonal().array() += config_.noise_variance + config_.jitter;
  chol_.compute(k);
  if (chol_.info() != Eigen::Success) {
    throw FactorizationFailure("regularized kernel matrix is not positive definite");
  }
  alpha_ = chol_.solve(y);
  if (!alpha_.allFinite()) {
    throw FactorizationFailure("kernel solve produced non-finite weights");
  }
}

double GpModel::kernel(double a, double b) const noexcept {
  const double d = a - b;
  return config_.signal_variance * std::exp(-d * d / (2.0 * config_.lengthscale * config_.lengthscale));
}

Eigen::MatrixXd GpModel::cross_kernel(const Eigen::VectorXd& xs) const {
  Eigen::MatrixXd ks(xs.size(), train_x_.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    for (Eigen::Index j = 0; j < train_x_.size(); ++j) {
      ks(i, j) = kernel(xs[i], train_x_[j]);
    }
  }
  return ks;
}

void GpModel::predict(const Eigen::VectorXd& xs, Eigen::VectorXd& mean, Eigen::VectorXd& var) const {
  if (train_x_.size() == 0) {
    mean = Eigen::VectorXd::Zero(xs.size());
    var = Eigen::VectorXd::Constant(xs.size(), config_.signal_variance);
    return;
  }
  const Eigen::MatrixXd ks = cross_kernel(xs);
  mean = ks * alpha_;
  const Eigen::MatrixXd v = chol_.matrixL().solve(ks.transpose());
  var = (config_.signal_variance - v.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
}

Eigen::MatrixXd GpModel::covariance(const Eigen::VectorXd& xs) const {
  const Eigen::Index n = xs.size();
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = kernel(xs[i], xs[j]);
      cov(j, i) = cov(i, j);
    }
  }
  if (train_x_.size() == 0) return cov;
  const Eigen::MatrixXd v = chol_.matrixL().solve(cross_kernel(xs).transpose());
  cov.noalias() -= v.transpose() * v;
  return cov;
}

GpModel fit(const GpConfig& config, const Dataset& data) { return GpModel(config, data); }

Posterior posterior(const GpModel& model, const Grid& grid) {
  Posterior post;
  model.predict(grid.points(), post.mu, post.var_latent);
  post.var_predictive = post.var_latent.array() + model.config().noise_variance;
  if (grid.size() >= 3) post.mu_dd = second_difference(post.mu, grid.spacing());
  return post;
}

Eigen::MatrixXd posterior_covariance(const GpModel& model, const Grid& grid) {
  return model.covariance(grid.points());
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, double jitter,
                           SeededRng& rng) {
  const Eigen::Index n = mean.size();
  if (cov.rows() != n || cov.cols() != n) throw std::invalid_argument("sample_mvn: shape mismatch");
  if (cov.isZero(0.0)) return mean;

  Eigen::MatrixXd reg = cov;
  reg.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(reg);
  if (llt.info() != Eigen::Success) {
    throw FactorizationFailure("posterior covariance is not positive definite after jitter");
  }
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  return mean + llt.matrixL() * z;
}

Eigen::VectorXd sample_posterior(const GpModel& model, const Grid& grid, SeededRng& rng) {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  model.predict(grid.points(), mean, var);
  return sample_mvn(mean, posterior_covariance(model, grid), model.config().jitter, rng);
}

Eigen::VectorXd second_difference(const Eigen::VectorXd& values, double spacing) {
  const Eigen::Index n = values.size();
  if (n < 3) throw GridTooSmall("second difference needs at least 3 grid points, got " + std::to_string(n));
  const double inv_h2 = 1.0 / (spacing * spacing);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    out[i] = (values[i - 1] - 2.0 * values[i] + values[i + 1]) * inv_h2;
  }
  out[0] = out[1];
  out[n - 1] = out[n - 2];
  return out;
}

Eigen::VectorXd posterior_second_derivative(const GpModel& model, const Grid& grid) {
  if (grid.size() < 3) throw GridTooSmall("posterior_second_derivative needs at least 3 grid points");
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  model.predict(grid.points(), mean, var);
  return second_difference(mean, grid.spacing());
}

}  // namespace efebo
