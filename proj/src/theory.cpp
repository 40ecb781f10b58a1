#include "efebo/theory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "efebo/acquisition.hpp"
#include "efebo/errors.hpp"

namespace efebo::theory {

void LinearizationPoint::validate() const {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("LinearizationPoint: sigma0 must be positive");
  if (!(tau_sq > 0.0)) throw std::invalid_argument("LinearizationPoint: tau_sq must be positive");
  if (!(noise_var >= 0.0)) throw std::invalid_argument("LinearizationPoint: noise_var must be non-negative");
}

double pragmatic_objective(const LinearizationPoint& pt, double mu, double sigma) {
  return pragmatic_value(mu, sigma * sigma + pt.noise_var, pt.y_star, pt.tau_sq);
}

double full_objective(const LinearizationPoint& pt, double mu, double sigma) {
  return pragmatic_objective(pt, mu, sigma) - epistemic_value(sigma * sigma, pt.noise_var);
}

LinearCoeffs lcb_linearization(const LinearizationPoint& pt) {
  pt.validate();
  LinearCoeffs c;
  c.a = (pt.mu0 - pt.y_star) / pt.tau_sq;
  c.b = pt.sigma0 / pt.tau_sq;
  if (!(pt.y_star > pt.mu0)) {
    throw SignConditionViolated("LCB linearization requires y* > mu0");
  }
  c.beta = c.b / std::abs(c.a);
  return c;
}

LinearCoeffs ucb_linearization(const LinearizationPoint& pt) {
  pt.validate();
  const double s = pt.noise_var + pt.sigma0 * pt.sigma0;
  LinearCoeffs c;
  c.a = (pt.mu0 - pt.y_star) / pt.tau_sq;
  c.b = pt.sigma0 * (1.0 / pt.tau_sq - 1.0 / s);
  if (!(pt.mu0 < pt.y_star)) {
    throw SignConditionViolated("UCB linearization requires mu0 < y*");
  }
  if (!(s <= pt.tau_sq)) {
    throw SignConditionViolated("UCB linearization requires noise + sigma0^2 <= tau^2");
  }
  c.beta = (-c.b) / (-c.a);
  return c;
}

IdentityPair kalman_identity_check(double var_latent, double noise_var, std::size_t n_samples, SeededRng& rng) {
  if (var_latent < 0.0 || !(noise_var > 0.0)) {
    throw std::invalid_argument("kalman_identity_check: need var_latent >= 0 and noise_var > 0");
  }
  const double s = var_latent + noise_var;
  const double gain = var_latent / s;
  const double sd = std::sqrt(s);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double shift = gain * sd * rng.normal();
    sum += shift * shift;
  }
  return {var_latent * var_latent / s, n_samples == 0 ? 0.0 : sum / static_cast<double>(n_samples)};
}

IdentityPair expected_kl_check(double var_latent, double noise_var, std::size_t n_samples, SeededRng& rng) {
  if (!(var_latent > 0.0) || !(noise_var > 0.0)) {
    throw std::invalid_argument("expected_kl_check: need positive variances");
  }
  const double s = var_latent + noise_var;
  const double gain = var_latent / s;
  const double var_post = var_latent * noise_var / s;
  const double sd = std::sqrt(s);
  const double constant = var_post / var_latent - 1.0 + std::log(var_latent / var_post);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double shift = gain * sd * rng.normal();
    sum += 0.5 * (constant + shift * shift / var_latent);
  }
  return {epistemic_value(var_latent, noise_var), n_samples == 0 ? 0.0 : sum / static_cast<double>(n_samples)};
}

IdentityPair pragmatic_cross_entropy_check(double mu, double var_predictive, double y_star, double tau_sq,
                                           std::size_t n_samples, SeededRng& rng) {
  if (!(tau_sq > 0.0) || var_predictive < 0.0) {
    throw std::invalid_argument("pragmatic_cross_entropy_check: need tau_sq > 0 and var_predictive >= 0");
  }
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * tau_sq);
  const double sd = std::sqrt(var_predictive);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double y = mu + sd * rng.normal();
    const double neg_log_p = (y - y_star) * (y - y_star) / (2.0 * tau_sq) + log_norm;
    sum += neg_log_p - log_norm;
  }
  return {pragmatic_value(mu, var_predictive, y_star, tau_sq),
          n_samples == 0 ? 0.0 : sum / static_cast<double>(n_samples)};
}

EigPair eig_identity_check(double var_latent, double noise_var) {
  if (!(var_latent > 0.0) || !(noise_var > 0.0)) {
    throw std::invalid_argument("eig_identity_check: need positive variances");
  }
  const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
  const double h_prior = 0.5 * std::log(two_pi_e * var_latent);
  const double h_post = 0.5 * std::log(two_pi_e * var_latent * noise_var / (var_latent + noise_var));
  return {epistemic_value(var_latent, noise_var), h_prior - h_post};
}

void LocalExpansion::validate() const {
  if (!(v0 > 0.0)) throw std::invalid_argument("LocalExpansion: v0 must be positive");
  if (!(noise_var >= 0.0)) throw std::invalid_argument("LocalExpansion: noise_var must be non-negative");
  if (!(tau_sq > 0.0)) throw std::invalid_argument("LocalExpansion: tau_sq must be positive");
}

QuadraticCoeffs quadratic_model_coeffs(const LocalExpansion& e) {
  e.validate();
  const double s = e.S();
  const double delta = e.Delta();
  return {-0.5 * e.g * delta, -0.25 * e.v2 * delta - e.g * e.g / (4.0 * s * s)};
}

double efe_bias(const LocalExpansion& e) {
  e.validate();
  const double s = e.S();
  const double delta = e.Delta();
  const double denom = e.v2 * delta + e.g * e.g / (s * s);
  if (std::abs(denom) < 1e-14) {
    throw DegenerateQuadratic("local quadratic model has no isolated stationary point");
  }
  // Stationary point of C + L h + Q h^2, i.e. -L / (2Q).
  return -e.g * delta / denom;
}

double efe_local_objective(const LocalExpansion& e, double h) {
  e.validate();
  const double mean_gap = 0.5 * e.m * h * h;
  const double var = e.v0 + e.g * h + 0.5 * e.v2 * h * h;
  return -(pragmatic_value(mean_gap, var + e.noise_var, 0.0, e.tau_sq) - epistemic_value(var, e.noise_var));
}

}  // namespace efebo::theory
