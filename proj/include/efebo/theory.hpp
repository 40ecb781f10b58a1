#pragma once

#include <cstddef>
#include <optional>

#include "efebo/rng.hpp"

// Numerical counterparts of the EFE reduction and convergence results: the
// linear surrogates of EFE, the information-gain identity, the Kalman
// variance identity, and the local quadratic model behind the bias h_EFE.
namespace efebo::theory {

struct LinearizationPoint {
  double mu0 = 0.0;
  double sigma0 = 1.0;
  double y_star = 1.0;
  double tau_sq = 1.0;
  double noise_var = 0.0;

  void validate() const;
};

struct LinearCoeffs {
  /// dJ/dmu at the reference.
  double a = 0.0;
  /// dJ/dsigma at the reference.
  double b = 0.0;
  double beta = 0.0;
};

/// Pragmatic-only objective ((mu - y*)^2 + sigma^2 + noise) / (2 tau^2).
double pragmatic_objective(const LinearizationPoint& pt, double mu, double sigma);
/// Full compact EFE in (mu, sigma): pragmatic minus 0.5 ln(1 + sigma^2 / noise).
double full_objective(const LinearizationPoint& pt, double mu, double sigma);

/// Recovers LCB: beta = b / |a|. Throws SignConditionViolated unless y* > mu0.
LinearCoeffs lcb_linearization(const LinearizationPoint& pt);

/// Recovers UCB: beta = (-b) / (-a). Throws SignConditionViolated unless
/// mu0 < y* and noise + sigma0^2 <= tau^2 (equality gives beta = 0).
LinearCoeffs ucb_linearization(const LinearizationPoint& pt);

struct IdentityPair {
  double analytic = 0.0;
  double monte_carlo = 0.0;
};

/// E[(mu+ - mu)^2] = sigma^4 / (sigma^2 + noise), analytic vs sampled.
IdentityPair kalman_identity_check(double var_latent, double noise_var, std::size_t n_samples, SeededRng& rng);

/// Sampled E_y[KL(N(mu+, var+) || N(mu, var))] against 0.5 ln(1 + var/noise).
IdentityPair expected_kl_check(double var_latent, double noise_var, std::size_t n_samples, SeededRng& rng);

/// Sampled E_y[-ln p(y)] - 0.5 ln(2 pi tau^2) against the pragmatic closed form.
IdentityPair pragmatic_cross_entropy_check(double mu, double var_predictive, double y_star, double tau_sq,
                                           std::size_t n_samples, SeededRng& rng);

struct EigPair {
  double epistemic = 0.0;
  double mutual_information = 0.0;
};

/// Epistemic value against H(f) - H(f | y). Requires var_latent > 0, noise_var > 0.
EigPair eig_identity_check(double var_latent, double noise_var);

/// Local second-order description of the posterior around the true maximizer.
struct LocalExpansion {
  double m = 1.0;
  double v0 = 1.0;
  double g = 0.0;
  double v2 = 0.0;
  double noise_var = 0.0;
  double tau_sq = 1.0;

  double S() const noexcept { return v0 + noise_var; }
  double Delta() const noexcept { return 1.0 / tau_sq - 1.0 / S(); }
  void validate() const;
};

struct QuadraticCoeffs {
  double L_tilde = 0.0;
  double Q_tilde = 0.0;
};

QuadraticCoeffs quadratic_model_coeffs(const LocalExpansion& e);

/// Offset of the EFE maximizer from x*: -g Delta / (v2 Delta + g^2 / S^2),
/// the stationary point of the quadratic model. Throws DegenerateQuadratic
/// when |v2 Delta + g^2 / S^2| < 1e-14.
double efe_bias(const LocalExpansion& e);

/// Maximization-form EFE at offset h with the expansion's mean and variance
/// curves taken as exact (no truncation of the log term).
double efe_local_objective(const LocalExpansion& e, double h);

}  // namespace efebo::theory
