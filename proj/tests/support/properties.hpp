#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "efebo/gp.hpp"
#include "efebo/rng.hpp"

// Randomized property harnesses shared by the unit tests and the acceptance
// runner. Each returns the number of cases checked and the violations found.
namespace efebo::testing {

struct PropertyResult {
  std::size_t cases = 0;
  std::size_t violations = 0;
  /// First violation, for diagnostics.
  std::string first_failure;

  bool ok() const { return cases > 0 && violations == 0; }
  void fail(const std::string& what);
};

/// Random dataset of 0..max_points observations on [lower, upper].
Dataset random_dataset(SeededRng& rng, double lower, double upper, std::size_t max_points);

/// Random GP configuration with moderate hyperparameters.
GpConfig random_gp_config(SeededRng& rng);

/// Posterior of a random GP fit on a random grid.
Posterior random_gp_posterior(SeededRng& rng, double* noise_var = nullptr);

/// Synthetic posterior with independent random mu, var_latent and mu_dd.
Posterior random_synthetic_posterior(SeededRng& rng, std::size_t n, double noise_var);

// Adaptive tau^2: range, monotonicity in |mu''| and sigma^2, tau_max at the
// argmax of the raw 1 / (|mu''| + 1 / sigma^2).
PropertyResult check_tau_range(std::size_t cases, std::uint64_t seed);
PropertyResult check_tau_monotonicity(std::size_t cases, std::uint64_t seed);
PropertyResult check_tau_max_attained(std::size_t cases, std::uint64_t seed);

// Fixed tau^2 = 1e9 against VAR, tau^2 = 1e-9 against the pragmatic argmin.
PropertyResult check_exploration_limit(std::size_t cases, std::uint64_t seed);
PropertyResult check_exploitation_limit(std::size_t cases, std::uint64_t seed);

// GP core.
PropertyResult check_variance_shrinkage(std::size_t cases, std::uint64_t seed);
PropertyResult check_prior_variance_bound(std::size_t cases, std::uint64_t seed);
PropertyResult check_scalar_kalman(std::size_t cases, std::uint64_t seed);
PropertyResult check_quadratic_second_difference(std::size_t cases, std::uint64_t seed);

}  // namespace efebo::testing
