#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "efebo/gp.hpp"
#include "efebo/rng.hpp"

namespace efebo {

struct SinusoidComponent {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  bool cosine = false;
};

/// Random 1-D test function: a sum of ten sine/cosine terms on [-8, 8].
struct SinusoidObjective {
  static constexpr int kComponents = 10;
  static constexpr double kLower = -8.0;
  static constexpr double kUpper = 8.0;

  std::vector<SinusoidComponent> components;
  std::uint64_t seed = 0;

  /// Throws DomainViolation outside [-8, 8].
  double operator()(double x) const;
  /// Sum of amplitudes, an upper bound on |f|.
  double amplitude_bound() const;
};

/// a ~ U[0.2, 1], w ~ U[0.2, 1.5], p ~ U[0, 2 pi), sin or cos with prob 1/2.
SinusoidObjective generate_sinusoid(std::uint64_t seed);

double evaluate_objective(const SinusoidObjective& obj, double x);

/// Van der Pol identification setup: x'' - kappa (1 - x^2) x' + x = 0.
struct VdpConfig {
  double kappa_true = 3.0;
  double x0 = 0.5;
  double v0 = 0.0;
  double dt = 0.05;
  double t_end = 60.0;
  double window_start = 20.0;
  double window_end = 60.0;
  double obs_noise_std = 0.1;
  double kappa_lower = 0.5;
  double kappa_upper = 5.0;
  std::size_t kappa_points = 400;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t steps() const;
};

/// x(t) sampled at t = 0, dt, ..., t_end with fixed-step RK4.
/// Throws NumericalBlowup if |x| or |x'| exceeds 1e6.
std::vector<double> simulate_vdp(double kappa, const VdpConfig& cfg);

/// Trajectory at kappa_true plus i.i.d. N(0, obs_noise_std^2) noise, drawn
/// from the config seed.
std::vector<double> vdp_reference(const VdpConfig& cfg);

/// Negative mean squared error over samples in [window_start, window_end].
double vdp_objective(double kappa, const std::vector<double>& reference, const VdpConfig& cfg);

/// Additive Gaussian observation noise with its own RNG stream.
class ObservationChannel {
 public:
  ObservationChannel(double noise_std, std::uint64_t seed);

  double observe(double f_value);
  double noise_std() const noexcept { return noise_std_; }

 private:
  double noise_std_;
  SeededRng rng_;
};

/// Evaluates any callable objective on every grid point.
template <typename F>
Eigen::VectorXd tabulate(const F& f, const Grid& grid) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out[static_cast<Eigen::Index>(i)] = f(grid[i]);
  return out;
}

}  // namespace efebo
