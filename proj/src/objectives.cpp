#include "efebo/objectives.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "efebo/errors.hpp"

namespace efebo {

double SinusoidObjective::operator()(double x) const {
  if (!(x >= kLower && x <= kUpper)) {
    throw DomainViolation("sinusoid objective evaluated outside [-8, 8] at x = " + std::to_string(x));
  }
  double sum = 0.0;
  for (const auto& c : components) {
    const double arg = c.frequency * x + c.phase;
    sum += c.amplitude * (c.cosine ? std::cos(arg) : std::sin(arg));
  }
  return sum;
}

double SinusoidObjective::amplitude_bound() const {
  double total = 0.0;
  for (const auto& c : components) total += std::abs(c.amplitude);
  return total;
}

SinusoidObjective generate_sinusoid(std::uint64_t seed) {
  SeededRng rng(seed);
  SinusoidObjective obj;
  obj.seed = seed;
  obj.components.reserve(SinusoidObjective::kComponents);
  for (int j = 0; j < SinusoidObjective::kComponents; ++j) {
    SinusoidComponent c;
    c.amplitude = rng.uniform(0.2, 1.0);
    c.frequency = rng.uniform(0.2, 1.5);
    c.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    c.cosine = rng.bernoulli(0.5);
    obj.components.push_back(c);
  }
  return obj;
}

double evaluate_objective(const SinusoidObjective& obj, double x) { return obj(x); }

void VdpConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("VdpConfig: dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("VdpConfig: t_end must be positive");
  if (!(window_start >= 0.0 && window_start <= window_end && window_end <= t_end)) {
    throw std::invalid_argument("VdpConfig: window must lie inside [0, t_end]");
  }
  if (!(obs_noise_std >= 0.0)) throw std::invalid_argument("VdpConfig: obs_noise_std must be >= 0");
  if (!(kappa_upper > kappa_lower) || kappa_points < 3) {
    throw std::invalid_argument("VdpConfig: invalid kappa search domain");
  }
}

std::size_t VdpConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

namespace {

using State = std::array<double, 2>;

State vdp_rhs(double kappa, const State& s) {
  return {s[1], kappa * (1.0 - s[0] * s[0]) * s[1] - s[0]};
}

State axpy(const State& s, double h, const State& k) { return {s[0] + h * k[0], s[1] + h * k[1]}; }

}  // namespace

std::vector<double> simulate_vdp(double kappa, const VdpConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(kappa)) throw std::invalid_argument("simulate_vdp: kappa must be finite");
  const std::size_t n = cfg.steps();
  const double h = cfg.dt;
  std::vector<double> xs;
  xs.reserve(n + 1);
  State s{cfg.x0, cfg.v0};
  xs.push_back(s[0]);
  for (std::size_t i = 0; i < n; ++i) {
    const State k1 = vdp_rhs(kappa, s);
    const State k2 = vdp_rhs(kappa, axpy(s, 0.5 * h, k1));
    const State k3 = vdp_rhs(kappa, axpy(s, 0.5 * h, k2));
    const State k4 = vdp_rhs(kappa, axpy(s, h, k3));
    s[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    s[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    if (!(std::abs(s[0]) <= 1e6 && std::abs(s[1]) <= 1e6)) {
      throw NumericalBlowup("Van der Pol state diverged at kappa = " + std::to_string(kappa));
    }
    xs.push_back(s[0]);
  }
  return xs;
}

std::vector<double> vdp_reference(const VdpConfig& cfg) {
  std::vector<double> ref = simulate_vdp(cfg.kappa_true, cfg);
  SeededRng rng(cfg.seed);
  for (double& x : ref) x += cfg.obs_noise_std * rng.normal();
  return ref;
}

double vdp_objective(double kappa, const std::vector<double>& reference, const VdpConfig& cfg) {
  const std::vector<double> traj = simulate_vdp(kappa, cfg);
  if (reference.size() != traj.size()) {
    throw std::invalid_argument("vdp_objective: reference length does not match the simulation");
  }
  const auto first = static_cast<std::size_t>(std::ceil(cfg.window_start / cfg.dt - 1e-9));
  const auto last = std::min(traj.size() - 1, static_cast<std::size_t>(std::floor(cfg.window_end / cfg.dt + 1e-9)));
  double sum = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double d = traj[i] - reference[i];
    sum += d * d;
  }
  return -sum / static_cast<double>(last - first + 1);
}

ObservationChannel::ObservationChannel(double noise_std, std::uint64_t seed) : noise_std_(noise_std), rng_(seed) {
  if (!(noise_std >= 0.0)) throw std::invalid_argument("ObservationChannel: noise_std must be >= 0");
}

double ObservationChannel::observe(double f_value) {
  if (noise_std_ == 0.0) return f_value;
  return f_value + noise_std_ * rng_.normal();
}

}  // namespace efebo
