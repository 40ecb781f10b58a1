#include "efebo/acquisition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "efebo/errors.hpp"

namespace efebo {

namespace {

constexpr double kVarianceFloor = 1e-12;

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

void EfePreference::validate() const {
  if (!(tau_sq_min > 0.0) || !(tau_sq_max >= tau_sq_min) || !std::isfinite(tau_sq_max)) {
    throw std::invalid_argument("EfePreference: need 0 < tau_sq_min <= tau_sq_max");
  }
  if (mode == TauMode::Fixed && (!(tau_sq_fixed > 0.0) || !std::isfinite(tau_sq_fixed))) {
    throw std::invalid_argument("EfePreference: fixed tau_sq must be positive");
  }
}

std::string_view to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::EFE: return "EFE";
    case AcquisitionKind::UCB: return "UCB";
    case AcquisitionKind::EI: return "EI";
    case AcquisitionKind::PI: return "PI";
    case AcquisitionKind::VAR: return "VAR";
    case AcquisitionKind::TS: return "TS";
    case AcquisitionKind::KG: return "KG";
  }
  return "?";
}

AcquisitionKind parse_acquisition_kind(std::string_view name) {
  const std::string key = upper(name);
  for (auto kind : {AcquisitionKind::EFE, AcquisitionKind::UCB, AcquisitionKind::EI, AcquisitionKind::PI,
                    AcquisitionKind::VAR, AcquisitionKind::TS, AcquisitionKind::KG}) {
    if (key == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown acquisition kind '" + std::string(name) + "'");
}

std::string AcquisitionSpec::name() const {
  if (!label.empty()) return label;
  if (kind == AcquisitionKind::EFE && efe && efe->mode == TauMode::Fixed) return "EFE-fixed";
  return std::string(to_string(kind));
}

void AcquisitionSpec::validate() const {
  if (kind == AcquisitionKind::EFE) {
    if (!efe) throw std::invalid_argument("AcquisitionSpec: EFE requires a preference");
    efe->validate();
  } else if (efe) {
    throw std::invalid_argument("AcquisitionSpec: preference given for non-EFE method");
  }
  if (!(ucb_beta >= 0.0)) throw std::invalid_argument("AcquisitionSpec: beta must be >= 0");
  if (!(pi_xi >= 0.0)) throw std::invalid_argument("AcquisitionSpec: xi must be >= 0");
}

AcquisitionSpec AcquisitionSpec::ucb(double beta) {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::UCB;
  s.ucb_beta = beta;
  return s;
}

AcquisitionSpec AcquisitionSpec::ei() {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::EI;
  return s;
}

AcquisitionSpec AcquisitionSpec::pi(double xi) {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::PI;
  s.pi_xi = xi;
  return s;
}

AcquisitionSpec AcquisitionSpec::var() {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::VAR;
  return s;
}

AcquisitionSpec AcquisitionSpec::ts() {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::TS;
  return s;
}

AcquisitionSpec AcquisitionSpec::kg() {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::KG;
  return s;
}

AcquisitionSpec AcquisitionSpec::efe_adaptive(double tau_sq_min, double tau_sq_max) {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::EFE;
  EfePreference pref;
  pref.tau_sq_min = tau_sq_min;
  pref.tau_sq_max = tau_sq_max;
  pref.mode = TauMode::Adaptive;
  s.efe = pref;
  return s;
}

AcquisitionSpec AcquisitionSpec::efe_fixed(double tau_sq) {
  AcquisitionSpec s;
  s.kind = AcquisitionKind::EFE;
  EfePreference pref;
  pref.tau_sq_min = tau_sq;
  pref.tau_sq_max = tau_sq;
  pref.tau_sq_fixed = tau_sq;
  pref.mode = TauMode::Fixed;
  s.efe = pref;
  return s;
}

ScoreVector make_scores(Eigen::VectorXd scores) {
  if (scores.size() == 0) throw std::invalid_argument("make_scores: empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw NonFiniteScore("acquisition score at grid index " + std::to_string(i) + " is not finite");
    }
    if (scores[i] > scores[best]) best = i;
  }
  return ScoreVector{std::move(scores), best};
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double pragmatic_value(double mu, double var_predictive, double y_star, double tau_sq) {
  const double d = mu - y_star;
  return (d * d + var_predictive) / (2.0 * tau_sq);
}

double epistemic_value(double var_latent, double noise_var) {
  if (noise_var == 0.0) throw NoiseVarZero("epistemic value is undefined for zero noise variance");
  return 0.5 * std::log1p(std::max(var_latent, 0.0) / noise_var);
}

Eigen::VectorXd adaptive_tau_sq(const Posterior& post, const EfePreference& pref) {
  const Eigen::Index n = post.var_latent.size();
  if (post.mu_dd.size() != n) {
    throw GridTooSmall("adaptive tau^2 needs the posterior second derivative on every grid point");
  }
  Eigen::VectorXd raw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = std::max(post.var_latent[i], kVarianceFloor);
    raw[i] = 1.0 / (std::abs(post.mu_dd[i]) + 1.0 / var);
  }
  const double peak = raw.maxCoeff();
  if (!(peak > 0.0)) return Eigen::VectorXd::Constant(n, pref.tau_sq_max);
  return (pref.tau_sq_min + (pref.tau_sq_max - pref.tau_sq_min) * (raw.array() / peak)).matrix();
}

Eigen::VectorXd efe_tau_sq(const Posterior& post, const EfePreference& pref) {
  if (pref.mode == TauMode::Fixed) return Eigen::VectorXd::Constant(post.mu.size(), pref.tau_sq_fixed);
  return adaptive_tau_sq(post, pref);
}

ScoreVector efe_scores(const Posterior& post, const EfePreference& pref, double noise_var) {
  pref.validate();
  const Eigen::VectorXd tau_sq = efe_tau_sq(post, pref);
  Eigen::VectorXd s(post.mu.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double g = pragmatic_value(post.mu[i], post.var_predictive[i], pref.y_star, tau_sq[i]) -
                     epistemic_value(post.var_latent[i], noise_var);
    s[i] = -g;
  }
  return make_scores(std::move(s));
}

ScoreVector ucb_scores(const Posterior& post, double beta) {
  Eigen::VectorXd s = post.mu.array() + beta * post.var_latent.array().max(0.0).sqrt();
  return make_scores(std::move(s));
}

ScoreVector ei_scores(const Posterior& post, double incumbent) {
  Eigen::VectorXd s(post.mu.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sigma = std::sqrt(std::max(post.var_latent[i], 0.0));
    const double diff = post.mu[i] - incumbent;
    if (sigma == 0.0) {
      s[i] = std::max(diff, 0.0);
      continue;
    }
    const double z = diff / sigma;
    s[i] = diff * normal_cdf(z) + sigma * normal_pdf(z);
  }
  return make_scores(std::move(s));
}

ScoreVector pi_scores(const Posterior& post, double incumbent, double xi) {
  Eigen::VectorXd s(post.mu.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sigma = std::sqrt(std::max(post.var_latent[i], 0.0));
    const double diff = post.mu[i] - incumbent - xi;
    s[i] = sigma == 0.0 ? (diff > 0.0 ? 1.0 : 0.0) : normal_cdf(diff / sigma);
  }
  return make_scores(std::move(s));
}

ScoreVector var_scores(const Posterior& post) {
  Eigen::VectorXd s = post.var_latent.array().max(0.0).sqrt();
  return make_scores(std::move(s));
}

ScoreVector ts_scores(const GpModel& model, const Grid& grid, SeededRng& rng) {
  return make_scores(sample_posterior(model, grid, rng));
}

double expected_max_gain(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size();
  if (n != b.size()) throw std::invalid_argument("expected_max_gain: size mismatch");
  if (n <= 1) return 0.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return b[i] < b[j] || (b[i] == b[j] && a[i] < a[j]);
  });

  // Upper envelope of a + b z; breakpoint[k] is where line k overtakes line k-1.
  std::vector<double> env_a;
  std::vector<double> env_b;
  std::vector<double> breakpoint;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const double ai = a[order[idx]];
    const double bi = b[order[idx]];
    // Equal slopes: the later one has the larger intercept.
    if (!env_b.empty() && env_b.back() == bi) {
      env_a.pop_back();
      env_b.pop_back();
      breakpoint.pop_back();
    }
    double c = -std::numeric_limits<double>::infinity();
    while (!env_a.empty()) {
      c = (env_a.back() - ai) / (bi - env_b.back());
      if (env_a.size() > 1 && c <= breakpoint.back()) {
        env_a.pop_back();
        env_b.pop_back();
        breakpoint.pop_back();
        continue;
      }
      break;
    }
    if (env_a.empty()) c = -std::numeric_limits<double>::infinity();
    env_a.push_back(ai);
    env_b.push_back(bi);
    breakpoint.push_back(c);
  }

  double gain = 0.0;
  for (std::size_t k = 1; k < env_a.size(); ++k) {
    const double z = -std::abs(breakpoint[k]);
    const double f = z * normal_cdf(z) + normal_pdf(z);
    gain += (env_b[k] - env_b[k - 1]) * std::max(f, 0.0);
  }
  return gain;
}

ScoreVector kg_scores(const Posterior& post, const Eigen::MatrixXd& covariance, double noise_var) {
  const Eigen::Index n = post.mu.size();
  if (covariance.rows() != n || covariance.cols() != n) {
    throw std::invalid_argument("kg_scores: covariance does not match the posterior grid");
  }
  Eigen::VectorXd s(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double denom_sq = std::max(covariance(j, j), 0.0) + noise_var;
    if (!(denom_sq > 0.0)) {
      s[j] = 0.0;
      continue;
    }
    const Eigen::VectorXd slope = covariance.col(j) / std::sqrt(denom_sq);
    s[j] = expected_max_gain(post.mu, slope);
  }
  return make_scores(std::move(s));
}

AcquisitionResult evaluate_acquisition(const AcquisitionSpec& spec, const AcquisitionContext& ctx) {
  if (ctx.model == nullptr || ctx.grid == nullptr || ctx.posterior == nullptr) {
    throw std::invalid_argument("evaluate_acquisition: incomplete context");
  }
  const Posterior& post = *ctx.posterior;
  const double noise_var = ctx.model->config().noise_variance;
  AcquisitionResult result;
  switch (spec.kind) {
    case AcquisitionKind::EFE: {
      EfePreference pref = spec.efe.value();
      pref.y_star = post.mu.maxCoeff();
      result.tau_sq = efe_tau_sq(post, pref);
      result.scores = efe_scores(post, pref, noise_var);
      break;
    }
    case AcquisitionKind::UCB: result.scores = ucb_scores(post, spec.ucb_beta); break;
    case AcquisitionKind::EI: result.scores = ei_scores(post, ctx.incumbent); break;
    case AcquisitionKind::PI: result.scores = pi_scores(post, ctx.incumbent, spec.pi_xi); break;
    case AcquisitionKind::VAR: result.scores = var_scores(post); break;
    case AcquisitionKind::TS:
      if (ctx.rng == nullptr) throw std::invalid_argument("Thompson sampling needs an RNG");
      result.scores = ts_scores(*ctx.model, *ctx.grid, *ctx.rng);
      break;
    case AcquisitionKind::KG:
      result.scores = kg_scores(post, posterior_covariance(*ctx.model, *ctx.grid), noise_var);
      break;
  }
  return result;
}

}  // namespace efebo
