#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>

#include "efebo/gp.hpp"
#include "efebo/rng.hpp"

namespace efebo {

enum class TauMode { Adaptive, Fixed };

/// Gaussian outcome preference N(y_star, tau^2) used by EFE.
struct EfePreference {
  double y_star = 0.0;
  double tau_sq_min = 1.0;
  double tau_sq_max = 30.0;
  TauMode mode = TauMode::Adaptive;
  /// Only read in fixed mode.
  double tau_sq_fixed = 1.0;

  void validate() const;
};

enum class AcquisitionKind { EFE, UCB, EI, PI, VAR, TS, KG };

std::string_view to_string(AcquisitionKind kind);
/// Case-insensitive. Throws std::invalid_argument on an unknown name.
AcquisitionKind parse_acquisition_kind(std::string_view name);

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::EFE;
  double ucb_beta = 2.0;
  double pi_xi = 0.01;
  std::optional<EfePreference> efe;
  /// Display name; empty means derive from kind (and EFE mode).
  std::string label;

  std::string name() const;
  void validate() const;

  static AcquisitionSpec ucb(double beta);
  static AcquisitionSpec ei();
  static AcquisitionSpec pi(double xi);
  static AcquisitionSpec var();
  static AcquisitionSpec ts();
  static AcquisitionSpec kg();
  static AcquisitionSpec efe_adaptive(double tau_sq_min, double tau_sq_max);
  static AcquisitionSpec efe_fixed(double tau_sq);
};

/// Per-grid-point scores, higher is better.
struct ScoreVector {
  Eigen::VectorXd scores;
  /// Smallest index attaining the maximum.
  Eigen::Index argmax_index = 0;
};

/// Validates finiteness and computes the tie-broken argmax. Throws
/// NonFiniteScore if any entry is NaN or infinite.
ScoreVector make_scores(Eigen::VectorXd scores);

/// Expected negative log preference with the 0.5 ln(2 pi tau^2) constant dropped.
double pragmatic_value(double mu, double var_predictive, double y_star, double tau_sq);

/// Expected KL between the local posterior and prior at a point,
/// 0.5 ln(1 + var / noise). Throws NoiseVarZero when noise_var == 0.
double epistemic_value(double var_latent, double noise_var);

/// Curvature-aware preference variance per grid point, rescaled into
/// [tau_sq_min, tau_sq_max].
Eigen::VectorXd adaptive_tau_sq(const Posterior& post, const EfePreference& pref);

/// tau^2 per grid point for either mode.
Eigen::VectorXd efe_tau_sq(const Posterior& post, const EfePreference& pref);

/// Negated expected free energy. The argmax is the minimizer of G.
ScoreVector efe_scores(const Posterior& post, const EfePreference& pref, double noise_var);

ScoreVector ucb_scores(const Posterior& post, double beta);
ScoreVector ei_scores(const Posterior& post, double incumbent);
ScoreVector pi_scores(const Posterior& post, double incumbent, double xi);
ScoreVector var_scores(const Posterior& post);
ScoreVector ts_scores(const GpModel& model, const Grid& grid, SeededRng& rng);

/// Exact one-step knowledge gradient over a discrete grid. `covariance` is the
/// posterior covariance over the same grid points as `post`.
ScoreVector kg_scores(const Posterior& post, const Eigen::MatrixXd& covariance, double noise_var);

/// E[max_i (a_i + b_i Z)] - max_i a_i for Z ~ N(0, 1), via the upper envelope
/// of the lines a_i + b_i z.
double expected_max_gain(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

double normal_pdf(double z);
double normal_cdf(double z);

/// Everything a dispatcher needs to score one iteration.
struct AcquisitionContext {
  const GpModel* model = nullptr;
  const Grid* grid = nullptr;
  const Posterior* posterior = nullptr;
  /// Best posterior mean among queried locations (EI/PI).
  double incumbent = 0.0;
  SeededRng* rng = nullptr;
};

struct AcquisitionResult {
  ScoreVector scores;
  /// Preference variance per grid point; only filled for EFE.
  Eigen::VectorXd tau_sq;
};

/// Scores the grid with the method described by spec. For EFE, y* is set to
/// the maximum posterior mean over the grid.
AcquisitionResult evaluate_acquisition(const AcquisitionSpec& spec, const AcquisitionContext& ctx);

}  // namespace efebo
