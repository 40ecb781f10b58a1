#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "efebo/acquisition.hpp"
#include "efebo/errors.hpp"
#include "support/properties.hpp"

using namespace efebo;

namespace {

Posterior make_post(std::vector<double> mu, std::vector<double> var, double noise) {
  Posterior p;
  p.mu = Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  p.var_latent = Eigen::Map<Eigen::VectorXd>(var.data(), static_cast<Eigen::Index>(var.size()));
  p.var_predictive = p.var_latent.array() + noise;
  if (mu.size() >= 3) p.mu_dd = Eigen::VectorXd::Zero(p.mu.size());
  return p;
}

EfePreference fixed(double tau_sq, double y_star) {
  EfePreference p;
  p.mode = TauMode::Fixed;
  p.tau_sq_fixed = tau_sq;
  p.y_star = y_star;
  return p;
}

// E[max_i (a_i + b_i Z)] - max a by Simpson's rule on [-12, 12].
double kg_quadrature(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const int n = 200000;
  const double lo = -12.0;
  const double hi = 12.0;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double z = lo + k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * (a + b * z).maxCoeff() * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  }
  return sum * h / 3.0 - a.maxCoeff();
}

}  // namespace

TEST_CASE("preference validation") {
  EfePreference p;
  CHECK_NOTHROW(p.validate());
  p.tau_sq_min = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = EfePreference{};
  p.tau_sq_min = 5.0;
  p.tau_sq_max = 4.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = fixed(0.0, 0.0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("method names") {
  CHECK(parse_acquisition_kind("efe") == AcquisitionKind::EFE);
  CHECK(parse_acquisition_kind("Kg") == AcquisitionKind::KG);
  CHECK_THROWS_AS(parse_acquisition_kind("LCB"), std::invalid_argument);
  CHECK(AcquisitionSpec::efe_adaptive(1.0, 30.0).name() == "EFE");
  CHECK(AcquisitionSpec::efe_fixed(2.0).name() == "EFE-fixed");
  CHECK(AcquisitionSpec::ucb(2.0).name() == "UCB");
  AcquisitionSpec labelled = AcquisitionSpec::ucb(3.0);
  labelled.label = "UCB3";
  CHECK(labelled.name() == "UCB3");
}

TEST_CASE("score vector") {
  CHECK(make_scores((Eigen::VectorXd(4) << 1.0, 3.0, 3.0, 2.0).finished()).argmax_index == 1);
  CHECK_THROWS_AS(make_scores((Eigen::VectorXd(2) << 1.0, std::nan("")).finished()), NonFiniteScore);
  CHECK_THROWS_AS(make_scores((Eigen::VectorXd(2) << 1.0, INFINITY).finished()), NonFiniteScore);
}

TEST_CASE("pragmatic value") {
  CHECK(pragmatic_value(2.0, 0.0, 2.0, 7.0) == 0.0);
  CHECK(pragmatic_value(1.0, 1.0, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(pragmatic_value(0.0, 1.0, 2.0, 2.0) == doctest::Approx(1.25));

  // Sampled cross-entropy against the closed form.
  SeededRng rng(17);
  const double mu = 0.0;
  const double var = 1.0;
  const double y_star = 2.0;
  const double tau_sq = 2.0;
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double y = mu + std::sqrt(var) * rng.normal();
    const double neg_log_p = (y - y_star) * (y - y_star) / (2.0 * tau_sq) + 0.5 * std::log(2.0 * std::numbers::pi * tau_sq);
    sum += neg_log_p;
  }
  const double mc = sum / n - 0.5 * std::log(2.0 * std::numbers::pi * tau_sq);
  CHECK(std::abs(mc - 1.25) < 5e-3);
}

TEST_CASE("epistemic value") {
  CHECK(epistemic_value(0.0, 1.0) == 0.0);
  CHECK(epistemic_value(0.7, 0.7) == doctest::Approx(0.3465736).epsilon(1e-7));
  CHECK(epistemic_value(3.0, 1.0) == doctest::Approx(0.6931472).epsilon(1e-7));
  CHECK_THROWS_AS(epistemic_value(1.0, 0.0), NoiseVarZero);

  // Sampled expected KL between the one-step posterior and the prior.
  SeededRng rng(23);
  const double s = 3.0;
  const double n = 1.0;
  const double post_var = s * n / (s + n);
  const int draws = 1000000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double y = std::sqrt(s + n) * rng.normal();
    const double m = s / (s + n) * y;
    sum += 0.5 * (post_var / s + m * m / s - 1.0 + std::log(s / post_var));
  }
  CHECK(std::abs(sum / draws - std::log(2.0)) < 5e-3);
}

TEST_CASE("adaptive preference variance") {
  EfePreference pref;
  pref.tau_sq_min = 1.0;
  pref.tau_sq_max = 30.0;

  SUBCASE("flat and constant gives tau max everywhere") {
    const Posterior p = make_post({0, 0, 0, 0, 0}, {0.3, 0.3, 0.3, 0.3, 0.3}, 0.04);
    const Eigen::VectorXd t = adaptive_tau_sq(p, pref);
    for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(30.0));
  }

  SUBCASE("two-point example") {
    Posterior p = make_post({0, 0}, {0.01, 1.0}, 0.04);
    p.mu_dd = (Eigen::VectorXd(2) << 10.0, 0.0).finished();
    const Eigen::VectorXd t = adaptive_tau_sq(p, pref);
    CHECK(t[0] == doctest::Approx(1.0 + 29.0 / 110.0).epsilon(1e-12));
    CHECK(t[0] == doctest::Approx(1.2636).epsilon(1e-4));
    CHECK(t[1] == doctest::Approx(30.0).epsilon(1e-12));
  }

  SUBCASE("zero variance is floored") {
    Posterior p = make_post({0, 0, 0}, {0.0, 0.0, 0.0}, 0.04);
    const Eigen::VectorXd t = adaptive_tau_sq(p, pref);
    CHECK(t.allFinite());
    CHECK(t[0] == doctest::Approx(30.0));
  }

  SUBCASE("missing second derivative") {
    Posterior p = make_post({0, 0}, {1, 1}, 0.04);
    CHECK_THROWS_AS(adaptive_tau_sq(p, pref), GridTooSmall);
  }

  SUBCASE("fixed mode ignores curvature") {
    const Posterior p = make_post({0, 1, 0}, {1, 0.1, 1}, 0.04);
    const Eigen::VectorXd t = efe_tau_sq(p, fixed(4.5, 0.0));
    CHECK(t == Eigen::VectorXd::Constant(3, 4.5));
  }
}

TEST_CASE("adaptive tau properties") {
  const auto range = testing::check_tau_range(1000, 201);
  INFO(range.first_failure);
  CHECK(range.ok());
  const auto mono = testing::check_tau_monotonicity(1000, 202);
  INFO(mono.first_failure);
  CHECK(mono.ok());
  const auto peak = testing::check_tau_max_attained(1000, 203);
  INFO(peak.first_failure);
  CHECK(peak.ok());
}

TEST_CASE("EFE scores") {
  SUBCASE("worked example") {
    const Posterior p = make_post({1.0}, {0.5}, 0.04);
    const ScoreVector s = efe_scores(p, fixed(2.0, 2.0), 0.04);
    const double g = (1.0 + 0.54) / 4.0 - 0.5 * std::log(1.0 + 12.5);
    CHECK(g == doctest::Approx(-0.9163448427).epsilon(1e-9));
    CHECK(s.scores[0] == doctest::Approx(-g).epsilon(1e-14));
  }

  SUBCASE("zero variance picks mu closest to y*") {
    const Posterior p = make_post({0.1, 1.9, 2.4, -1.0}, {0, 0, 0, 0}, 0.04);
    const ScoreVector s = efe_scores(p, fixed(3.0, 2.0), 0.04);
    CHECK(s.argmax_index == 1);
    CHECK(s.scores[2] == doctest::Approx(-(0.16 + 0.04) / 6.0));
  }

  SUBCASE("flat posterior ties to index zero") {
    const Posterior p = make_post({0, 0, 0, 0}, {0.2, 0.2, 0.2, 0.2}, 0.04);
    EfePreference pref;
    CHECK(efe_scores(p, pref, 0.04).argmax_index == 0);
  }

  SUBCASE("decomposes into pragmatic minus epistemic") {
    SeededRng rng(31);
    for (int t = 0; t < 200; ++t) {
      double noise = 0.0;
      const Posterior p = testing::random_gp_posterior(rng, &noise);
      EfePreference pref;
      pref.y_star = p.mu.maxCoeff();
      const Eigen::VectorXd tau = efe_tau_sq(p, pref);
      const ScoreVector s = efe_scores(p, pref, noise);
      for (Eigen::Index i = 0; i < s.scores.size(); ++i) {
        const double want = -(pragmatic_value(p.mu[i], p.var_predictive[i], pref.y_star, tau[i]) -
                              epistemic_value(p.var_latent[i], noise));
        CHECK(s.scores[i] == want);
      }
    }
  }

  SUBCASE("zero noise is rejected") {
    const Posterior p = make_post({0.0}, {1.0}, 0.0);
    CHECK_THROWS_AS(efe_scores(p, fixed(1.0, 0.0), 0.0), NoiseVarZero);
  }
}

TEST_CASE("EFE limits") {
  const auto explore = testing::check_exploration_limit(100, 301);
  INFO(explore.first_failure);
  CHECK(explore.ok());
  const auto exploit = testing::check_exploitation_limit(100, 302);
  INFO(exploit.first_failure);
  CHECK(exploit.ok());
}

TEST_CASE("UCB") {
  CHECK(ucb_scores(make_post({1.0}, {0.25}, 0.0), 2.0).scores[0] == doctest::Approx(2.0));
  CHECK(ucb_scores(make_post({0.1, 0.5, 0.2}, {3.0, 0.1, 0.0}, 0.0), 0.0).argmax_index == 1);
  CHECK(ucb_scores(make_post({0, 0, 0}, {0.1, 0.2, 0.9}, 0.0), 2.0).argmax_index == 2);
}

TEST_CASE("EI") {
  CHECK(ei_scores(make_post({0.5}, {0.0}, 0.0), 0.7).scores[0] == 0.0);
  CHECK(ei_scores(make_post({1.7}, {0.0}, 0.0), 0.7).scores[0] == doctest::Approx(1.0));
  const double at_zero = ei_scores(make_post({0.3}, {1.0}, 0.0), 0.3).scores[0];
  CHECK(at_zero == doctest::Approx(0.3989423).epsilon(1e-7));

  SeededRng rng(41);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += std::max(rng.normal(), 0.0);
  CHECK(std::abs(sum / n - at_zero) < 5e-3);

  // Off-centre value against a Monte Carlo estimate.
  const double mu = 0.2;
  const double sd = 0.7;
  const double inc = 0.5;
  const double ei = ei_scores(make_post({mu}, {sd * sd}, 0.0), inc).scores[0];
  sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::max(mu + sd * rng.normal() - inc, 0.0);
  CHECK(std::abs(sum / n - ei) < 2e-3);
}

TEST_CASE("PI") {
  CHECK(pi_scores(make_post({1.01}, {1.0}, 0.0), 1.0, 0.01).scores[0] == doctest::Approx(0.5));
  CHECK(pi_scores(make_post({0.5}, {0.0}, 0.0), 1.0, 0.01).scores[0] == 0.0);
  CHECK(pi_scores(make_post({1.5}, {0.0}, 0.0), 1.0, 0.01).scores[0] == 1.0);
  CHECK(pi_scores(make_post({1.51}, {0.25}, 0.0), 1.0, 0.01).scores[0] == doctest::Approx(0.8413447).epsilon(1e-7));
}

TEST_CASE("VAR") {
  GpConfig c;
  c.signal_variance = 2.0;
  const Grid g(-1.0, 1.0, 11);
  const ScoreVector prior = var_scores(posterior(fit(c, Dataset{}), g));
  CHECK(prior.argmax_index == 0);
  CHECK(prior.scores[5] == doctest::Approx(std::sqrt(2.0)));

  c.noise_variance = 1e-4;
  Dataset d;
  d.append(g[0], 0.0);
  CHECK(var_scores(posterior(fit(c, d), g)).argmax_index != 0);

  CHECK(var_scores(make_post({0, 0, 0}, {0.1, 0.9, 0.4}, 0.0)).argmax_index == 1);
}

TEST_CASE("Thompson sampling") {
  SUBCASE("deterministic per seed") {
    const GpConfig c;
    const Grid g(-2.0, 2.0, 30);
    const GpModel m = fit(c, Dataset{});
    SeededRng a(5);
    SeededRng b(5);
    CHECK(ts_scores(m, g, a).argmax_index == ts_scores(m, g, b).argmax_index);
  }

  SUBCASE("noiseless data on every grid point picks the mean argmax") {
    GpConfig c;
    c.noise_variance = 0.0;
    c.jitter = 1e-12;
    c.lengthscale = 1.0;
    const Grid g(0.0, 2.0, 5);
    Dataset d;
    const std::vector<double> ys{0.1, 0.4, 0.9, 0.3, 0.2};
    for (std::size_t i = 0; i < 5; ++i) d.append(g[i], ys[i]);
    SeededRng rng(9);
    CHECK(ts_scores(fit(c, d), g, rng).argmax_index == 2);
  }

  SUBCASE("uniform selection on independent points") {
    GpConfig c;
    c.lengthscale = 0.01;
    const Grid g(0.0, 9.0, 10);
    const GpModel m = fit(c, Dataset{});
    std::vector<int> counts(10, 0);
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
      SeededRng rng(static_cast<std::uint64_t>(s) + 1000);
      ++counts[static_cast<std::size_t>(ts_scores(m, g, rng).argmax_index)];
    }
    double chi2 = 0.0;
    for (int k : counts) chi2 += (k - n / 10.0) * (k - n / 10.0) / (n / 10.0);
    // 9 degrees of freedom, 0.001 upper quantile.
    CHECK(chi2 < 27.877);
  }
}

TEST_CASE("knowledge gradient") {
  SUBCASE("two independent points") {
    const Posterior p = make_post({0.0, 0.0}, {1.0, 0.0}, 1.0);
    const Eigen::MatrixXd cov = (Eigen::MatrixXd(2, 2) << 1.0, 0.0, 0.0, 0.0).finished();
    const ScoreVector s = kg_scores(p, cov, 1.0);
    CHECK(s.scores[0] == doctest::Approx(0.5 * std::sqrt(2.0 / (2.0 * std::numbers::pi))).epsilon(1e-10));
    CHECK(s.scores[0] == doctest::Approx(0.28209).epsilon(1e-5));
    CHECK(s.scores[1] == 0.0);

    // Same value by sampling the fantasy observation.
    SeededRng rng(51);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += std::max(0.5 * std::sqrt(2.0) * rng.normal(), 0.0);
    CHECK(std::abs(sum / n - s.scores[0]) < 5e-3);
  }

  SUBCASE("zero variance and single point") {
    const Posterior p = make_post({0.3, 0.1, 0.7}, {0, 0, 0}, 0.04);
    CHECK(kg_scores(p, Eigen::MatrixXd::Zero(3, 3), 0.04).scores.cwiseAbs().maxCoeff() == 0.0);
    const Posterior one = make_post({0.3}, {1.0}, 0.04);
    CHECK(kg_scores(one, Eigen::MatrixXd::Constant(1, 1, 1.0), 0.04).scores[0] == doctest::Approx(0.0).scale(1.0));
  }

  SUBCASE("envelope against quadrature") {
    SeededRng rng(61);
    for (int t = 0; t < 30; ++t) {
      const auto n = static_cast<Eigen::Index>(2 + t % 7);
      Eigen::VectorXd a(n);
      Eigen::VectorXd b(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        a[i] = rng.uniform(-1.0, 1.0);
        b[i] = rng.uniform(-1.0, 1.0);
      }
      if (t % 5 == 0) b[1] = b[0];
      CHECK(expected_max_gain(a, b) == doctest::Approx(kg_quadrature(a, b)).epsilon(1e-7).scale(1.0));
    }
  }

  SUBCASE("GP posterior against quadrature") {
    GpConfig c;
    const Grid g(-3.0, 3.0, 25);
    Dataset d;
    d.append(-1.0, 0.5);
    d.append(1.2, -0.3);
    const GpModel m = fit(c, d);
    const Posterior p = posterior(m, g);
    const Eigen::MatrixXd cov = posterior_covariance(m, g);
    const ScoreVector s = kg_scores(p, cov, c.noise_variance);
    for (Eigen::Index x = 0; x < 25; x += 6) {
      const Eigen::VectorXd b = cov.col(x) / std::sqrt(cov(x, x) + c.noise_variance);
      CHECK(s.scores[x] == doctest::Approx(kg_quadrature(p.mu, b)).epsilon(1e-7).scale(1.0));
      CHECK(s.scores[x] >= 0.0);
    }
  }
}

TEST_CASE("dispatch") {
  GpConfig c;
  const Grid g(-2.0, 2.0, 21);
  Dataset d;
  d.append(-1.0, 0.2);
  d.append(0.5, 1.0);
  const GpModel m = fit(c, d);
  const Posterior p = posterior(m, g);
  SeededRng rng(3);
  AcquisitionContext ctx{&m, &g, &p, 0.9, &rng};

  const AcquisitionResult efe = evaluate_acquisition(AcquisitionSpec::efe_adaptive(1.0, 30.0), ctx);
  EfePreference pref;
  pref.y_star = p.mu.maxCoeff();
  CHECK(efe.scores.scores == efe_scores(p, pref, c.noise_variance).scores);
  CHECK(efe.tau_sq.size() == 21);

  const AcquisitionResult ucb = evaluate_acquisition(AcquisitionSpec::ucb(2.0), ctx);
  CHECK(ucb.scores.scores == ucb_scores(p, 2.0).scores);
  CHECK(ucb.tau_sq.size() == 0);

  CHECK(evaluate_acquisition(AcquisitionSpec::ei(), ctx).scores.scores == ei_scores(p, 0.9).scores);

  ctx.rng = nullptr;
  CHECK_THROWS_AS(evaluate_acquisition(AcquisitionSpec::ts(), ctx), std::invalid_argument);
}
