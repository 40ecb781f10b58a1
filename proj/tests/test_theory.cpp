#include <doctest.h>

#include <cmath>
#include <sstream>

#include "efebo/errors.hpp"
#include "efebo/theory.hpp"
#include "efebo/theory_checks.hpp"

using namespace efebo;
using namespace efebo::theory;

namespace {

// Objectives written out independently of the library. The log term is
// shifted by a constant so a zero noise variance stays finite.
double j_pragmatic(const LinearizationPoint& p, double mu, double sigma) {
  return ((mu - p.y_star) * (mu - p.y_star) + sigma * sigma + p.noise_var) / (2.0 * p.tau_sq);
}
double j_full(const LinearizationPoint& p, double mu, double sigma) {
  return j_pragmatic(p, mu, sigma) - 0.5 * std::log(p.noise_var + sigma * sigma);
}

template <typename F>
double d_mu(F f, const LinearizationPoint& p) {
  const double h = 1e-6 * std::max(1.0, std::abs(p.mu0));
  return (f(p, p.mu0 + h, p.sigma0) - f(p, p.mu0 - h, p.sigma0)) / (2.0 * h);
}
template <typename F>
double d_sigma(F f, const LinearizationPoint& p) {
  const double h = 1e-6 * std::max(1.0, p.sigma0);
  return (f(p, p.mu0, p.sigma0 + h) - f(p, p.mu0, p.sigma0 - h)) / (2.0 * h);
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <typename F>
double golden_max(F f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("LCB linearization") {
  LinearizationPoint p{0.0, 1.0, 1.0, 1.0, 0.0};
  const LinearCoeffs c = lcb_linearization(p);
  CHECK(c.a == doctest::Approx(-1.0));
  CHECK(c.b == doctest::Approx(1.0));
  CHECK(c.beta == doctest::Approx(1.0));
  CHECK(std::abs(d_mu(j_pragmatic, p) - c.a) < 1e-6);
  CHECK(std::abs(d_sigma(j_pragmatic, p) - c.b) < 1e-6);

  LinearizationPoint doubled = p;
  doubled.tau_sq = 2.0;
  const LinearCoeffs c2 = lcb_linearization(doubled);
  CHECK(c2.a == doctest::Approx(0.5 * c.a));
  CHECK(c2.b == doctest::Approx(0.5 * c.b));
  CHECK(c2.beta == doctest::Approx(c.beta));

  p.y_star = p.mu0;
  CHECK_THROWS_AS(lcb_linearization(p), SignConditionViolated);
  p.y_star = p.mu0 - 1.0;
  CHECK_THROWS_AS(lcb_linearization(p), SignConditionViolated);
}

TEST_CASE("UCB linearization") {
  // sigma_n^2 + sigma_0^2 = 1 with sigma_0 = 1.
  LinearizationPoint p{0.0, 1.0, 3.0, 4.0, 0.0};
  const LinearCoeffs c = ucb_linearization(p);
  CHECK(c.a == doctest::Approx(-0.75));
  CHECK(c.b == doctest::Approx(-0.75));
  CHECK(c.beta == doctest::Approx(1.0));
  CHECK(std::abs(d_mu(j_full, p) - c.a) < 1e-6);
  CHECK(std::abs(d_sigma(j_full, p) - c.b) < 1e-6);

  LinearizationPoint boundary{0.0, 0.6, 1.0, 0.36 + 0.64, 0.64};
  const LinearCoeffs cb = ucb_linearization(boundary);
  CHECK(cb.b == doctest::Approx(0.0).scale(1.0));
  CHECK(cb.beta == doctest::Approx(0.0).scale(1.0));

  LinearizationPoint above{2.0, 1.0, 1.0, 4.0, 0.0};
  CHECK_THROWS_AS(ucb_linearization(above), SignConditionViolated);
  LinearizationPoint tight{0.0, 1.0, 3.0, 0.5, 0.0};
  CHECK_THROWS_AS(ucb_linearization(tight), SignConditionViolated);
}

TEST_CASE("linearizations match finite differences at random points") {
  SeededRng rng(71);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    LinearizationPoint p;
    p.mu0 = rng.uniform(-3.0, 3.0);
    p.sigma0 = rng.uniform(0.05, 2.0);
    p.y_star = p.mu0 + rng.uniform(0.1, 5.0);
    p.noise_var = rng.uniform(1e-3, 1.0);
    p.tau_sq = (p.noise_var + p.sigma0 * p.sigma0) * rng.uniform(1.01, 20.0);
    const LinearCoeffs l = lcb_linearization(p);
    const LinearCoeffs u = ucb_linearization(p);
    auto rel = [](double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-12); };
    CHECK(rel(l.a, d_mu(j_pragmatic, p)) < 1e-5);
    CHECK(rel(l.b, d_sigma(j_pragmatic, p)) < 1e-5);
    CHECK(rel(u.a, d_mu(j_full, p)) < 1e-5);
    CHECK(rel(u.b, d_sigma(j_full, p)) < 1e-5);
    CHECK(u.beta > 0.0);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("library objectives agree with the written-out forms") {
  LinearizationPoint p{0.3, 0.7, 1.5, 2.0, 0.2};
  CHECK(pragmatic_objective(p, 0.1, 0.4) == doctest::Approx(j_pragmatic(p, 0.1, 0.4)));
  // The shift is the constant 0.5 ln(noise).
  CHECK(full_objective(p, 0.1, 0.4) == doctest::Approx(j_full(p, 0.1, 0.4) + 0.5 * std::log(p.noise_var)));
}

TEST_CASE("information gain identity") {
  CHECK(eig_identity_check(1.0, 1.0).epistemic == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(eig_identity_check(1.0, 1.0).mutual_information == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(eig_identity_check(4.0, 1.0).mutual_information == doctest::Approx(0.5 * std::log(5.0)));

  SeededRng rng(81);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double v = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
    const double n = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
    const EigPair e = eig_identity_check(v, n);
    // Entropy difference computed here: 0.5 ln(2 pi e v) - 0.5 ln(2 pi e v n / (v + n)).
    const double mi = 0.5 * std::log(v) - 0.5 * std::log(v * n / (v + n));
    worst = std::max({worst, std::abs(e.epistemic - e.mutual_information), std::abs(e.epistemic - mi)});
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Kalman identity") {
  SeededRng rng(91);
  const IdentityPair k = kalman_identity_check(1.0, 1.0, 1000000, rng);
  CHECK(k.analytic == doctest::Approx(0.5));
  CHECK(std::abs(k.monte_carlo - 0.5) < 5e-3);
  SeededRng rng2(92);
  const IdentityPair z = kalman_identity_check(0.0, 1.0, 1000, rng2);
  CHECK(z.analytic == 0.0);
  CHECK(z.monte_carlo == 0.0);
}

TEST_CASE("expected KL and cross-entropy") {
  SeededRng rng(93);
  for (double v : {0.1, 1.0, 10.0}) {
    for (double n : {0.1, 1.0, 10.0}) {
      const IdentityPair kl = expected_kl_check(v, n, 1000000, rng);
      CHECK(kl.analytic == doctest::Approx(0.5 * std::log1p(v / n)));
      CHECK(std::abs(kl.monte_carlo - kl.analytic) < 5e-3);
    }
  }
  const IdentityPair ce = pragmatic_cross_entropy_check(0.0, 1.0, 2.0, 2.0, 1000000, rng);
  CHECK(ce.analytic == doctest::Approx(1.25));
  CHECK(std::abs(ce.monte_carlo - 1.25) < 5e-3);
}

TEST_CASE("quadratic model coefficients") {
  SUBCASE("unbiased preference") {
    LocalExpansion e{1.0, 0.6, 0.8, 0.3, 0.4, 1.0};
    const QuadraticCoeffs q = quadratic_model_coeffs(e);
    CHECK(q.L_tilde == doctest::Approx(0.0).scale(1.0));
    CHECK(q.Q_tilde == doctest::Approx(-0.64 / 4.0));
  }
  SUBCASE("flat variance") {
    LocalExpansion e{1.0, 0.6, 0.0, 0.0, 0.4, 1.0};
    const QuadraticCoeffs q = quadratic_model_coeffs(e);
    CHECK(q.L_tilde == 0.0);
    CHECK(q.Q_tilde == 0.0);
  }
  SUBCASE("degenerate case") {
    LocalExpansion e{1.0, 1.0, 1.0, 2.0, 0.0, 2.0};
    const QuadraticCoeffs q = quadratic_model_coeffs(e);
    CHECK(q.L_tilde == doctest::Approx(0.25));
    CHECK(q.Q_tilde == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(efe_bias(e), DegenerateQuadratic);
  }
  SUBCASE("model matches the local objective to second order") {
    SeededRng rng(101);
    for (int t = 0; t < 200; ++t) {
      LocalExpansion e{rng.uniform(-3.0, 3.0), rng.uniform(0.1, 2.0), rng.uniform(-1.0, 1.0),
                       rng.uniform(-1.0, 1.0), rng.uniform(0.01, 1.0), rng.uniform(0.2, 5.0)};
      const QuadraticCoeffs q = quadratic_model_coeffs(e);
      const double h = 1e-3;
      const double base = efe_local_objective(e, 0.0);
      const double err = std::abs(efe_local_objective(e, h) - base - (q.L_tilde * h + q.Q_tilde * h * h));
      CHECK(err < 1e-7);
    }
  }
}

TEST_CASE("bias of the EFE maximizer") {
  SUBCASE("zero at tau^2 = S") {
    LocalExpansion e{1.0, 0.5, 0.7, -0.2, 0.3, 0.8};
    CHECK(std::abs(efe_bias(e)) < 1e-12);
  }
  SUBCASE("zero slope") {
    LocalExpansion e{1.0, 0.5, 0.0, 1.0, 0.3, 1.0 / (0.1 + 1.0 / 0.8)};
    CHECK(e.Delta() == doctest::Approx(0.1));
    CHECK(efe_bias(e) == 0.0);
  }
  SUBCASE("worked example against a numerical maximizer") {
    LocalExpansion e{1.0, 1.0, 1.0, 0.0, 0.0, 2.0};
    CHECK(e.Delta() == doctest::Approx(-0.5));
    const QuadraticCoeffs q = quadratic_model_coeffs(e);
    const double h_star = golden_max([&](double h) { return q.L_tilde * h + q.Q_tilde * h * h; }, -10.0, 10.0);
    CHECK(h_star == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(efe_bias(e) == doctest::Approx(h_star).epsilon(1e-8));
  }
  SUBCASE("random expansions against the stationary point") {
    SeededRng rng(111);
    int checked = 0;
    while (checked < 1000) {
      LocalExpansion e{rng.uniform(-3.0, 3.0), rng.uniform(0.05, 3.0), rng.uniform(-2.0, 2.0),
                       rng.uniform(-2.0, 2.0), rng.uniform(0.0, 1.0), rng.uniform(0.05, 10.0)};
      const QuadraticCoeffs q = quadratic_model_coeffs(e);
      if (std::abs(q.Q_tilde) <= 1e-6) continue;
      const double stationary = -q.L_tilde / (2.0 * q.Q_tilde);
      CHECK(std::abs(efe_bias(e) - stationary) <= 1e-10 * std::max(1.0, std::abs(stationary)));
      if (q.Q_tilde < 0.0 && std::abs(stationary) < 5.0) {
        const double h = golden_max([&](double x) { return q.L_tilde * x + q.Q_tilde * x * x; }, -10.0, 10.0);
        CHECK(std::abs(h - stationary) < 1e-6);
      }
      ++checked;
    }
  }
  SUBCASE("sign change across tau^2 = S") {
    LocalExpansion e{1.0, 0.5, 0.9, 0.1, 0.2, 0.7};
    const double s = e.S();
    e.tau_sq = s * 0.99;
    const double below = efe_bias(e);
    e.tau_sq = s * 1.01;
    const double above = efe_bias(e);
    CHECK(below * above < 0.0);
  }
  SUBCASE("unbiased local maximizer of the full objective") {
    LocalExpansion e{-2.0, 0.4, 0.6, 0.5, 0.1, 0.5};
    const double lim = 0.01 * std::min(1.0, e.S() / std::abs(e.g));
    const double h = golden_max([&](double x) { return efe_local_objective(e, x); }, -lim, lim);
    CHECK(std::abs(h) < 1e-6);
  }
}

TEST_CASE("theory check table") {
  const auto rows = run_theory_checks(200000);
  std::ostringstream os;
  print_check_table(os, rows);
  INFO(os.str());
  CHECK(rows.size() >= 10);
  CHECK(all_passed(rows));
  CHECK(os.str().find("FAIL") == std::string::npos);
}
