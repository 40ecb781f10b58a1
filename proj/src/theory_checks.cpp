#include "efebo/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "efebo/rng.hpp"
#include "efebo/theory.hpp"

namespace efebo {

namespace {

using theory::LinearizationPoint;
using theory::LocalExpansion;

constexpr int kCases = 1000;
constexpr double kFdStep = 1e-6;

double log_uniform(SeededRng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

double rel_err(double approx, double exact) {
  return std::abs(approx - exact) / std::max(std::abs(exact), 1e-300);
}

template <typename J>
double fd_mu(const J& obj, double mu, double sigma) {
  const double h = kFdStep * std::max(std::abs(mu), 1.0);
  return (obj(mu + h, sigma) - obj(mu - h, sigma)) / (2.0 * h);
}

template <typename J>
double fd_sigma(const J& obj, double mu, double sigma) {
  const double h = kFdStep * sigma;
  return (obj(mu, sigma + h) - obj(mu, sigma - h)) / (2.0 * h);
}

/// Reference point inside the UCB regime: mu0 < y*, noise + sigma0^2 < tau^2.
LinearizationPoint ucb_regime_point(SeededRng& rng) {
  LinearizationPoint pt;
  pt.mu0 = rng.uniform(-1.0, 1.0);
  pt.y_star = pt.mu0 + rng.uniform(0.5, 3.0);
  pt.sigma0 = rng.uniform(0.2, 1.0);
  pt.noise_var = log_uniform(rng, 0.01, 0.5);
  pt.tau_sq = (pt.noise_var + pt.sigma0 * pt.sigma0) * rng.uniform(2.0, 20.0);
  return pt;
}

CheckRow max_row(std::string name, double worst, double tol, std::string detail) {
  return CheckRow{std::move(name), worst, 0.0, tol, worst <= tol, std::move(detail)};
}

CheckRow identity_row(std::string name, double computed, double expected, double tol) {
  return CheckRow{std::move(name), computed, expected, tol, std::abs(computed - expected) <= tol, ""};
}

}  // namespace

std::vector<CheckRow> run_analytic_theory_checks(std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<CheckRow> rows;

  {
    double worst = 0.0;
    for (int i = 0; i < kCases; ++i) {
      const auto p = theory::eig_identity_check(log_uniform(rng, 1e-3, 1e3), log_uniform(rng, 1e-3, 1e3));
      worst = std::max(worst, std::abs(p.epistemic - p.mutual_information));
    }
    rows.push_back(max_row("eig identity (epistemic == mutual information)", worst, 1e-12, "1000 random pairs"));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < kCases; ++i) {
      LinearizationPoint pt = ucb_regime_point(rng);
      const auto c = theory::lcb_linearization(pt);
      auto obj = [&](double mu, double sigma) { return theory::pragmatic_objective(pt, mu, sigma); };
      worst = std::max({worst, rel_err(fd_mu(obj, pt.mu0, pt.sigma0), c.a),
                        rel_err(fd_sigma(obj, pt.mu0, pt.sigma0), c.b)});
    }
    rows.push_back(max_row("LCB linearization a,b vs finite differences (rel)", worst, 1e-5, "1000 points"));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < kCases; ++i) {
      LinearizationPoint pt = ucb_regime_point(rng);
      const auto c = theory::ucb_linearization(pt);
      auto obj = [&](double mu, double sigma) { return theory::full_objective(pt, mu, sigma); };
      worst = std::max({worst, rel_err(fd_mu(obj, pt.mu0, pt.sigma0), c.a),
                        rel_err(fd_sigma(obj, pt.mu0, pt.sigma0), c.b)});
    }
    rows.push_back(max_row("UCB linearization a,b vs finite differences (rel)", worst, 1e-5, "1000 points"));
  }

  {
    // Local box of radius 0.1 sigma0 in (mu, sigma); 21 x 21 cells. Cases where
    // curvature could flip a gradient sign inside the box are skipped.
    constexpr int kSide = 21;
    int tested = 0;
    int worst_cells = 0;
    while (tested < 200) {
      const LinearizationPoint pt = ucb_regime_point(rng);
      const auto c = theory::ucb_linearization(pt);
      const double r = 0.1 * pt.sigma0;
      const double s_hi = pt.sigma0 + r;
      const double s_lo = pt.sigma0 - r;
      const double h_mu = 1.0 / pt.tau_sq;
      double h_sigma = 0.0;
      for (double s : {s_lo, s_hi}) {
        const double v = s * s + pt.noise_var;
        h_sigma = std::max(h_sigma, std::abs(1.0 / pt.tau_sq - (pt.noise_var - s * s) / (v * v)));
      }
      if (std::abs(c.a) <= 4.0 * r * h_mu || std::abs(c.b) <= 4.0 * r * h_sigma) continue;
      ++tested;
      int best_j[2] = {0, 0};
      int best_k[2] = {0, 0};
      double best_v[2] = {-INFINITY, -INFINITY};
      for (int j = 0; j < kSide; ++j) {
        for (int k = 0; k < kSide; ++k) {
          const double mu = pt.mu0 - r + 2.0 * r * j / (kSide - 1);
          const double sigma = pt.sigma0 - r + 2.0 * r * k / (kSide - 1);
          const double vals[2] = {-theory::full_objective(pt, mu, sigma), mu + c.beta * sigma};
          for (int q = 0; q < 2; ++q) {
            if (vals[q] > best_v[q]) {
              best_v[q] = vals[q];
              best_j[q] = j;
              best_k[q] = k;
            }
          }
        }
      }
      worst_cells = std::max({worst_cells, std::abs(best_j[0] - best_j[1]), std::abs(best_k[0] - best_k[1])});
    }
    rows.push_back(max_row("UCB surrogate argmax vs EFE argmax (grid cells)", worst_cells, 1.0,
                           "200 local 21x21 boxes"));
  }

  {
    double worst = 0.0;
    int tested = 0;
    while (tested < kCases) {
      LocalExpansion e;
      e.m = rng.uniform(0.1, 5.0);
      e.v0 = log_uniform(rng, 1e-3, 1.0);
      e.g = rng.uniform(-2.0, 2.0);
      e.v2 = rng.uniform(-2.0, 2.0);
      e.noise_var = log_uniform(rng, 1e-3, 1.0);
      e.tau_sq = e.S() * log_uniform(rng, 0.1, 10.0);
      const auto q = theory::quadratic_model_coeffs(e);
      if (std::abs(q.Q_tilde) <= 1e-6) continue;
      ++tested;
      const double h = theory::efe_bias(e);
      const double stationary = -q.L_tilde / (2.0 * q.Q_tilde);
      worst = std::max(worst, std::abs(h - stationary) / std::max(1.0, std::abs(stationary)));
    }
    rows.push_back(max_row("bias h_EFE vs quadratic-model stationary point", worst, 1e-10, "1000 expansions"));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < kCases; ++i) {
      LocalExpansion e;
      e.v0 = log_uniform(rng, 1e-3, 1.0);
      e.g = rng.uniform(0.05, 2.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      e.v2 = rng.uniform(-2.0, 2.0);
      e.noise_var = log_uniform(rng, 1e-3, 1.0);
      e.tau_sq = e.S();
      worst = std::max(worst, std::abs(theory::efe_bias(e)));
    }
    rows.push_back(max_row("bias at tau^2 = S (Delta = 0)", worst, 1e-12, "1000 expansions"));
  }

  {
    int failures = 0;
    for (int i = 0; i < kCases; ++i) {
      LocalExpansion e;
      e.v0 = log_uniform(rng, 1e-3, 1.0);
      e.g = rng.uniform(0.05, 2.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      e.v2 = rng.uniform(-2.0, 2.0);
      e.noise_var = log_uniform(rng, 1e-3, 1.0);
      e.tau_sq = e.S() * (1.0 - 1e-4);
      const double below = theory::efe_bias(e);
      e.tau_sq = e.S() * (1.0 + 1e-4);
      const double above = theory::efe_bias(e);
      if (!(below * above < 0.0)) ++failures;
    }
    rows.push_back(max_row("h_EFE changes sign across tau^2 = S", failures, 0.0, "1000 expansions"));
  }

  {
    // Full (untruncated) local objective at tau^2 = S peaks at h = 0 inside
    // |h| <= 0.01 min(1, S/|g|).
    constexpr int kHalf = 100;
    int worst_cells = 0;
    for (int i = 0; i < 200; ++i) {
      LocalExpansion e;
      e.m = rng.uniform(0.1, 5.0);
      e.v0 = log_uniform(rng, 1e-2, 1.0);
      e.g = rng.uniform(0.05, 2.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      e.v2 = rng.uniform(-2.0, 2.0);
      e.noise_var = e.v0 * rng.uniform(0.05, 1.0);
      e.tau_sq = e.S();
      const double radius = 0.01 * std::min(1.0, e.S() / std::abs(e.g));
      int best = 0;
      double best_v = -INFINITY;
      for (int k = -kHalf; k <= kHalf; ++k) {
        const double v = theory::efe_local_objective(e, radius * k / kHalf);
        if (v > best_v) {
          best_v = v;
          best = k;
        }
      }
      worst_cells = std::max(worst_cells, std::abs(best));
    }
    rows.push_back(max_row("local EFE maximizer at x* when tau^2 = S (grid cells)", worst_cells, 1.0,
                           "200 neighbourhoods, 201 cells"));
  }

  return rows;
}

std::vector<CheckRow> run_monte_carlo_theory_checks(std::size_t mc_samples, std::uint64_t seed) {
  constexpr double kTol = 5e-3;
  std::vector<CheckRow> rows;
  SeededRng rng(seed);
  for (double var : {0.1, 1.0, 10.0}) {
    for (double noise : {0.1, 1.0, 10.0}) {
      const auto p = theory::expected_kl_check(var, noise, mc_samples, rng);
      char name[96];
      std::snprintf(name, sizeof name, "expected KL closed form (var=%g, noise=%g)", var, noise);
      rows.push_back(identity_row(name, p.monte_carlo, p.analytic, kTol));
    }
  }
  {
    const auto p = theory::kalman_identity_check(1.0, 1.0, mc_samples, rng);
    rows.push_back(identity_row("Kalman identity E[(mu+ - mu)^2] (var=1, noise=1)", p.monte_carlo, p.analytic, kTol));
  }
  {
    const auto p = theory::pragmatic_cross_entropy_check(0.0, 1.0, 2.0, 2.0, mc_samples, rng);
    rows.push_back(identity_row("pragmatic cross-entropy (mu=0, var=1, y*=2, tau^2=2)", p.monte_carlo, p.analytic,
                                kTol));
  }
  for (auto& r : rows) r.detail = std::to_string(mc_samples) + " samples";
  return rows;
}

std::vector<CheckRow> run_theory_checks(std::size_t mc_samples) {
  std::vector<CheckRow> rows = run_analytic_theory_checks();
  std::vector<CheckRow> mc = run_monte_carlo_theory_checks(mc_samples);
  rows.insert(rows.end(), mc.begin(), mc.end());
  return rows;
}

void print_check_table(std::ostream& os, const std::vector<CheckRow>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%-60s %14s %14s %10s  %s\n", "check", "computed", "expected", "tol", "result");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-60s %14.6e %14.6e %10.1e  %s\n", r.name.c_str(), r.computed, r.expected,
                  r.tolerance, r.passed ? "PASS" : "FAIL");
    os << line;
  }
}

bool all_passed(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed; });
}

}  // namespace efebo
