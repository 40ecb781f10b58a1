#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace efebo {

/// One row of the theory-check table. `computed` is the worst observed
/// deviation (or the quantity itself when `expected` is meaningful).
struct CheckRow {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// Closed-form checks: information-gain identity, linearization
/// coefficients, quadratic-model bias, unbiasedness at tau^2 = S.
std::vector<CheckRow> run_analytic_theory_checks(std::uint64_t seed = 7);

/// Sampled checks of the expected KL, the Kalman variance identity and the
/// pragmatic cross-entropy against their closed forms.
std::vector<CheckRow> run_monte_carlo_theory_checks(std::size_t mc_samples = 1'000'000, std::uint64_t seed = 11);

std::vector<CheckRow> run_theory_checks(std::size_t mc_samples = 1'000'000);

void print_check_table(std::ostream& os, const std::vector<CheckRow>& rows);

bool all_passed(const std::vector<CheckRow>& rows);

}  // namespace efebo
