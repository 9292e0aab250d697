// Walks through the library on a small instance: solve, inspect the active
// set, certify with KKT, and cross-check against the oracles.

#include <cstdio>

#include "waterfill/waterfill.hpp"

int main() {
  using namespace waterfill;

  // Four options with diminishing-return utilities a*x/(1+x).
  ProblemInstance p({0.9, 0.5, 0.3, 0.04});

  SolveResult r = solve(p);
  std::printf("funded options: %zu of %zu\n", r.active_count, p.n());
  for (std::size_t i = 0; i < p.n(); ++i) {
    std::printf("  a = %-5g -> x = %.6f\n", p.coefficients()[i], r.allocation[i]);
  }
  std::printf("objective        %.12f\n", r.objective);
  std::printf("common marginal  %.12f\n", r.lambda);

  // Every funded option has marginal utility lambda; unfunded ones sit below.
  KktReport kkt = kkt_check(p, r.allocation, 1e-9, 1e-12);
  std::printf("kkt certificate  %s (active dev %.3g, inactive viol %.3g)\n",
              kkt.passed ? "ok" : "FAILED", kkt.max_active_deviation,
              kkt.max_inactive_violation);

  // Independent confirmation by dual bisection and projected gradient.
  const OracleMethod methods[] = {OracleMethod::lambda_bisection,
                                  OracleMethod::projected_gradient};
  CrossValidationReport cv = cross_validate(p, methods, 1e-5);
  std::printf("oracle agreement %s (max objective gap %.3g)\n",
              cv.passed ? "ok" : "FAILED", cv.max_objective_gap);

  return kkt.passed && cv.passed ? 0 : 1;
}
