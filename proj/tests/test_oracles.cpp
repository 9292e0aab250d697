#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "waterfill/oracles.hpp"

#include "frozen_values.hpp"
#include "test_support.hpp"

using namespace waterfill;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("dual_budget") {
  ProblemInstance p({0.8, 0.25});
  REQUIRE_THROWS_AS(dual_budget(p, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(dual_budget(p, -1.0), std::domain_error);

  // above a_max every coordinate is priced out
  REQUIRE(dual_budget(p, 0.8) == 0.0);
  REQUIRE(dual_budget(p, 1.5) == 0.0);

  SECTION("non-increasing in lambda wherever positive") {
    SplitMix64 rng(83);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.next() % 8;
      const ProblemInstance q = generate_instance(n, rng.next());
      double previous = std::numeric_limits<double>::infinity();
      for (double lambda = 0.005; lambda <= 1.1; lambda *= 1.07) {
        const double budget = dual_budget(q, lambda);
        REQUIRE(budget <= previous + 1e-12);
        previous = budget;
      }
    }
  }

  SECTION("bracket endpoints pin the root") {
    SplitMix64 rng(89);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + rng.next() % 20;
      const ProblemInstance q = generate_instance(n, rng.next());
      const double a_max = q.sorted_coefficients().front();
      const double dn = static_cast<double>(n);
      REQUIRE(dual_budget(q, a_max / ((1.0 + dn) * (1.0 + dn))) >= 1.0);
      REQUIRE(dual_budget(q, a_max) < 1.0);
    }
  }
}

TEST_CASE("lambda bisection") {
  SECTION("two-cup instance") {
    const OracleResult r = solve_by_lambda_bisection(ProblemInstance({0.8, 0.25}));
    REQUIRE(r.converged);
    REQUIRE(r.method == OracleMethod::lambda_bisection);
    REQUIRE_THAT(r.allocation[0], WithinAbs(frozen::kTwoCupX1, 1e-9));
    REQUIRE_THAT(r.allocation[1], WithinAbs(frozen::kTwoCupX2, 1e-9));
    REQUIRE_THAT(r.objective, WithinAbs(frozen::kTwoCupObjective, 1e-11));
  }

  SECTION("below-threshold pair lands on the vertex") {
    const OracleResult r = solve_by_lambda_bisection(ProblemInstance({0.8, 0.1}));
    REQUIRE(r.converged);
    REQUIRE_THAT(r.allocation[0], WithinAbs(1.0, 1e-9));
    REQUIRE_THAT(r.allocation[1], WithinAbs(0.0, 1e-9));
  }

  SECTION("uniform instance recovers the symmetric multiplier") {
    // lambda = c * n^2/(n+1)^2; for c = 0.5, n = 3 that is 0.28125
    const ProblemInstance u({0.5, 0.5, 0.5});
    const OracleResult r = solve_by_lambda_bisection(u);
    REQUIRE(r.converged);
    for (std::size_t i = 0; i < 3; ++i) {
      REQUIRE_THAT(r.allocation[i], WithinAbs(1.0 / 3.0, 1e-9));
    }
    const KktReport kkt = kkt_check(u, r.allocation, 1e-6, 1e-6);
    REQUIRE(kkt.passed);
    REQUIRE_THAT(kkt.lambda, WithinAbs(frozen::kUniformHalfLambda, 1e-9));
  }

  SECTION("iteration starvation reports non-convergence") {
    const OracleResult r = solve_by_lambda_bisection(ProblemInstance({0.8, 0.25}), 1e-12, 3);
    REQUIRE_FALSE(r.converged);
    REQUIRE(r.iterations_or_resolution == 3.0);
    REQUIRE(r.allocation.size() == 2);  // best iterate is still a valid allocation
  }

  SECTION("argument validation") {
    REQUIRE_THROWS_AS(solve_by_lambda_bisection(ProblemInstance({0.5}), 0.0),
                      std::domain_error);
    REQUIRE_THROWS_AS(solve_by_lambda_bisection(ProblemInstance({0.5}), 1e-12, 0),
                      std::domain_error);
  }

  SECTION("support agrees with the closed form") {
    SplitMix64 rng(97);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.next() % 5;
      const ProblemInstance p = generate_instance(n, rng.next());
      const OracleResult r = solve_by_lambda_bisection(p);
      REQUIRE(r.converged);
      const std::size_t k = solve(p).active_count;
      const auto& rank = p.sort_perm();
      for (std::size_t i = 0; i < n; ++i) {
        REQUIRE((r.allocation[i] > 1e-6) == (rank[i] < k));
      }
    }
  }
}

TEST_CASE("project_to_simplex") {
  REQUIRE(project_to_simplex(std::vector<double>{0.5, 0.5}).values() ==
          std::vector<double>{0.5, 0.5});
  REQUIRE(project_to_simplex(std::vector<double>{2.0, 0.0}).values() ==
          std::vector<double>{1.0, 0.0});

  const Allocation shifted = project_to_simplex(std::vector<double>{0.8, 0.6});
  REQUIRE_THAT(shifted[0], WithinAbs(0.6, 1e-15));
  REQUIRE_THAT(shifted[1], WithinAbs(0.4, 1e-15));

  SECTION("negative coordinates clip to zero") {
    const Allocation x = project_to_simplex(std::vector<double>{-1.0, 0.5});
    REQUIRE(x[0] == 0.0);
    REQUIRE_THAT(x[1], WithinAbs(1.0, 1e-15));
  }

  SECTION("validation") {
    REQUIRE_THROWS_AS(project_to_simplex(std::vector<double>{}), std::domain_error);
    REQUIRE_THROWS_AS(
        project_to_simplex(std::vector<double>{std::numeric_limits<double>::quiet_NaN()}),
        std::domain_error);
  }

  SECTION("no feasible point is closer (dense scan)") {
    SplitMix64 rng(101);
    const auto squared_distance = [](const std::vector<double>& x,
                                     const std::vector<double>& v) {
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - v[i]) * (x[i] - v[i]);
      return d;
    };

    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> v{3.0 * rng.next_unit() - 1.5, 3.0 * rng.next_unit() - 1.5};
      const Allocation x = project_to_simplex(v);
      const double dx = squared_distance(x.values(), v);
      for (int i = 0; i <= 10000; ++i) {
        const double t = static_cast<double>(i) / 10000.0;
        REQUIRE(dx <= squared_distance({t, 1.0 - t}, v) + 1e-12);
      }
    }

    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<double> v{3.0 * rng.next_unit() - 1.5, 3.0 * rng.next_unit() - 1.5,
                                  3.0 * rng.next_unit() - 1.5};
      const Allocation x = project_to_simplex(v);
      const double dx = squared_distance(x.values(), v);
      const int m = 500;
      for (int c1 = 0; c1 <= m; ++c1) {
        for (int c2 = 0; c2 + c1 <= m; ++c2) {
          const std::vector<double> grid{static_cast<double>(c1) / m,
                                         static_cast<double>(c2) / m,
                                         static_cast<double>(m - c1 - c2) / m};
          REQUIRE(dx <= squared_distance(grid, v) + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("projected gradient ascent") {
  SECTION("two-cup instance") {
    const OracleResult r = solve_by_projected_gradient(ProblemInstance({0.8, 0.25}));
    REQUIRE(r.converged);
    REQUIRE(r.method == OracleMethod::projected_gradient);
    REQUIRE_THAT(r.objective, WithinAbs(0.401858, 1e-6));
    REQUIRE_THAT(r.allocation[0], WithinAbs(frozen::kTwoCupX1, 1e-4));
  }

  SECTION("three-cup instance zeroes the weak cup") {
    const OracleResult r = solve_by_projected_gradient(ProblemInstance({0.8, 0.4, 0.25}));
    REQUIRE(r.converged);
    REQUIRE_THAT(r.allocation[2], WithinAbs(0.0, 1e-6));
    REQUIRE_THAT(r.objective, WithinAbs(frozen::kThreeCupObjective, 1e-9));
  }

  SECTION("symmetric pair stays symmetric") {
    const OracleResult r = solve_by_projected_gradient(ProblemInstance({0.7, 0.7}));
    REQUIRE(r.allocation[0] == 0.5);
    REQUIRE(r.allocation[1] == 0.5);
  }

  SECTION("objective trace is non-decreasing") {
    std::vector<double> trace;
    const OracleResult r = solve_by_projected_gradient(ProblemInstance({0.9, 0.3, 0.15, 0.6}),
                                                       0.1, 20000, 1e-13, &trace);
    REQUIRE(r.converged);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      REQUIRE(trace[i] >= trace[i - 1]);
    }
    REQUIRE(trace.back() == r.objective);
  }

  SECTION("iteration starvation reports non-convergence") {
    const OracleResult r =
        solve_by_projected_gradient(ProblemInstance({0.8, 0.25}), 0.1, 2, 1e-300);
    REQUIRE_FALSE(r.converged);
  }

  SECTION("argument validation") {
    const ProblemInstance p({0.5});
    REQUIRE_THROWS_AS(solve_by_projected_gradient(p, 0.0), std::domain_error);
    REQUIRE_THROWS_AS(solve_by_projected_gradient(p, 0.1, 0), std::domain_error);
    REQUIRE_THROWS_AS(solve_by_projected_gradient(p, 0.1, 100, 0.0), std::domain_error);
  }
}

TEST_CASE("grid search") {
  SECTION("two-cup instance at fine resolution") {
    const OracleResult r = solve_by_grid_search(ProblemInstance({0.8, 0.25}), 1e-4);
    REQUIRE(r.method == OracleMethod::grid_search);
    REQUIRE(r.converged);
    REQUIRE_THAT(r.objective, WithinAbs(frozen::kTwoCupObjective, 1e-7));
    REQUIRE_THAT(r.allocation[0], WithinAbs(0.9243, 1e-4));
    REQUIRE_THAT(r.allocation[1], WithinAbs(0.0757, 1e-4));
    REQUIRE(r.objective <= frozen::kTwoCupObjective);  // lattice can't beat the optimum
  }

  SECTION("three-cup instance keeps the weak cup at zero") {
    const OracleResult r = solve_by_grid_search(ProblemInstance({0.8, 0.4, 0.25}), 1e-3);
    REQUIRE(r.allocation[2] == 0.0);
    REQUIRE_THAT(r.objective, WithinAbs(frozen::kThreeCupObjective, 1e-5));
  }

  SECTION("single cup") {
    const OracleResult r = solve_by_grid_search(ProblemInstance({0.4}), 1e-2);
    REQUIRE(r.allocation.values() == std::vector<double>{1.0});
    REQUIRE_THAT(r.objective, WithinAbs(0.2, 1e-15));
  }

  SECTION("size guard and resolution range") {
    const ProblemInstance big({0.9, 0.8, 0.7, 0.6, 0.5});
    REQUIRE_THROWS_AS(solve_by_grid_search(big, 1e-2), UnsupportedSizeError);
    const ProblemInstance small({0.9, 0.8});
    REQUIRE_THROWS_AS(solve_by_grid_search(small, 1e-6), std::domain_error);
    REQUIRE_THROWS_AS(solve_by_grid_search(small, 0.5), std::domain_error);
  }

  SECTION("n = 4 stays close to the closed form") {
    const ProblemInstance p({0.9, 0.6, 0.45, 0.3});
    const OracleResult r = solve_by_grid_search(p, 1e-2);
    const SolveResult closed = solve(p);
    REQUIRE(closed.objective >= r.objective - 1e-12);
    REQUIRE_THAT(r.objective, WithinAbs(closed.objective, 1e-3));
  }
}

TEST_CASE("cross_validate") {
  SECTION("two-cup instance, all oracles") {
    const std::vector<OracleMethod> all{OracleMethod::lambda_bisection,
                                        OracleMethod::projected_gradient,
                                        OracleMethod::grid_search};
    const CrossValidationReport report =
        cross_validate(ProblemInstance({0.8, 0.25}), all, 1e-5);
    REQUIRE(report.passed);
    REQUIRE(report.methods.size() == 4);
    REQUIRE(report.methods[0].method == "closed_form");
    REQUIRE(report.max_objective_gap <= 1e-5);
    for (const MethodReport& m : report.methods) REQUIRE(m.converged);
  }

  SECTION("boundary instance agrees at tight tolerance") {
    const std::vector<OracleMethod> two{OracleMethod::lambda_bisection,
                                        OracleMethod::projected_gradient};
    const CrossValidationReport report =
        cross_validate(ProblemInstance({1.0, 0.2}), two, 1e-8);
    REQUIRE(report.passed);
    for (const MethodReport& m : report.methods) {
      REQUIRE_THAT(m.allocation[0], WithinAbs(1.0, 1e-7));
      REQUIRE_THAT(m.allocation[1], WithinAbs(0.0, 1e-7));
    }
  }

  SECTION("coarse grid fails an absurd tolerance") {
    const std::vector<OracleMethod> grid{OracleMethod::grid_search};
    CrossValidateOptions options;
    options.grid_resolution = 1e-1;
    const CrossValidationReport report =
        cross_validate(ProblemInstance({0.8, 0.25}), grid, 1e-12, options);
    REQUIRE_FALSE(report.passed);
    REQUIRE(report.max_objective_gap > 1e-12);
  }

  SECTION("validation") {
    const ProblemInstance p({0.8, 0.25});
    REQUIRE_THROWS_AS(cross_validate(p, {}, 1e-5), std::invalid_argument);
    const std::vector<OracleMethod> one{OracleMethod::lambda_bisection};
    REQUIRE_THROWS_AS(cross_validate(p, one, 0.0), std::domain_error);
    const std::vector<OracleMethod> grid{OracleMethod::grid_search};
    const ProblemInstance big({0.9, 0.8, 0.7, 0.6, 0.5});
    REQUIRE_THROWS_AS(cross_validate(big, grid, 1e-5), UnsupportedSizeError);
  }

  SECTION("random instances agree across methods") {
    SplitMix64 rng(103);
    const std::vector<OracleMethod> two{OracleMethod::lambda_bisection,
                                        OracleMethod::projected_gradient};
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 2 + rng.next() % 5;
      const CrossValidationReport report =
          cross_validate(generate_instance(n, rng.next()), two, 1e-5);
      REQUIRE(report.passed);
    }
  }
}
