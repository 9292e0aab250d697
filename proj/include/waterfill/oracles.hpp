#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "waterfill/core.hpp"
#include "waterfill/solver.hpp"

// Independent checks on the closed form: a dual bisection on the common
// marginal, projected gradient ascent, and exhaustive grid search for small
// n. The problem is strictly concave on the simplex, so every method must
// land on the same optimum.

namespace waterfill {

enum class OracleMethod { lambda_bisection, projected_gradient, grid_search };

inline const char* to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::lambda_bisection: return "lambda_bisection";
    case OracleMethod::projected_gradient: return "projected_gradient";
    case OracleMethod::grid_search: return "grid_search";
  }
  return "unknown";
}

struct UnsupportedSizeError : std::domain_error {
  using std::domain_error::domain_error;
};

struct OracleResult {
  Allocation allocation;
  double objective;
  OracleMethod method;
  double iterations_or_resolution;  // iteration count, or grid resolution
  bool converged;
};

// Water budget used by one unit of dual price lambda:
// sum_i max(0, sqrt(a_i/lambda) - 1). Strictly decreasing in lambda wherever
// positive; the optimal multiplier is the root of budget(lambda) = 1.
inline double dual_budget(const ProblemInstance& p, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("dual_budget: lambda must be positive");
  detail::CompensatedSum acc;
  for (double a : p.coefficients()) {
    acc.add(std::max(0.0, std::sqrt(a / lambda) - 1.0));
  }
  return acc.value();
}

// Bisection on lambda. The bracket [a_max/(1+n)^2, a_max] pins the root:
// at the left end every coordinate's budget is at least its share of n >= 1,
// at the right end the budget is 0 < 1.
inline OracleResult solve_by_lambda_bisection(const ProblemInstance& p,
                                              double tol_sum = 1e-12,
                                              int max_iter = 200) {
  if (!(tol_sum > 0.0)) throw std::domain_error("solve_by_lambda_bisection: tol_sum must be positive");
  if (max_iter < 1) throw std::domain_error("solve_by_lambda_bisection: max_iter must be >= 1");

  const double a_max = p.sorted_coefficients().front();
  const double n = static_cast<double>(p.n());
  double lo = a_max / ((1.0 + n) * (1.0 + n));
  double hi = a_max;

  double lambda = 0.5 * (lo + hi);
  double best_lambda = lambda;
  double best_gap = std::numeric_limits<double>::infinity();
  bool converged = false;
  int used = 0;
  for (int it = 0; it < max_iter; ++it) {
    used = it + 1;
    lambda = 0.5 * (lo + hi);
    const double budget = dual_budget(p, lambda);
    const double gap = std::abs(budget - 1.0);
    if (gap < best_gap) {
      best_gap = gap;
      best_lambda = lambda;
    }
    if (gap <= tol_sum) {
      converged = true;
      break;
    }
    if (budget > 1.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
  }

  std::vector<double> x(p.n());
  const auto& a = p.coefficients();
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::max(0.0, std::sqrt(a[i] / best_lambda) - 1.0);
  }
  Allocation alloc = Allocation::normalized(std::move(x));
  const double objective = evaluate_objective(p, alloc);
  return OracleResult{std::move(alloc), objective, OracleMethod::lambda_bisection,
                      static_cast<double>(used), converged};
}

// Euclidean projection onto the probability simplex (sort and threshold).
inline Allocation project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw std::domain_error("project_to_simplex: empty vector");
  for (double value : v) {
    if (!std::isfinite(value)) {
      throw std::domain_error("project_to_simplex: entries must be finite");
    }
  }
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());

  double theta = 0.0;
  detail::CompensatedSum css;
  for (std::size_t j = 1; j <= u.size(); ++j) {
    css.add(u[j - 1]);
    const double candidate = (css.value() - 1.0) / static_cast<double>(j);
    if (u[j - 1] > candidate) theta = candidate;  // holds on a prefix of j
  }

  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    x[i] = std::max(0.0, v[i] - theta);
  }
  return Allocation(std::move(x));
}

// Projected gradient ascent from the uniform point with backtracking line
// search. The step halves until a candidate improves, re-expands after a
// success, and the loop stops once the accepted improvement drops below
// tol_improve (or no step length helps at all).
inline OracleResult solve_by_projected_gradient(const ProblemInstance& p,
                                                double step = 0.1,
                                                int max_iter = 20000,
                                                double tol_improve = 1e-13,
                                                std::vector<double>* objective_trace = nullptr) {
  if (!(step > 0.0)) throw std::domain_error("solve_by_projected_gradient: step must be positive");
  if (max_iter < 1) throw std::domain_error("solve_by_projected_gradient: max_iter must be >= 1");
  if (!(tol_improve > 0.0)) throw std::domain_error("solve_by_projected_gradient: tol_improve must be positive");

  const auto& a = p.coefficients();
  const std::size_t n = p.n();
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double objective = objective_value(a, x);
  if (objective_trace) {
    objective_trace->clear();
    objective_trace->push_back(objective);
  }

  double current_step = step;
  std::vector<double> trial(n);
  bool converged = false;
  int used = 0;
  for (int it = 0; it < max_iter; ++it) {
    used = it;
    const std::vector<double> g = marginal_utilities(std::span<const double>(a),
                                                     std::span<const double>(x));
    bool improved = false;
    while (current_step >= 1e-18) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + current_step * g[i];
      Allocation candidate = project_to_simplex(trial);
      const double candidate_objective = evaluate_objective(p, candidate);
      if (candidate_objective > objective) {
        const double gain = candidate_objective - objective;
        x = candidate.values();
        objective = candidate_objective;
        if (objective_trace) objective_trace->push_back(objective);
        improved = true;
        if (gain < tol_improve) converged = true;
        break;
      }
      current_step *= 0.5;
    }
    if (!improved) {
      converged = true;  // no step length improves: fixed point in this precision
      break;
    }
    if (converged) break;
    current_step = std::min(current_step * 2.0, 1e6);
  }
  return OracleResult{Allocation(std::move(x)), objective,
                      OracleMethod::projected_gradient, static_cast<double>(used),
                      converged};
}

// Exhaustive search over the lattice x = c/m with c a composition of
// m = round(1/resolution) into n parts. Only supported through n = 4; the
// point count grows as m^(n-1).
inline OracleResult solve_by_grid_search(const ProblemInstance& p, double resolution) {
  if (p.n() > 4) {
    throw UnsupportedSizeError("solve_by_grid_search: supported only for n <= 4, got n = " +
                               std::to_string(p.n()));
  }
  if (!(resolution >= 1e-5) || !(resolution <= 1e-1)) {
    throw std::domain_error("solve_by_grid_search: resolution must lie in [1e-5, 1e-1]");
  }
  const long m = std::lround(1.0 / resolution);
  const std::size_t n = p.n();
  const auto& a = p.coefficients();

  // term[i][c] = a_i * (c/m) / (1 + c/m) = a_i * c / (m + c)
  std::vector<std::vector<double>> term(n, std::vector<double>(static_cast<std::size_t>(m) + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (long c = 0; c <= m; ++c) {
      term[i][static_cast<std::size_t>(c)] =
          a[i] * static_cast<double>(c) / static_cast<double>(m + c);
    }
  }

  std::vector<long> counts(n, 0);
  std::vector<long> best_counts(n, 0);
  double best = -std::numeric_limits<double>::infinity();

  if (n == 1) {
    best = term[0][static_cast<std::size_t>(m)];
    best_counts[0] = m;
  } else {
    // Depth-first over the leading n-2 counts; the innermost loop scans the
    // split of the remainder between the final two coordinates.
    auto scan = [&](auto&& self, std::size_t level, long rem, double partial) -> void {
      if (level + 2 == n) {
        const auto& ta = term[level];
        const auto& tb = term[level + 1];
        for (long c = 0; c <= rem; ++c) {
          const double value = partial + ta[static_cast<std::size_t>(c)] +
                               tb[static_cast<std::size_t>(rem - c)];
          if (value > best) {
            best = value;
            best_counts = counts;
            best_counts[level] = c;
            best_counts[level + 1] = rem - c;
          }
        }
        return;
      }
      for (long c = 0; c <= rem; ++c) {
        counts[level] = c;
        self(self, level + 1, rem - c, partial + term[level][static_cast<std::size_t>(c)]);
      }
    };
    scan(scan, 0, m, 0.0);
  }

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(best_counts[i]) / static_cast<double>(m);
  }
  Allocation alloc(std::move(x));
  const double objective = evaluate_objective(p, alloc);
  return OracleResult{std::move(alloc), objective, OracleMethod::grid_search,
                      resolution, true};
}

struct CrossValidateOptions {
  double bisection_tol_sum = 1e-12;
  int bisection_max_iter = 200;
  double gradient_step = 0.1;
  int gradient_max_iter = 20000;
  double gradient_tol_improve = 1e-13;
  double grid_resolution = 1e-3;
};

struct MethodReport {
  std::string method;
  Allocation allocation;
  double objective;
  bool converged;
  double objective_gap_vs_closed;        // |objective - closed-form objective|
  double allocation_distance_vs_closed;  // max-norm distance
};

struct CrossValidationReport {
  std::vector<MethodReport> methods;  // methods[0] is the closed form
  double max_objective_gap;           // max over all method pairs
  double max_allocation_distance;
  double tolerance;
  bool passed;  // max_objective_gap <= tolerance
};

// Runs the closed form next to the selected oracles and reports the largest
// pairwise disagreement in objective value and allocation (max norm).
inline CrossValidationReport cross_validate(const ProblemInstance& p,
                                            std::span<const OracleMethod> methods,
                                            double tolerance,
                                            const CrossValidateOptions& options = {}) {
  if (methods.empty()) {
    throw std::invalid_argument("cross_validate: select at least one oracle");
  }
  if (!(tolerance > 0.0)) {
    throw std::domain_error("cross_validate: tolerance must be positive");
  }

  CrossValidationReport report;
  SolveResult closed = solve(p);
  report.methods.push_back(MethodReport{"closed_form", closed.allocation,
                                        closed.objective, true, 0.0, 0.0});

  for (OracleMethod m : methods) {
    OracleResult r = [&] {
      switch (m) {
        case OracleMethod::lambda_bisection:
          return solve_by_lambda_bisection(p, options.bisection_tol_sum,
                                           options.bisection_max_iter);
        case OracleMethod::projected_gradient:
          return solve_by_projected_gradient(p, options.gradient_step,
                                             options.gradient_max_iter,
                                             options.gradient_tol_improve);
        case OracleMethod::grid_search:
          return solve_by_grid_search(p, options.grid_resolution);
      }
      throw std::invalid_argument("cross_validate: unknown oracle method");
    }();
    MethodReport entry{to_string(m), std::move(r.allocation), r.objective,
                       r.converged, 0.0, 0.0};
    entry.objective_gap_vs_closed = std::abs(entry.objective - closed.objective);
    double dist = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
      dist = std::max(dist, std::abs(entry.allocation[i] - closed.allocation[i]));
    }
    entry.allocation_distance_vs_closed = dist;
    report.methods.push_back(std::move(entry));
  }

  report.max_objective_gap = 0.0;
  report.max_allocation_distance = 0.0;
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    for (std::size_t j = i + 1; j < report.methods.size(); ++j) {
      report.max_objective_gap =
          std::max(report.max_objective_gap,
                   std::abs(report.methods[i].objective - report.methods[j].objective));
      for (std::size_t c = 0; c < p.n(); ++c) {
        report.max_allocation_distance =
            std::max(report.max_allocation_distance,
                     std::abs(report.methods[i].allocation[c] -
                              report.methods[j].allocation[c]));
      }
    }
  }
  report.tolerance = tolerance;
  report.passed = report.max_objective_gap <= tolerance;
  return report;
}

}  // namespace waterfill
