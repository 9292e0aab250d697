#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "waterfill/core.hpp"

// Closed-form active-set solver.
//
// Sort the coefficients descending and put e_i = sqrt(a_(i)/a_(1)). The
// optimum funds a prefix of coordinates: the active count is
//
//   k* = max{ 2 <= j <= n : j * e_j > e_1 + ... + e_{j-1} }   (1 if none),
//
// and with S = e_1 + ... + e_{k*} the funded components are
// x_j = ((k*+1) e_j - S) / S. Funded marginals all equal
// lambda = a_(1) (S/(k*+1))^2, which is what kkt_check certifies.

namespace waterfill {

// Square-root coefficient ratios over the descending view, e_1 pinned to
// exactly 1. Non-increasing with entries in (0, 1].
class RatioVector {
 public:
  explicit RatioVector(std::vector<double> e) : e_(std::move(e)) {
    if (e_.empty()) throw std::domain_error("RatioVector: empty vector");
    if (e_[0] != 1.0) throw std::domain_error("RatioVector: e[0] must be exactly 1");
    for (std::size_t i = 1; i < e_.size(); ++i) {
      if (!(e_[i] > 0.0) || e_[i] > 1.0) {
        throw std::domain_error("RatioVector: e[" + std::to_string(i) +
                                "] must lie in (0, 1]");
      }
      if (e_[i] > e_[i - 1]) {
        throw std::domain_error("RatioVector: entries must be non-increasing");
      }
    }
  }

  std::size_t size() const { return e_.size(); }
  double operator[](std::size_t i) const { return e_[i]; }
  const std::vector<double>& values() const { return e_; }

 private:
  std::vector<double> e_;
};

inline RatioVector normalized_ratios(const ProblemInstance& p) {
  const auto& s = p.sorted_coefficients();
  std::vector<double> e(s.size());
  e[0] = 1.0;  // pinned, not recomputed through sqrt
  for (std::size_t i = 1; i < s.size(); ++i) {
    e[i] = std::sqrt(s[i] / s[0]);
  }
  return RatioVector(std::move(e));
}

// Forward pass of the prefix rule. Stopping at the first violating j is
// exact: S_{j-1} >= j e_j together with e_{j+1} <= e_j gives
// S_j >= (j+1) e_{j+1}, so later indices stay in violation. The comparison
// multiplies instead of dividing to avoid a rounding step.
inline std::size_t active_set_size(const RatioVector& e) {
  std::size_t k = 1;
  detail::CompensatedSum prefix;  // e_1 + ... + e_k
  prefix.add(1.0);
  for (std::size_t j = 2; j <= e.size(); ++j) {
    const double ej = e[j - 1];
    if (!(static_cast<double>(j) * ej > prefix.value())) break;
    prefix.add(ej);
    k = j;
  }
  return k;
}

// Closed-form allocation for active prefix k, in sorted order. The raw
// components already sum to 1 up to rounding; the final 1/sum scaling pins
// the simplex invariant exactly enough for Allocation while preserving
// zeros, ties, and ordering.
inline Allocation closed_form_allocation(const RatioVector& e, std::size_t k) {
  if (k < 1 || k > e.size()) {
    throw std::domain_error("closed_form_allocation: k must be in [1, n]");
  }
  detail::CompensatedSum s_acc;
  for (std::size_t j = 0; j < k; ++j) s_acc.add(e[j]);
  const double s = s_acc.value();
  const double kp1 = static_cast<double>(k + 1);

  std::vector<double> x(e.size(), 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double numer = kp1 * e[j] - s;
    if (numer < 0.0 && numer >= -1e-15) numer = 0.0;  // rounding dust at the boundary
    x[j] = numer / s;
  }
  const double sum = detail::compensated_sum(std::span<const double>(x.data(), k));
  const double inv = 1.0 / sum;
  for (std::size_t j = 0; j < k; ++j) x[j] *= inv;
  return Allocation(std::move(x));
}

struct SolveResult {
  Allocation allocation;         // in the caller's coefficient order
  std::size_t active_count;      // k*
  double objective;              // F at the allocation
  double lambda;                 // common marginal of the funded coordinates
  Allocation sorted_allocation;  // in descending-coefficient order
};

inline SolveResult solve(const ProblemInstance& p) {
  const RatioVector e = normalized_ratios(p);
  const std::size_t k = active_set_size(e);
  Allocation sorted_x = closed_form_allocation(e, k);

  std::vector<double> original(p.n());
  const auto& rank = p.sort_perm();
  for (std::size_t i = 0; i < p.n(); ++i) original[i] = sorted_x[rank[i]];
  Allocation x(std::move(original));

  detail::CompensatedSum s_acc;
  for (std::size_t j = 0; j < k; ++j) s_acc.add(e[j]);
  const double ratio = s_acc.value() / static_cast<double>(k + 1);
  const double lambda = p.sorted_coefficients()[0] * ratio * ratio;

  const double objective = evaluate_objective(p, x);
  return SolveResult{std::move(x), k, objective, lambda, std::move(sorted_x)};
}

inline SolveResult solve(std::vector<double> a) {
  return solve(ProblemInstance(std::move(a)));
}

// Explicit n = 2 solution; the second cup is funded exactly when a2 > a1/4.
inline std::pair<double, double> two_cup_solution(double a1, double a2) {
  if (!std::isfinite(a1) || !std::isfinite(a2) || !(a2 > 0.0) || !(a1 >= a2)) {
    throw std::domain_error("two_cup_solution: requires a1 >= a2 > 0");
  }
  if (!(a2 > a1 / 4.0)) return {1.0, 0.0};
  const double r1 = std::sqrt(a1);
  const double r2 = std::sqrt(a2);
  return {(2.0 * r1 - r2) / (r1 + r2), (2.0 * r2 - r1) / (r1 + r2)};
}

// Explicit n = 3 solution by branch on the active count.
inline std::array<double, 3> three_cup_solution(double a1, double a2, double a3) {
  if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3) ||
      !(a3 > 0.0) || !(a2 >= a3) || !(a1 >= a2)) {
    throw std::domain_error("three_cup_solution: requires a1 >= a2 >= a3 > 0");
  }
  const double e1 = 1.0;
  const double e2 = std::sqrt(a2 / a1);
  const double e3 = std::sqrt(a3 / a1);
  if (3.0 * e3 > e1 + e2) {
    const double s = e1 + e2 + e3;
    return {(3.0 * e1 - e2 - e3) / s, (3.0 * e2 - e1 - e3) / s,
            (3.0 * e3 - e1 - e2) / s};
  }
  if (2.0 * e2 > e1) {
    const double s = e1 + e2;
    return {(2.0 * e1 - e2) / s, (2.0 * e2 - e1) / s, 0.0};
  }
  return {1.0, 0.0, 0.0};
}

}  // namespace waterfill
