#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Core model for the separable concave allocation problem
//
//   maximize F(x) = sum_i a_i * x_i / (1 + x_i)
//   subject to x in the probability simplex { x_i >= 0, sum_i x_i = 1 }.
//
// Each term has strictly diminishing marginal utility g_i'(x) = a_i/(1+x)^2,
// so at the optimum all funded coordinates share one marginal value and
// every unfunded coordinate's marginal at zero stays below it.

namespace waterfill {

namespace detail {

// Neumaier-compensated accumulator; keeps rounding at O(eps) regardless of
// the number of terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> v) {
  CompensatedSum acc;
  for (double x : v) acc.add(x);
  return acc.value();
}

}  // namespace detail

// Simplex sum tolerance: 1e-12 at everyday sizes, relaxing with n once
// accumulated rounding alone can reach that level.
inline double allocation_sum_tolerance(std::size_t n) {
  return std::max(1e-12, 8.0 * static_cast<double>(n) *
                             std::numeric_limits<double>::epsilon());
}

// Positive coefficient vector with descending-sort bookkeeping.
// sort_perm()[i] is the rank of a[i] in descending order; the sort is stable,
// so tied coefficients keep their input order. sorted_coefficients() is a
// non-increasing.
class ProblemInstance {
 public:
  explicit ProblemInstance(std::vector<double> a) : a_(std::move(a)) {
    if (a_.empty()) {
      throw std::domain_error("ProblemInstance: coefficient vector is empty");
    }
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (!std::isfinite(a_[i]) || !(a_[i] > 0.0)) {
        throw std::domain_error("ProblemInstance: a[" + std::to_string(i) +
                                "] must be positive and finite");
      }
    }
    std::vector<std::size_t> order(a_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return a_[i] > a_[j];
    });
    rank_.resize(a_.size());
    sorted_.resize(a_.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank_[order[r]] = r;
      sorted_[r] = a_[order[r]];
    }
  }

  std::size_t n() const { return a_.size(); }
  const std::vector<double>& coefficients() const { return a_; }
  const std::vector<double>& sorted_coefficients() const { return sorted_; }
  // original index -> rank in descending order of a
  const std::vector<std::size_t>& sort_perm() const { return rank_; }
  double total() const { return detail::compensated_sum(a_); }

 private:
  std::vector<double> a_;
  std::vector<std::size_t> rank_;
  std::vector<double> sorted_;
};

// A point on the probability simplex. Construction validates and never
// renormalizes silently; use Allocation::normalized to rescale explicitly.
class Allocation {
 public:
  explicit Allocation(std::vector<double> x) : x_(std::move(x)) {
    if (x_.empty()) throw std::domain_error("Allocation: empty vector");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i]) || !(x_[i] >= 0.0)) {
        throw std::domain_error("Allocation: x[" + std::to_string(i) +
                                "] must be nonnegative and finite");
      }
    }
    const double sum = detail::compensated_sum(x_);
    if (std::abs(sum - 1.0) > allocation_sum_tolerance(x_.size())) {
      throw std::domain_error("Allocation: components sum to " +
                              std::to_string(sum) + ", expected 1");
    }
  }

  // Explicit renormalization of a nonnegative vector with positive sum.
  static Allocation normalized(std::vector<double> x) {
    if (x.empty()) throw std::domain_error("Allocation: empty vector");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i]) || !(x[i] >= 0.0)) {
        throw std::domain_error("Allocation: x[" + std::to_string(i) +
                                "] must be nonnegative and finite");
      }
    }
    const double sum = detail::compensated_sum(x);
    if (!(sum > 0.0)) {
      throw std::domain_error("Allocation: cannot normalize a zero vector");
    }
    const double inv = 1.0 / sum;
    for (double& v : x) v *= inv;
    return Allocation(std::move(x));
  }

  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  const std::vector<double>& values() const { return x_; }
  auto begin() const { return x_.begin(); }
  auto end() const { return x_.end(); }

 private:
  std::vector<double> x_;
};

// Equimarginal certificate for a candidate allocation.
struct KktReport {
  double lambda;                  // mean marginal over the active set
  double max_active_deviation;    // max |g_i'(x_i) - lambda| over x_i > 0
  double max_inactive_violation;  // max(0, a_i - lambda) over x_i = 0
  bool passed;
};

namespace detail {

inline void check_lengths(std::size_t na, std::size_t nx) {
  if (na != nx) {
    throw std::invalid_argument("length mismatch: " + std::to_string(nx) +
                                " allocation components for " + std::to_string(na) +
                                " coefficients");
  }
}

}  // namespace detail

// Raw objective sum_i a_i x_i/(1+x_i). No simplex requirement; used for
// off-simplex probes such as finite differences.
inline double objective_value(std::span<const double> a, std::span<const double> x) {
  detail::check_lengths(a.size(), x.size());
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc.add(a[i] * x[i] / (1.0 + x[i]));
  }
  return acc.value();
}

// Raw min-form sum_i a_i/(1+x_i); objective + min-form = sum_i a_i.
inline double min_form_value(std::span<const double> a, std::span<const double> x) {
  detail::check_lengths(a.size(), x.size());
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc.add(a[i] / (1.0 + x[i]));
  }
  return acc.value();
}

// Raw marginal utilities g_i'(x_i) = a_i/(1+x_i)^2; at x = 0 this is a itself.
inline std::vector<double> marginal_utilities(std::span<const double> a,
                                              std::span<const double> x) {
  detail::check_lengths(a.size(), x.size());
  std::vector<double> g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = 1.0 + x[i];
    g[i] = a[i] / (d * d);
  }
  return g;
}

inline double evaluate_objective(const ProblemInstance& p, const Allocation& x) {
  return objective_value(p.coefficients(), x.values());
}

inline double evaluate_min_form(const ProblemInstance& p, const Allocation& x) {
  return min_form_value(p.coefficients(), x.values());
}

inline std::vector<double> marginal_utilities(const ProblemInstance& p,
                                              const Allocation& x) {
  return marginal_utilities(std::span<const double>(p.coefficients()),
                            std::span<const double>(x.values()));
}

// Re-derives the objective through the mixing story instead of the formula:
// cup i holds tea mass a_i in unit volume, receives x_i water, and returns
// volume x_i of the diluted mix. The returned volumes combine into one unit
// whose concentration equals F(x).
//
// The arithmetic is valid for any positive a_i, but with some a_i > 1 the
// result is no longer a physical concentration; *physical_reading is cleared
// in that case.
inline double simulate_mixing(const ProblemInstance& p, const Allocation& x,
                              bool* physical_reading = nullptr) {
  detail::check_lengths(p.n(), x.size());
  const auto& a = p.coefficients();
  if (physical_reading) {
    *physical_reading =
        std::all_of(a.begin(), a.end(), [](double v) { return v <= 1.0; });
  }
  detail::CompensatedSum mass;
  detail::CompensatedSum volume;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double cup_volume = 1.0 + x[i];          // one unit of tea plus x_i water
    const double withdrawn_share = x[i] / cup_volume;
    mass.add(a[i] * withdrawn_share);              // tea mass leaving cup i
    volume.add(x[i]);
  }
  return mass.value() / volume.value();
}

// Checks the equimarginal conditions at the tolerances supplied: funded
// coordinates (x_i > zero_threshold) must share the mean marginal lambda to
// tol_active, and every unfunded coordinate needs a_i <= lambda + tol_inactive.
inline KktReport kkt_check(const ProblemInstance& p, const Allocation& x,
                           double tol_active, double tol_inactive,
                           double zero_threshold = 1e-12) {
  detail::check_lengths(p.n(), x.size());
  if (!(tol_active > 0.0) || !(tol_inactive > 0.0)) {
    throw std::domain_error("kkt_check: tolerances must be positive");
  }
  const auto& a = p.coefficients();
  const std::vector<double> g =
      marginal_utilities(std::span<const double>(a), std::span<const double>(x.values()));

  detail::CompensatedSum active_sum;
  std::size_t active_count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (x[i] > zero_threshold) {
      active_sum.add(g[i]);
      ++active_count;
    }
  }
  if (active_count == 0) {
    throw std::domain_error(
        "kkt_check: empty active set (zero_threshold excludes every coordinate)");
  }
  const double lambda = active_sum.value() / static_cast<double>(active_count);

  double max_active_deviation = 0.0;
  double max_inactive_violation = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (x[i] > zero_threshold) {
      max_active_deviation = std::max(max_active_deviation, std::abs(g[i] - lambda));
    } else {
      max_inactive_violation = std::max(max_inactive_violation, a[i] - lambda);
    }
  }
  max_inactive_violation = std::max(0.0, max_inactive_violation);

  KktReport report;
  report.lambda = lambda;
  report.max_active_deviation = max_active_deviation;
  report.max_inactive_violation = max_inactive_violation;
  report.passed = max_active_deviation <= tol_active &&
                  max_inactive_violation <= tol_inactive;
  return report;
}

}  // namespace waterfill
