#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <vector>

#include "waterfill/core.hpp"
#include "waterfill/solver.hpp"

// Deterministic instance generation and phase-level timing for the solver.
// The generator is fully pinned down (SplitMix64, published constants, fixed
// mapping to (0.01, 1]) so a port in any language reproduces the identical
// coefficient streams and the identical objective checksum.

namespace waterfill {

// SplitMix64 (Steele, Lea, Vigna 2014).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]: ((bits >> 11) + 1) * 2^-53.
  double next_unit() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Coefficient stream a_i = 0.01 + 0.99 * u_i with u_i uniform in (0, 1].
inline std::vector<double> generate_coefficients(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::domain_error("generate_coefficients: n must be >= 1");
  SplitMix64 rng(seed);
  std::vector<double> a(n);
  for (double& v : a) v = 0.01 + 0.99 * rng.next_unit();
  return a;
}

inline ProblemInstance generate_instance(std::size_t n, std::uint64_t seed) {
  return ProblemInstance(generate_coefficients(n, seed));
}

// FNV-1a 64 over the little-endian bytes of a double.
inline std::uint64_t fnv1a_accumulate(std::uint64_t hash, double value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  for (int byte = 0; byte < 8; ++byte) {
    hash ^= (bits >> (8 * byte)) & 0xFFULL;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

inline constexpr std::uint64_t kFnv1aOffsetBasis = 0xCBF29CE484222325ULL;

struct PhaseTimings {
  std::uint64_t sort_ns;        // instance construction (validate + sort)
  std::uint64_t ratios_ns;      // e-ratio computation
  std::uint64_t kstar_ns;       // active prefix scan
  std::uint64_t allocation_ns;  // closed form + unpermute
  std::uint64_t total_ns() const {
    return sort_ns + ratios_ns + kstar_ns + allocation_ns;
  }
};

struct BenchReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<PhaseTimings> per_rep;
  std::uint64_t total_min_ns = 0;
  std::uint64_t total_median_ns = 0;
  std::uint64_t total_max_ns = 0;
  std::uint64_t objective_checksum = 0;  // FNV-1a over objective bit patterns
};

// Raised when a benchmark rep fails its KKT certificate; timing a wrong
// answer is worthless.
struct BenchVerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Times each solver phase separately over `reps` fresh instances (rep r uses
// seed + r) and certifies every result with kkt_check at (1e-7, 1e-9).
inline BenchReport run_bench(std::size_t n, std::size_t reps, std::uint64_t seed) {
  if (n == 0) throw std::domain_error("run_bench: n must be >= 1");
  if (reps == 0) throw std::domain_error("run_bench: reps must be >= 1");

  using clock = std::chrono::steady_clock;
  const auto elapsed_ns = [](clock::time_point from, clock::time_point to) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count());
  };

  BenchReport report;
  report.n = n;
  report.reps = reps;
  report.seed = seed;
  report.per_rep.reserve(reps);
  report.objective_checksum = kFnv1aOffsetBasis;

  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::vector<double> coefficients = generate_coefficients(n, seed + rep);

    const auto t0 = clock::now();
    ProblemInstance instance(std::move(coefficients));
    const auto t1 = clock::now();
    RatioVector ratios = normalized_ratios(instance);
    const auto t2 = clock::now();
    const std::size_t k = active_set_size(ratios);
    const auto t3 = clock::now();
    Allocation sorted_x = closed_form_allocation(ratios, k);
    std::vector<double> original(n);
    const auto& rank = instance.sort_perm();
    for (std::size_t i = 0; i < n; ++i) original[i] = sorted_x[rank[i]];
    Allocation x(std::move(original));
    const auto t4 = clock::now();

    const KktReport kkt = kkt_check(instance, x, 1e-7, 1e-9);
    if (!kkt.passed) {
      throw BenchVerificationError(
          "run_bench: KKT certificate failed at n = " + std::to_string(n) +
          ", seed = " + std::to_string(seed + rep));
    }
    report.objective_checksum =
        fnv1a_accumulate(report.objective_checksum, evaluate_objective(instance, x));

    report.per_rep.push_back(PhaseTimings{elapsed_ns(t0, t1), elapsed_ns(t1, t2),
                                          elapsed_ns(t2, t3), elapsed_ns(t3, t4)});
  }

  std::vector<std::uint64_t> totals(reps);
  for (std::size_t rep = 0; rep < reps; ++rep) totals[rep] = report.per_rep[rep].total_ns();
  std::sort(totals.begin(), totals.end());
  report.total_min_ns = totals.front();
  report.total_median_ns = totals[reps / 2];
  report.total_max_ns = totals.back();
  return report;
}

}  // namespace waterfill
