#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

// Common types and plumbing for the spin-network ITC toolkit.
// Node indices are 0-based everywhere in the library; the CLI layer is 1-based.

namespace spinitc {

inline constexpr const char* kVersion = "1.0.0";

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Caller-side contract violations: bad sizes, malformed specs, out-of-range
// indices, domain errors.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failures: eigensolver non-convergence, non-unitary input.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A metric whose anchored Gram matrix has a significantly negative eigenvalue.
struct non_euclidean_error : std::runtime_error {
  double most_negative;
  explicit non_euclidean_error(double eig)
      : std::runtime_error("metric not Euclidean-embeddable; most negative Gram eigenvalue = " +
                           std::to_string(eig)),
        most_negative(eig) {}
};

// A combinatorial search larger than its configured budget.
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Worker cap: hardware concurrency, optionally lowered by ITC_THREADS.
inline unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ITC_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) hw = std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

// Runs body(begin, end) over contiguous chunks of [0, count). Chunks are fixed
// by count and the thread budget, so per-chunk outputs reduced in chunk order
// give deterministic results.
template <class Body>
void parallel_for(std::int64_t count, Body&& body) {
  if (count <= 0) return;
  const std::int64_t workers =
      std::min<std::int64_t>(thread_budget(), count);
  if (workers <= 1) {
    body(std::int64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

// Uniform double in [0, 1) built directly from mt19937_64 output;
// std::uniform_real_distribution is implementation-defined and would break
// cross-platform run reproducibility.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stream seeded from (seed, stream index) so independent restarts or samplers
// never share state.
inline std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace spinitc
