#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spinitc/core.hpp"
#include "spinitc/model.hpp"
#include "spinitc/spectral.hpp"

// Maximum information transfer capacity. The time-dependent amplitude
// <j|e^{-iHt}|i> is bounded by sum_g |<i|P_g|j>| over distinct-eigenvalue
// projectors P_g, so p_max(i,j) = (sum_g |<i|P_g|j>|)^2 caps p(i,j,t) for all
// t, and d(i,j) = -ln p_max(i,j) behaves as a transfer distance.

namespace spinitc {

inline double max_transfer_probability(const Spectrum& s, int i, int j) {
  detail::check_pair(s, i, j);
  // The diagonal projector entries are nonnegative and sum to 1 across groups,
  // so the bound is exactly 1 for a node against itself.
  if (i == j) return 1.0;
  double total = 0.0;
  for (const auto& [begin, end] : s.groups) {
    double overlap = 0.0;
    for (int k = begin; k < end; ++k) overlap += s.eigenvectors(i, k) * s.eigenvectors(j, k);
    total += std::abs(overlap);
  }
  const double p = total * total;
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

inline double itc_distance(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw invalid_input("probability must lie in [0, 1]");
  if (p == 0.0) return kInf;
  const double d = -std::log(p);
  return d < 0.0 ? 0.0 : d;
}

struct ITCMatrix {
  int n = 0;
  Matrix p_max;  // symmetric, unit diagonal
  Matrix dist;   // -ln p_max, +inf where p_max = 0, zero diagonal
};

inline ITCMatrix itc_matrix(const SpinNetwork& net, double tol_degenerate = -1.0) {
  const Spectrum s = eigendecompose(single_excitation_hamiltonian(net), tol_degenerate);
  ITCMatrix m;
  m.n = net.n;
  m.p_max = Matrix::Ones(net.n, net.n);
  m.dist = Matrix::Zero(net.n, net.n);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(net.n) * (net.n - 1) / 2);
  for (int i = 0; i < net.n; ++i)
    for (int j = i + 1; j < net.n; ++j) pairs.emplace_back(i, j);
  parallel_for(static_cast<std::int64_t>(pairs.size()), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t q = lo; q < hi; ++q) {
      const auto [i, j] = pairs[static_cast<std::size_t>(q)];
      const double p = max_transfer_probability(s, i, j);
      m.p_max(i, j) = m.p_max(j, i) = p;
      m.dist(i, j) = m.dist(j, i) = itc_distance(p);
    }
  });
  return m;
}

// p_max(i,j) minus the best probability seen on the grid {0, dt, ..., t_max}.
// Nonnegative up to roundoff for any grid, by the amplitude bound.
inline double verify_bound_by_scan(const Spectrum& s, int i, int j, double t_max, double dt) {
  detail::check_pair(s, i, j);
  if (!(t_max > 0.0) || !(dt > 0.0)) throw invalid_input("need t_max > 0 and dt > 0");
  const auto steps = static_cast<std::int64_t>(std::floor(t_max / dt + 1e-9));
  double best = 0.0;
  std::mutex guard;
  parallel_for(steps + 1, [&](std::int64_t lo, std::int64_t hi) {
    double local = 0.0;
    for (std::int64_t q = lo; q < hi; ++q)
      local = std::max(local, transfer_probability(s, i, j, static_cast<double>(q) * dt));
    std::lock_guard<std::mutex> hold(guard);
    best = std::max(best, local);
  });
  return max_transfer_probability(s, i, j) - best;
}

struct RationalRelation {
  std::vector<int> coefficients;  // one per input value, plus a trailing unit slot when present
  double residual = 0.0;
};

// Bounded search for integer relations sum_k m_k (lambda_k / pi) + m_0 = 0.
// An empty result certifies only that no relation of height <= max_coeff
// exists; it is evidence of rational independence, not a proof. Relations are
// canonicalized so the first nonzero coefficient is positive and are returned
// in lexicographic enumeration order.
inline std::vector<RationalRelation> rational_independence_check(
    const std::vector<double>& eigenvalues, bool include_unit = false, int max_coeff = 5,
    double tol_relation = 1e-9, double budget = 1e8) {
  if (eigenvalues.empty()) throw invalid_input("need at least one eigenvalue");
  if (max_coeff < 1) throw invalid_input("max_coeff must be >= 1");
  if (!(tol_relation > 0.0)) throw invalid_input("tol_relation must be positive");

  std::vector<double> x;
  x.reserve(eigenvalues.size() + 1);
  for (double lambda : eigenvalues) x.push_back(lambda / M_PI);
  if (include_unit) x.push_back(1.0);
  const int d = static_cast<int>(x.size());

  const double space = std::pow(2.0 * max_coeff + 1.0, d);
  if (space > budget)
    throw budget_exceeded("relation search over " + std::to_string(space) +
                          " vectors exceeds budget " + std::to_string(budget) +
                          "; lower max_coeff");

  std::vector<RationalRelation> found;
  std::vector<int> m(static_cast<std::size_t>(d), -max_coeff);
  for (;;) {
    int first = 0;
    while (first < d && m[static_cast<std::size_t>(first)] == 0) ++first;
    if (first < d && m[static_cast<std::size_t>(first)] > 0) {
      double sum = 0.0;
      for (int k = 0; k < d; ++k) sum += m[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
      if (std::abs(sum) < tol_relation) found.push_back({m, std::abs(sum)});
    }
    int pos = d - 1;
    while (pos >= 0 && m[static_cast<std::size_t>(pos)] == max_coeff) {
      m[static_cast<std::size_t>(pos)] = -max_coeff;
      --pos;
    }
    if (pos < 0) break;
    ++m[static_cast<std::size_t>(pos)];
  }
  return found;
}

// Phase accuracy sufficient for an epsilon-close transfer: arcsin(eps / 2n).
inline double phase_tolerance(double epsilon, int n) {
  if (n < 1) throw invalid_input("n must be >= 1");
  if (!(epsilon > 0.0)) throw invalid_input("epsilon must be positive");
  const double ratio = epsilon / (2.0 * n);
  if (ratio > 1.0) throw invalid_input("epsilon/(2n) exceeds 1; arcsin undefined");
  return std::asin(ratio);
}

struct AttainmentResult {
  double t = 0.0;
  double p = 0.0;
  // One entry per distinct-eigenvalue group: circular distance between the
  // accumulated phase -lambda_g t (mod 2pi) and its target, pi when
  // <i|P_g|j> < 0 and 0 otherwise.
  std::vector<double> phase_residuals;
};

// First grid time whose transfer probability comes within epsilon of the cap.
inline std::optional<AttainmentResult> find_attainment_time(const Spectrum& s, int i, int j,
                                                            double epsilon, double t_max,
                                                            double dt) {
  detail::check_pair(s, i, j);
  if (!(epsilon > 0.0)) throw invalid_input("epsilon must be positive");
  if (!(t_max > 0.0) || !(dt > 0.0)) throw invalid_input("need t_max > 0 and dt > 0");
  const double cap = max_transfer_probability(s, i, j);
  const auto steps = static_cast<std::int64_t>(std::floor(t_max / dt + 1e-9));
  for (std::int64_t q = 0; q <= steps; ++q) {
    const double t = static_cast<double>(q) * dt;
    const double p = transfer_probability(s, i, j, t);
    if (cap - p < epsilon) {
      AttainmentResult r;
      r.t = t;
      r.p = p;
      constexpr double two_pi = 2.0 * M_PI;
      for (const auto& [begin, end] : s.groups) {
        double overlap = 0.0;
        for (int k = begin; k < end; ++k) overlap += s.eigenvectors(i, k) * s.eigenvectors(j, k);
        const double target = overlap < 0.0 ? M_PI : 0.0;
        double phase = std::fmod(-s.eigenvalues(begin) * t, two_pi);
        if (phase < 0.0) phase += two_pi;
        const double gap = std::abs(target - phase);
        r.phase_residuals.push_back(std::min(gap, two_pi - gap));
      }
      return r;
    }
  }
  return std::nullopt;
}

// Simultaneous-approximation constants: sqrt(5), sqrt(23)/2, the 1.7739 lower
// bound for n=3, and the closed Gamma-function formula from n=4 on.
inline double nowak_constant(int n) {
  if (n < 1) throw invalid_input("n must be >= 1");
  switch (n) {
    case 1: return std::sqrt(5.0);
    case 2: return std::sqrt(23.0) / 2.0;
    case 3: return 1.7739;
    default: {
      const double nn = n;
      const double log_c = 0.5 * (nn + 1.0) * std::log(nn + 1.0) - 0.5 * nn * std::log(nn) +
                           0.5 * (nn + 1.0) * std::log(M_PI / 2.0) - std::lgamma(0.5 * (nn + 5.0));
      return std::exp(log_c);
    }
  }
}

struct TimeEstimate {
  double steps = 0.0;   // +inf when overflowed
  bool overflow = false;
};

// Expected number of discrete translation steps before all n phases align to
// within epsilon: pi^n / (c_n eps^n), evaluated in log space so the overflow
// case degrades to a flagged +inf instead of undefined behaviour.
inline TimeEstimate attainment_time_estimate(double epsilon, int n) {
  if (!(epsilon > 0.0)) throw invalid_input("epsilon must be positive");
  if (n < 1) throw invalid_input("n must be >= 1");
  const double log_steps =
      n * std::log(M_PI) - std::log(nowak_constant(n)) - n * std::log(epsilon);
  TimeEstimate e;
  if (log_steps >= std::log(std::numeric_limits<double>::max())) {
    e.steps = kInf;
    e.overflow = true;
  } else {
    e.steps = std::exp(log_steps);
  }
  return e;
}

}  // namespace spinitc
