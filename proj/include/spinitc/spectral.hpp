#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "spinitc/core.hpp"

// Symmetric eigendecomposition, propagators e^{-iHt}, and time-domain
// transfer probabilities p(i,j,t) = |<j|e^{-iHt}|i>|^2.

namespace spinitc {

struct Spectrum {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, eigenvectors.col(k) <-> eigenvalues(k)
  // Half-open ranges [begin, end) of indices sharing an eigenvalue up to
  // tol_degenerate; adjacent groups are separated by a larger gap.
  std::vector<std::pair<int, int>> groups;
  double tol_degenerate = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double spectral_norm() const {
    return size() == 0 ? 0.0
                       : std::max(std::abs(eigenvalues(0)), std::abs(eigenvalues(size() - 1)));
  }
};

// Gap-based grouping of an ascending eigenvalue list.
inline std::vector<std::pair<int, int>> group_eigenvalues(const Vector& ascending, double tol) {
  std::vector<std::pair<int, int>> groups;
  const int n = static_cast<int>(ascending.size());
  int begin = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || ascending(k) - ascending(k - 1) > tol) {
      groups.emplace_back(begin, k);
      begin = k;
    }
  }
  return groups;
}

// tol_degenerate <= 0 selects the default 1e-9 * ||H||_2.
inline Spectrum eigendecompose(const Matrix& h, double tol_degenerate = -1.0) {
  if (h.rows() != h.cols() || h.rows() == 0) throw invalid_input("hamiltonian must be square");
  const double scale = h.cwiseAbs().maxCoeff();
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw invalid_input("hamiltonian must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw numerical_error("symmetric eigensolver failed to converge");
  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.tol_degenerate = tol_degenerate > 0.0 ? tol_degenerate : 1e-9 * s.spectral_norm();
  s.groups = group_eigenvalues(s.eigenvalues, s.tol_degenerate);
  return s;
}

// U(t) = sum_k e^{-i lambda_k t} v_k v_k^T.
inline CMatrix propagator(const Spectrum& s, double t) {
  if (t < 0.0) throw invalid_input("propagation time must be >= 0");
  const int n = s.size();
  CVector phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, -s.eigenvalues(k) * t);
  return (s.eigenvectors.cast<Complex>() * phases.asDiagonal()) *
         s.eigenvectors.transpose().cast<Complex>();
}

namespace detail {
inline void check_pair(const Spectrum& s, int i, int j) {
  if (i < 0 || j < 0 || i >= s.size() || j >= s.size())
    throw invalid_input("node index out of range");
}
}  // namespace detail

inline double transfer_probability(const Spectrum& s, int i, int j, double t) {
  detail::check_pair(s, i, j);
  if (t < 0.0) throw invalid_input("time must be >= 0");
  if (t == 0.0) return i == j ? 1.0 : 0.0;  // the propagator at t = 0 is the identity
  Complex amp = 0.0;
  for (int k = 0; k < s.size(); ++k)
    amp += s.eigenvectors(i, k) * s.eigenvectors(j, k) * std::polar(1.0, -s.eigenvalues(k) * t);
  return std::min(1.0, std::norm(amp));
}

// Samples p(i,j,t) on the grid {0, dt, 2dt, ..., t_max}.
inline std::vector<std::pair<double, double>> probability_time_series(const Spectrum& s, int i,
                                                                      int j, double t_max,
                                                                      double dt) {
  detail::check_pair(s, i, j);
  if (!(dt > 0.0) || !(t_max > 0.0) || dt > t_max)
    throw invalid_input("need 0 < dt <= t_max");
  const auto steps = static_cast<std::int64_t>(std::floor(t_max / dt + 1e-9));
  std::vector<std::pair<double, double>> series(static_cast<std::size_t>(steps) + 1);
  parallel_for(steps + 1, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t q = lo; q < hi; ++q) {
      const double t = static_cast<double>(q) * dt;
      series[static_cast<std::size_t>(q)] = {t, transfer_probability(s, i, j, t)};
    }
  });
  return series;
}

}  // namespace spinitc
