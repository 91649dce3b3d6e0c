#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "spinitc/core.hpp"
#include "spinitc/itc.hpp"
#include "spinitc/model.hpp"
#include "spinitc/spectral.hpp"

// Bang-bang control: the drift H0 alternates with H0 + H1 across segments,
// the first segment always free. Switching times are optimized by restarted
// Nelder-Mead over segment durations; the resulting unitary is summarized by
// an effective Hamiltonian -log(U)/t over the principal branch, whose own ITC
// can beat the free-evolution cap.

namespace spinitc {

struct ControlSequence {
  int site = -1;          // metadata stamped by callers that know the control site
  double strength = 0.0;  // ditto
  // Segment boundaries t_1 < ... < t_M with t_0 = 0 implicit; the last entry
  // is final_time. Empty means free evolution over [0, final_time].
  std::vector<double> switch_times;
  double final_time = 0.0;
  double achieved_p = 0.0;
  std::uint64_t seed = 0;
};

// H1 = strength * e_site e_site^T. A sigma_z control on one spin acts in the
// single-excitation subspace as 2 e_c e_c^T - I; the -I is a global shift, so
// strength defaults to 2.
inline Matrix control_hamiltonian(const SpinNetwork& net, int site, double strength = 2.0) {
  if (site < 0 || site >= net.n) throw invalid_input("control site out of range");
  Matrix h1 = Matrix::Zero(net.n, net.n);
  h1(site, site) = strength;
  return h1;
}

namespace detail {

inline std::vector<double> segment_durations(const ControlSequence& seq) {
  if (seq.switch_times.empty()) {
    if (seq.final_time < 0.0) throw invalid_input("final_time must be >= 0");
    if (seq.final_time == 0.0) return {};
    return {seq.final_time};
  }
  if (!(seq.switch_times.front() > 0.0)) throw invalid_input("switch times must be positive");
  for (std::size_t k = 1; k < seq.switch_times.size(); ++k)
    if (!(seq.switch_times[k] > seq.switch_times[k - 1]))
      throw invalid_input("switch times must be strictly increasing");
  if (seq.final_time != seq.switch_times.back())
    throw invalid_input("final_time must equal the last switch time");
  std::vector<double> durations(seq.switch_times.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < seq.switch_times.size(); ++k) {
    durations[k] = seq.switch_times[k] - prev;
    prev = seq.switch_times[k];
  }
  return durations;
}

inline Matrix checked_sum(const Matrix& h0, const Matrix& h1) {
  if (h1.rows() != h0.rows() || h1.cols() != h0.cols())
    throw invalid_input("control Hamiltonian size mismatch");
  return h0 + h1;
}

// Cached eigendecompositions of H0 and H0 + H1; segments apply as
// V e^{-i Lambda d} V^T, to a state vector or as a full propagator.
struct SegmentEvolver {
  int n;
  Spectrum free_spec, ctrl_spec;

  SegmentEvolver(const Matrix& h0, const Matrix& h1)
      : n(static_cast<int>(h0.rows())),
        free_spec(eigendecompose(h0)),
        ctrl_spec(eigendecompose(checked_sum(h0, h1))) {}

  const Spectrum& spec(int parity) const { return parity == 0 ? free_spec : ctrl_spec; }

  void apply(CVector& psi, int parity, double duration) const {
    const Spectrum& s = spec(parity);
    CVector w = s.eigenvectors.transpose().cast<Complex>() * psi;
    for (int k = 0; k < n; ++k) w(k) *= std::polar(1.0, -s.eigenvalues(k) * duration);
    psi = s.eigenvectors.cast<Complex>() * w;
  }

  double probability(const std::vector<double>& durations, int i, int j) const {
    CVector psi = CVector::Zero(n);
    psi(i) = 1.0;
    for (std::size_t k = 0; k < durations.size(); ++k)
      apply(psi, static_cast<int>(k % 2), durations[k]);
    return std::min(1.0, std::norm(psi(j)));
  }
};

}  // namespace detail

inline CMatrix piecewise_evolution(const Matrix& h0, const Matrix& h1,
                                   const ControlSequence& seq) {
  const auto durations = detail::segment_durations(seq);
  const detail::SegmentEvolver evolver(h0, h1);
  CMatrix u = CMatrix::Identity(evolver.n, evolver.n);
  for (std::size_t k = 0; k < durations.size(); ++k) {
    const Spectrum& s = evolver.spec(static_cast<int>(k % 2));
    CVector phases(evolver.n);
    for (int q = 0; q < evolver.n; ++q)
      phases(q) = std::polar(1.0, -s.eigenvalues(q) * durations[k]);
    u = (s.eigenvectors.cast<Complex>() * phases.asDiagonal() *
         s.eigenvectors.transpose().cast<Complex>()) *
        u;
  }
  return u;
}

inline double controlled_transfer_probability(const Matrix& h0, const Matrix& h1,
                                              const ControlSequence& seq, int i, int j) {
  const auto durations = detail::segment_durations(seq);
  const detail::SegmentEvolver evolver(h0, h1);
  if (i < 0 || j < 0 || i >= evolver.n || j >= evolver.n)
    throw invalid_input("node index out of range");
  return evolver.probability(durations, i, j);
}

struct OptimizerConfig {
  int restarts = 20;
  std::uint64_t seed = 12345;
  int max_iterations = 1500;   // per Nelder-Mead run
  double ftol = 1e-13;         // simplex spread stop
  int polish_rounds = 6;       // restarted simplexes around the incumbent
  double duration_floor = 1e-10;
};

namespace detail {

// Standard Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2) from
// an axis-aligned simplex of the given step. Returns the best vertex.
template <class F>
std::pair<std::vector<double>, double> nelder_mead(const F& f, std::vector<double> x0,
                                                   double step, int max_iter, double ftol) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t k = 0; k < n; ++k) pts[k + 1][k] += step;
  std::vector<double> vals(n + 1);
  for (std::size_t k = 0; k <= n; ++k) vals[k] = f(pts[k]);

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t k = 0; k <= n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    {
      std::vector<std::vector<double>> p2(n + 1);
      std::vector<double> v2(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        p2[k] = std::move(pts[order[k]]);
        v2[k] = vals[order[k]];
      }
      pts = std::move(p2);
      vals = std::move(v2);
    }
    if (vals[n] - vals[0] < ftol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < n; ++c) centroid[c] += pts[k][c] / static_cast<double>(n);

    std::vector<double> xr(n), xe(n), xc(n);
    for (std::size_t c = 0; c < n; ++c) xr[c] = centroid[c] + (centroid[c] - pts[n][c]);
    const double fr = f(xr);
    if (fr < vals[0]) {
      for (std::size_t c = 0; c < n; ++c) xe[c] = centroid[c] + 2.0 * (centroid[c] - pts[n][c]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = std::move(xe);
        vals[n] = fe;
      } else {
        pts[n] = std::move(xr);
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = std::move(xr);
      vals[n] = fr;
    } else {
      for (std::size_t c = 0; c < n; ++c) xc[c] = centroid[c] + 0.5 * (pts[n][c] - centroid[c]);
      const double fc = f(xc);
      if (fc < vals[n]) {
        pts[n] = std::move(xc);
        vals[n] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t c = 0; c < n; ++c) pts[k][c] = pts[0][c] + 0.5 * (pts[k][c] - pts[0][c]);
          vals[k] = f(pts[k]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (vals[k] < vals[best]) best = k;
  return {pts[best], vals[best]};
}

// Iterated local search: rerun Nelder-Mead around the incumbent, halving the
// simplex step whenever a round stalls. A single simplex pass reliably
// plateaus well short of the attainable optimum on bang-bang landscapes.
template <class F>
std::pair<std::vector<double>, double> polish(const F& f, std::vector<double> x0,
                                              const OptimizerConfig& cfg) {
  std::vector<double> x = std::move(x0);
  double v = f(x);
  double step = 1.0;
  for (int round = 0; round < cfg.polish_rounds; ++round) {
    auto [x2, v2] = nelder_mead(f, x, step, cfg.max_iterations, cfg.ftol);
    if (v2 < v - 1e-12) {
      x = std::move(x2);
      v = v2;
    } else {
      step *= 0.5;
      if (step < 1e-4) break;
    }
  }
  return {x, v};
}

}  // namespace detail

// Maximizes the controlled transfer probability i -> j over segment durations
// (first segment free, parities alternating). Durations are unconstrained in
// sign (the objective uses |x|) and rescaled to the horizon when their sum
// exceeds it. segments = 0 degenerates to a free-evolution grid scan.
inline ControlSequence optimize_switching(const Matrix& h0, const Matrix& h1, int i, int j,
                                          int segments, double horizon,
                                          const OptimizerConfig& cfg = {}) {
  if (segments < 0) throw invalid_input("segments must be >= 0");
  if (!(horizon > 0.0)) throw invalid_input("horizon must be positive");
  if (cfg.restarts < 1) throw invalid_input("restarts must be >= 1");
  const detail::SegmentEvolver evolver(h0, h1);
  if (i < 0 || j < 0 || i >= evolver.n || j >= evolver.n)
    throw invalid_input("node index out of range");

  ControlSequence seq;
  seq.seed = cfg.seed;

  if (segments == 0) {
    const double dt = 0.01 / std::max(1.0, evolver.free_spec.spectral_norm());
    const auto steps = static_cast<std::int64_t>(std::floor(horizon / dt + 1e-9));
    double best_p = -1.0, best_t = 0.0;
    for (std::int64_t q = 0; q <= steps; ++q) {
      const double t = static_cast<double>(q) * dt;
      const double p = transfer_probability(evolver.free_spec, i, j, t);
      if (p > best_p) {
        best_p = p;
        best_t = t;
      }
    }
    if (best_t > 0.0) seq.switch_times = {best_t};
    seq.final_time = best_t;
    seq.achieved_p = best_p;
    return seq;
  }

  const std::size_t m = static_cast<std::size_t>(segments);
  const auto objective = [&](const std::vector<double>& x) {
    std::vector<double> d(m);
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      d[k] = std::abs(x[k]);
      sum += d[k];
    }
    if (sum > horizon) {
      const double scale = horizon / sum;
      for (double& v : d) v *= scale;
    }
    return -evolver.probability(d, i, j);
  };

  std::vector<std::pair<std::vector<double>, double>> results(
      static_cast<std::size_t>(cfg.restarts));
  parallel_for(cfg.restarts, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      std::mt19937_64 rng = seeded_stream(cfg.seed, static_cast<std::uint64_t>(r));
      std::vector<double> x0(m);
      const double low = 0.2, high = 1.6 * horizon / static_cast<double>(m);
      for (std::size_t k = 0; k < m; ++k) x0[k] = low + uniform01(rng) * (high - low);
      results[static_cast<std::size_t>(r)] = detail::polish(objective, std::move(x0), cfg);
    }
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].second < results[best].second) best = r;

  // Recover the duration vector the objective actually evaluated.
  std::vector<double> d(m);
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    d[k] = std::abs(results[best].first[k]);
    sum += d[k];
  }
  if (sum > horizon)
    for (double& v : d) v *= horizon / sum;

  // Zero-length segments violate the strictly-increasing contract. Interior
  // ones are dropped with their neighbours merged (same parity after the
  // shift); the leading segment anchors the parity and is clamped instead.
  for (std::size_t k = 0; k < d.size();) {
    if (d[k] >= cfg.duration_floor) {
      ++k;
      continue;
    }
    if (k == 0) {
      d[0] = cfg.duration_floor;
      ++k;
    } else if (k + 1 == d.size()) {
      d.pop_back();
    } else {
      d[k - 1] += d[k + 1];
      d.erase(d.begin() + static_cast<std::ptrdiff_t>(k), d.begin() + static_cast<std::ptrdiff_t>(k) + 2);
      k = k - 1;
    }
  }
  if (d.size() == 1 && d[0] <= cfg.duration_floor) d.clear();

  // A zero-duration sequence is the do-nothing baseline; it wins for i = j
  // and on ties, so a degenerate optimum collapses to the simplest sequence.
  const double baseline = i == j ? 1.0 : 0.0;
  const double optimized = d.empty() ? baseline : evolver.probability(d, i, j);
  if (baseline >= optimized) d.clear();

  seq.switch_times.resize(d.size());
  double t = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    t += d[k];
    seq.switch_times[k] = t;
  }
  seq.final_time = t;
  seq.achieved_p = d.empty() ? baseline : evolver.probability(d, i, j);
  return seq;
}

struct EffectiveHamiltonian {
  CMatrix h_eff;
  double horizon = 0.0;
  bool branch_warning = false;  // some eigenphase within 1e-6 of the -pi cut
  double schur_offdiag = 0.0;   // normality residual of the input unitary
};

// H_eff = -log(U)/horizon over the principal branch, via complex Schur: a
// unitary U is normal, so its Schur form is diagonal and Q is exactly unitary
// (an eigenvector solver would not guarantee that).
inline EffectiveHamiltonian effective_hamiltonian(const CMatrix& u, double horizon) {
  if (u.rows() != u.cols() || u.rows() == 0) throw invalid_input("unitary must be square");
  if (!(horizon > 0.0)) throw invalid_input("horizon must be positive");
  const int n = static_cast<int>(u.rows());
  const double defect = (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > 1e-9)
    throw numerical_error("matrix is not unitary within 1e-9 (defect " + std::to_string(defect) +
                          ")");

  Eigen::ComplexSchur<CMatrix> schur(u, true);
  if (schur.info() != Eigen::Success) throw numerical_error("complex Schur decomposition failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& q = schur.matrixU();

  EffectiveHamiltonian eff;
  eff.horizon = horizon;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) eff.schur_offdiag = std::max(eff.schur_offdiag, std::abs(t(r, c)));
  if (eff.schur_offdiag > 1e-8)
    throw numerical_error("Schur form of the unitary is not diagonal; input is too far from normal");

  Vector theta(n);
  for (int k = 0; k < n; ++k) {
    double phase = std::arg(t(k, k));  // (-pi, pi], with -pi mapped up
    if (phase <= -M_PI) phase = M_PI;
    theta(k) = phase;
    if (M_PI - std::abs(phase) < 1e-6) eff.branch_warning = true;
  }
  CMatrix h = q * (-theta.cast<Complex>() / horizon).asDiagonal() * q.adjoint();
  eff.h_eff = 0.5 * (h + h.adjoint());
  return eff;
}

// exp(-i h t) for Hermitian h.
inline CMatrix hermitian_propagator(const CMatrix& h, double t) {
  if (h.rows() != h.cols() || h.rows() == 0) throw invalid_input("hamiltonian must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw invalid_input("hamiltonian must be Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw numerical_error("Hermitian eigensolver failed to converge");
  const int n = static_cast<int>(h.rows());
  CVector phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// Group-projector transfer bound of the effective Hamiltonian, with complex
// eigenvectors: p_eff(i,j) = (sum_g |<i|P_g|j>|)^2.
inline ITCMatrix effective_itc(const EffectiveHamiltonian& eff) {
  const CMatrix& h = eff.h_eff;
  if (h.rows() != h.cols() || h.rows() == 0) throw invalid_input("hamiltonian must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw invalid_input("effective Hamiltonian must be Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw numerical_error("Hermitian eigensolver failed to converge");
  const int n = static_cast<int>(h.rows());
  const Vector& lambda = solver.eigenvalues();
  const CMatrix& w = solver.eigenvectors();
  const double norm = std::max(std::abs(lambda(0)), std::abs(lambda(n - 1)));
  const auto groups = group_eigenvalues(lambda, 1e-9 * norm);

  ITCMatrix m;
  m.n = n;
  m.p_max = Matrix::Ones(n, n);
  m.dist = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double total = 0.0;
      for (const auto& [begin, end] : groups) {
        Complex overlap = 0.0;
        for (int k = begin; k < end; ++k) overlap += w(i, k) * std::conj(w(j, k));
        total += std::abs(overlap);
      }
      const double p = std::min(1.0, total * total);
      m.p_max(i, j) = m.p_max(j, i) = p;
      m.dist(i, j) = m.dist(j, i) = itc_distance(p);
    }
  }
  return m;
}

}  // namespace spinitc
