#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "spinitc/core.hpp"
#include "spinitc/detail/union_find.hpp"
#include "spinitc/itc.hpp"

// Metric-space analysis of the ITC distance: equivalence classes of
// zero-distance nodes, the quotient metric over them, triangle-inequality
// audit, Gram-matrix embeddability (Schoenberg), 4-point Gromov delta, and
// inertia with gravity / anti-gravity centers.

namespace spinitc {

// Transitive closure of dist(i,j) <= zero_tol. Classes are sorted by smallest
// member, members ascending.
inline std::vector<std::vector<int>> equivalence_classes(const ITCMatrix& itc,
                                                         double zero_tol = 1e-6) {
  if (zero_tol < 0.0) throw invalid_input("zero_tol must be >= 0");
  detail::UnionFind uf(itc.n);
  for (int i = 0; i < itc.n; ++i)
    for (int j = i + 1; j < itc.n; ++j)
      if (itc.dist(i, j) <= zero_tol) uf.unite(i, j);
  std::map<int, std::vector<int>> by_root;
  for (int i = 0; i < itc.n; ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<int>> classes;
  classes.reserve(by_root.size());
  for (auto& [root, members] : by_root) classes.push_back(std::move(members));
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return classes;
}

struct QuotientMetric {
  std::vector<std::vector<int>> classes;
  Matrix dist;            // class-level, block means of node distances
  double zero_tol = 0.0;  // tolerance the classes were formed with
  double max_spread = 0.0;
  bool spread_warning = false;  // some block spread exceeded 10 * zero_tol
};

inline QuotientMetric quotient_metric(const ITCMatrix& itc,
                                      const std::vector<std::vector<int>>& classes,
                                      double zero_tol = 1e-6) {
  std::vector<int> seen(static_cast<std::size_t>(itc.n), 0);
  for (const auto& cls : classes) {
    if (cls.empty()) throw invalid_input("classes must be nonempty");
    for (int u : cls) {
      if (u < 0 || u >= itc.n) throw invalid_input("class member out of range");
      ++seen[static_cast<std::size_t>(u)];
    }
  }
  for (int count : seen)
    if (count != 1) throw invalid_input("classes must partition the node set");

  const int m = static_cast<int>(classes.size());
  QuotientMetric q;
  q.classes = classes;
  q.zero_tol = zero_tol;
  q.dist = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      double sum = 0.0, lo = kInf, hi = -kInf;
      for (int u : classes[static_cast<std::size_t>(a)]) {
        for (int v : classes[static_cast<std::size_t>(b)]) {
          const double d = itc.dist(u, v);
          sum += d;
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
      }
      const auto count = static_cast<double>(classes[static_cast<std::size_t>(a)].size() *
                                             classes[static_cast<std::size_t>(b)].size());
      q.dist(a, b) = q.dist(b, a) = sum / count;
      q.max_spread = std::max(q.max_spread, hi - lo);
    }
  }
  q.spread_warning = q.max_spread > 10.0 * zero_tol;
  return q;
}

struct TriangleViolation {
  int i = 0, j = 0, k = 0;
  double excess = 0.0;
};

struct TriangleAudit {
  double min_excess = kInf;  // +inf when fewer than 3 finite-distance points
  std::vector<TriangleViolation> violations;
  std::int64_t triples = 0;  // ordered distinct triples evaluated
};

// D_ijk = d(i,k) + d(j,k) - d(i,j) over ordered distinct triples; violations
// are D < -tol. Triples touching a +inf sentinel are skipped.
inline TriangleAudit triangle_audit(const Matrix& dist, double tol = 1e-9) {
  if (dist.rows() != dist.cols()) throw invalid_input("distance matrix must be square");
  const int m = static_cast<int>(dist.rows());
  TriangleAudit audit;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        const double d_ik = dist(i, k), d_jk = dist(j, k), d_ij = dist(i, j);
        if (!std::isfinite(d_ik) || !std::isfinite(d_jk) || !std::isfinite(d_ij)) continue;
        const double excess = d_ik + d_jk - d_ij;
        ++audit.triples;
        audit.min_excess = std::min(audit.min_excess, excess);
        if (excess < -tol) audit.violations.push_back({i, j, k, excess});
      }
    }
  }
  return audit;
}

// G(p,q) = (d(p,a)^2 + d(q,a)^2 - d(p,q)^2) / 2 over the non-anchor points;
// anchor -1 selects the last point.
inline Matrix gram_matrix(const Matrix& dist, int anchor = -1) {
  if (dist.rows() != dist.cols() || dist.rows() < 1)
    throw invalid_input("distance matrix must be square and nonempty");
  const int m = static_cast<int>(dist.rows());
  if (anchor == -1) anchor = m - 1;
  if (anchor < 0 || anchor >= m) throw invalid_input("anchor out of range");
  if (!dist.allFinite()) throw invalid_input("gram matrix needs finite distances");
  std::vector<int> pts;
  pts.reserve(static_cast<std::size_t>(m) - 1);
  for (int p = 0; p < m; ++p)
    if (p != anchor) pts.push_back(p);
  Matrix g(m - 1, m - 1);
  for (int p = 0; p < m - 1; ++p) {
    for (int q = p; q < m - 1; ++q) {
      const int u = pts[static_cast<std::size_t>(p)], v = pts[static_cast<std::size_t>(q)];
      const double value =
          0.5 * (dist(u, anchor) * dist(u, anchor) + dist(v, anchor) * dist(v, anchor) -
                 dist(u, v) * dist(u, v));
      g(p, q) = g(q, p) = value;
    }
  }
  return g;
}

struct Embedding {
  int dim = 0;
  Matrix coordinates;       // one row per non-anchor point, dim columns,
                            // principal axes first; the anchor sits at the origin
  Vector gram_eigenvalues;  // ascending
};

// Schoenberg criterion: the metric embeds in Euclidean space iff the anchored
// Gram matrix is PSD. Eigenvalues below -rank_tol * lambda_max fail the check.
inline Embedding embedding_dimension(const Matrix& gram, double rank_tol = 1e-8) {
  if (gram.rows() != gram.cols()) throw invalid_input("gram matrix must be square");
  if (!(rank_tol >= 0.0)) throw invalid_input("rank_tol must be >= 0");
  const int m = static_cast<int>(gram.rows());
  Embedding e;
  if (m == 0) {
    e.coordinates = Matrix(0, 0);
    e.gram_eigenvalues = Vector(0);
    return e;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success)
    throw numerical_error("symmetric eigensolver failed on the Gram matrix");
  e.gram_eigenvalues = solver.eigenvalues();
  const double lambda_max = e.gram_eigenvalues(m - 1);
  const double scale = std::max(lambda_max, 0.0);
  const double lambda_min = e.gram_eigenvalues(0);
  if (lambda_min < -rank_tol * scale) throw non_euclidean_error(lambda_min);
  const double keep = rank_tol * scale;
  std::vector<int> retained;
  for (int k = m - 1; k >= 0; --k)
    if (e.gram_eigenvalues(k) > keep) retained.push_back(k);
  e.dim = static_cast<int>(retained.size());
  e.coordinates = Matrix::Zero(m, e.dim);
  for (int c = 0; c < e.dim; ++c) {
    const int k = retained[static_cast<std::size_t>(c)];
    e.coordinates.col(c) = solver.eigenvectors().col(k) * std::sqrt(e.gram_eigenvalues(k));
  }
  return e;
}

struct GromovQuad {
  int w = 0, x = 0, y = 0, z = 0;
  double l = 0.0, m = 0.0, s = 0.0;  // opposite-pair sums, L >= M >= S
  double delta = 0.0;                // (L - M) / 2
  double scaled = 0.0;               // delta / (L + M + S), 0 when the sums vanish
};

struct GromovReport {
  double delta_max = 0.0;
  double scaled_delta_max = 0.0;
  std::int64_t quadruple_count = 0;
  bool sampled = false;  // budget forced uniform sampling; maxima are lower bounds
  GromovQuad best;         // argmax of delta
  GromovQuad best_scaled;  // argmax of scaled delta
  std::vector<GromovQuad> records;
};

namespace detail {
inline GromovQuad gromov_quad(const Matrix& dist, int w, int x, int y, int z) {
  GromovQuad q;
  q.w = w, q.x = x, q.y = y, q.z = z;
  double sums[3] = {dist(w, x) + dist(y, z), dist(w, y) + dist(x, z), dist(w, z) + dist(x, y)};
  std::sort(sums, sums + 3, std::greater<double>());
  q.l = sums[0], q.m = sums[1], q.s = sums[2];
  q.delta = 0.5 * (q.l - q.m);
  const double g = q.l + q.m + q.s;
  q.scaled = g > 0.0 ? q.delta / g : 0.0;
  return q;
}
}  // namespace detail

// Exhaustive over all C(m,4) quadruples when that fits the budget, otherwise
// uniform random quadruples (flagged; sampled maxima only bound delta_max from
// below). Quadruples touching a +inf sentinel are skipped.
inline GromovReport gromov_delta(const Matrix& dist, std::int64_t sample_budget = 2000000,
                                 std::uint64_t seed = 12345) {
  if (dist.rows() != dist.cols()) throw invalid_input("distance matrix must be square");
  if (sample_budget < 1) throw invalid_input("sample_budget must be >= 1");
  const int m = static_cast<int>(dist.rows());
  GromovReport report;
  if (m < 4) return report;

  auto admit = [&](const GromovQuad& q) {
    if (!std::isfinite(q.l)) return;  // l is the largest sum, so it sees any inf
    if (report.records.empty() || q.delta > report.delta_max) {
      report.delta_max = q.delta;
      report.best = q;
    }
    if (report.records.empty() || q.scaled > report.scaled_delta_max) {
      report.scaled_delta_max = q.scaled;
      report.best_scaled = q;
    }
    report.records.push_back(q);
  };

  const double exhaustive_count =
      static_cast<double>(m) * (m - 1) * (m - 2) * (m - 3) / 24.0;
  if (exhaustive_count <= static_cast<double>(sample_budget)) {
    report.records.reserve(static_cast<std::size_t>(exhaustive_count));
    for (int w = 0; w < m; ++w)
      for (int x = w + 1; x < m; ++x)
        for (int y = x + 1; y < m; ++y)
          for (int z = y + 1; z < m; ++z) admit(detail::gromov_quad(dist, w, x, y, z));
  } else {
    report.sampled = true;
    report.records.reserve(static_cast<std::size_t>(sample_budget));
    std::mt19937_64 rng = seeded_stream(seed, 0);
    for (std::int64_t draw = 0; draw < sample_budget; ++draw) {
      int idx[4];
      for (;;) {
        for (int& v : idx) v = static_cast<int>(uniform01(rng) * m);
        std::sort(idx, idx + 4);
        if (idx[0] != idx[1] && idx[1] != idx[2] && idx[2] != idx[3]) break;
      }
      admit(detail::gromov_quad(dist, idx[0], idx[1], idx[2], idx[3]));
    }
  }
  report.quadruple_count = static_cast<std::int64_t>(report.records.size());
  return report;
}

struct InertiaReport {
  double alpha = 2.0;
  Vector inertia;                        // I(i) = sum_{j != i} d(i,j)^alpha
  std::vector<int> gravity_centers;      // argmin set, 1e-9 absolute ties
  std::vector<int> anti_gravity_centers; // argmax set
  std::int64_t skipped_infinite = 0;     // +inf distances excluded from the sums
};

inline InertiaReport inertia(const Matrix& dist, double alpha = 2.0) {
  if (dist.rows() != dist.cols()) throw invalid_input("distance matrix must be square");
  if (!(alpha >= 1.0)) throw invalid_input("alpha must be >= 1");
  const int n = static_cast<int>(dist.rows());
  InertiaReport report;
  report.alpha = alpha;
  report.inertia = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = dist(i, j);
      if (!std::isfinite(d)) {
        ++report.skipped_infinite;
        continue;
      }
      report.inertia(i) += std::pow(d, alpha);
    }
  }
  const double lo = report.inertia.minCoeff();
  const double hi = report.inertia.maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (report.inertia(i) <= lo + 1e-9) report.gravity_centers.push_back(i);
    if (report.inertia(i) >= hi - 1e-9) report.anti_gravity_centers.push_back(i);
  }
  return report;
}

}  // namespace spinitc
