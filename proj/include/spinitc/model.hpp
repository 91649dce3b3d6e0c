#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "spinitc/core.hpp"

// Spin networks and their single-excitation-subspace Hamiltonians.
//
// In the single-excitation subspace both couplings share the off-diagonal
// H(i,j) = J(i,j); Heisenberg coupling adds the diagonal
// H(i,i) = -sum_m J(i,m). Any global shift c*I or positive rescaling of H
// leaves every maximum transfer probability unchanged, so the convention only
// fixes a gauge.

namespace spinitc {

enum class CouplingKind { XX, Heisenberg };

inline const char* to_string(CouplingKind k) {
  return k == CouplingKind::XX ? "xx" : "heisenberg";
}

struct SpinNetwork {
  int n = 0;
  CouplingKind kind = CouplingKind::XX;
  Matrix couplings;  // n x n symmetric, zero diagonal, entries >= 0
  std::vector<std::array<double, 2>> positions;  // empty unless geometric
};

// Validates the SpinNetwork invariants; throws invalid_input naming the first
// offending entry (1-based in the message, matching the CLI surface).
inline void validate_network(const SpinNetwork& net) {
  if (net.n < 2) throw invalid_input("network needs at least 2 spins");
  if (net.couplings.rows() != net.n || net.couplings.cols() != net.n)
    throw invalid_input("couplings must be n x n");
  for (int i = 0; i < net.n; ++i) {
    if (net.couplings(i, i) != 0.0)
      throw invalid_input("couplings[" + std::to_string(i + 1) + "][" + std::to_string(i + 1) +
                          "] must be 0 on the diagonal");
    for (int j = 0; j < net.n; ++j) {
      if (std::abs(net.couplings(i, j) - net.couplings(j, i)) > 1e-12)
        throw invalid_input("couplings[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                            "] != couplings[" + std::to_string(j + 1) + "][" +
                            std::to_string(i + 1) + "]");
      if (!(net.couplings(i, j) >= 0.0))
        throw invalid_input("couplings[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                            "] must be finite and >= 0");
    }
  }
  if (!net.positions.empty() && static_cast<int>(net.positions.size()) != net.n)
    throw invalid_input("positions length must equal n");
}

// Homogeneous open chain with nearest-neighbour coupling j.
inline SpinNetwork build_chain(int n, CouplingKind kind, double j = 1.0) {
  if (n < 2) throw invalid_input("chain needs at least 2 spins");
  if (!(j > 0.0)) throw invalid_input("coupling strength must be positive");
  SpinNetwork net;
  net.n = n;
  net.kind = kind;
  net.couplings = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    net.couplings(i, i + 1) = j;
    net.couplings(i + 1, i) = j;
  }
  return net;
}

// Planar network with couplings J(i,j) = r(i,j)^(-exponent).
inline SpinNetwork build_geometric_network(const std::vector<std::array<double, 2>>& positions,
                                           CouplingKind kind, double exponent = 3.0) {
  const int n = static_cast<int>(positions.size());
  if (n < 2) throw invalid_input("geometric network needs at least 2 points");
  if (!(exponent > 0.0)) throw invalid_input("distance-law exponent must be positive");
  SpinNetwork net;
  net.n = n;
  net.kind = kind;
  net.positions = positions;
  net.couplings = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = positions[i][0] - positions[j][0];
      const double dy = positions[i][1] - positions[j][1];
      const double r = std::hypot(dx, dy);
      if (r <= 0.0)
        throw invalid_input("points " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                            " coincide; geometry is degenerate");
      const double c = std::pow(r, -exponent);
      net.couplings(i, j) = c;
      net.couplings(j, i) = c;
    }
  }
  return net;
}

// Hamiltonian restricted to the single-excitation subspace. Couplings are
// symmetrized first; validate_network admits asymmetry up to 1e-12.
inline Matrix single_excitation_hamiltonian(const SpinNetwork& net) {
  validate_network(net);
  Matrix h = 0.5 * (net.couplings + net.couplings.transpose());
  if (net.kind == CouplingKind::Heisenberg) {
    for (int i = 0; i < net.n; ++i) h(i, i) = -h.row(i).sum();
  }
  return h;
}

}  // namespace spinitc
