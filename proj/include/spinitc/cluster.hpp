#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include "spinitc/core.hpp"
#include "spinitc/detail/union_find.hpp"

// Threshold clustering under the ITC semi-metric. clusters_at(eps) takes the
// connected components of the graph with edges d < eps (the underlying
// relation is not transitive, so components are its transitive closure);
// hierarchical_clusters sweeps eps through every distinct distance value and
// records each component ever formed. No triangle inequality is assumed.

namespace spinitc {

namespace detail {
inline void check_square(const Matrix& dist) {
  if (dist.rows() != dist.cols() || dist.rows() < 1)
    throw invalid_input("distance matrix must be square and nonempty");
}
}  // namespace detail

inline std::vector<std::vector<int>> clusters_at(const Matrix& dist, double epsilon) {
  detail::check_square(dist);
  if (!(epsilon >= 0.0)) throw invalid_input("epsilon must be >= 0");
  const int n = static_cast<int>(dist.rows());
  detail::UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist(i, j) < epsilon) uf.unite(i, j);
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parts[static_cast<std::size_t>(uf.find(i))].push_back(i);
  std::vector<std::vector<int>> result;
  for (auto& p : parts)
    if (!p.empty()) result.push_back(std::move(p));
  std::sort(result.begin(), result.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return result;
}

struct Cluster {
  std::vector<int> members;  // sorted, size >= 2 (singletons are the leaf nodes)
  double birth = 0.0;        // smallest sweep threshold at which the component exists;
                             // +inf when it only forms in the eps -> inf limit
  bool valid = false;        // max intra-distance < min distance to the complement
  int parent = -1;           // index of the smallest enclosing cluster, -1 at a root
};

struct ClusterTree {
  int n = 0;                       // leaves are the nodes 0..n-1
  std::vector<double> thresholds;  // sorted distinct finite off-diagonal values
  std::vector<Cluster> clusters;   // in formation order
};

inline ClusterTree hierarchical_clusters(const Matrix& dist) {
  detail::check_square(dist);
  const int n = static_cast<int>(dist.rows());
  ClusterTree tree;
  tree.n = n;

  std::vector<std::tuple<double, int, int>> edges;
  {
    std::set<double> values;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double d = dist(i, j);
        if (std::isfinite(d)) {
          values.insert(d);
          edges.emplace_back(d, i, j);
        }
      }
    }
    tree.thresholds.assign(values.begin(), values.end());
  }
  std::sort(edges.begin(), edges.end());

  // The component {edges < v_k} exists for eps in (v_k, v_{k+1}]; the first
  // sweep value that sees it is the next distinct threshold, or +inf when v_k
  // is the largest.
  detail::UnionFind uf(n);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};

  std::size_t next = 0;
  for (std::size_t level = 0; level < tree.thresholds.size(); ++level) {
    const double value = tree.thresholds[level];
    const double birth = level + 1 < tree.thresholds.size() ? tree.thresholds[level + 1] : kInf;
    std::set<int> changed;
    while (next < edges.size() && std::get<0>(edges[next]) == value) {
      const auto [d, i, j] = edges[next];
      ++next;
      const int ri = uf.find(i), rj = uf.find(j);
      if (ri == rj) continue;
      std::vector<int> merged;
      std::merge(members[static_cast<std::size_t>(ri)].begin(),
                 members[static_cast<std::size_t>(ri)].end(),
                 members[static_cast<std::size_t>(rj)].begin(),
                 members[static_cast<std::size_t>(rj)].end(), std::back_inserter(merged));
      uf.unite(ri, rj);
      const int root = uf.find(ri);
      members[static_cast<std::size_t>(root)] = std::move(merged);
      changed.erase(ri);
      changed.erase(rj);
      changed.insert(root);
    }
    for (int root : changed)
      tree.clusters.push_back({members[static_cast<std::size_t>(root)], birth, false, -1});
  }

  for (auto& cluster : tree.clusters) {
    double max_intra = 0.0;
    double min_inter = kInf;
    std::vector<char> inside(static_cast<std::size_t>(n), 0);
    for (int u : cluster.members) inside[static_cast<std::size_t>(u)] = 1;
    for (int u : cluster.members) {
      for (int v = 0; v < n; ++v) {
        if (v == u) continue;
        if (inside[static_cast<std::size_t>(v)])
          max_intra = std::max(max_intra, dist(u, v));
        else
          min_inter = std::min(min_inter, dist(u, v));
      }
    }
    cluster.valid = max_intra < min_inter;
  }

  // Parent = smallest strict superset; the recorded family is laminar, so the
  // first superset met in increasing size order is the parent.
  std::vector<std::size_t> by_size(tree.clusters.size());
  for (std::size_t c = 0; c < by_size.size(); ++c) by_size[c] = c;
  std::sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return tree.clusters[a].members.size() < tree.clusters[b].members.size();
  });
  for (std::size_t a = 0; a < by_size.size(); ++a) {
    const auto& small = tree.clusters[by_size[a]].members;
    for (std::size_t b = a + 1; b < by_size.size(); ++b) {
      const auto& big = tree.clusters[by_size[b]].members;
      if (big.size() <= small.size()) continue;
      if (std::includes(big.begin(), big.end(), small.begin(), small.end())) {
        tree.clusters[by_size[a]].parent = static_cast<int>(by_size[b]);
        break;
      }
    }
  }
  return tree;
}

}  // namespace spinitc
