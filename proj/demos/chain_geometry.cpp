// Walk through the geometry pipeline on a uniform Heisenberg chain: capacity
// matrix, antipodal equivalence classes, quotient metric, Euclidean embedding,
// Gromov delta, inertia profile, and the threshold hierarchy.

#include <spinitc/spinitc.hpp>

#include <cstdio>

using namespace spinitc;

namespace {

void print_members(const std::vector<int>& members) {
    std::printf("{");
    for (std::size_t k = 0; k < members.size(); ++k)
        std::printf("%s%d", k ? "," : "", members[k] + 1);
    std::printf("}");
}

}  // namespace

int main() {
    const int n = 10;
    SpinNetwork net = build_chain(n, CouplingKind::Heisenberg);
    ITCMatrix itc = itc_matrix(net);

    std::printf("uniform heisenberg chain, n = %d\n\n", n);

    auto classes = equivalence_classes(itc);
    std::printf("equivalence classes (zero itc distance):\n  ");
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (c) std::printf("  ");
        print_members(classes[c]);
    }
    std::printf("\n\n");

    QuotientMetric q = quotient_metric(itc, classes);
    const int m = static_cast<int>(classes.size());
    std::printf("quotient distances (classes in order above):\n");
    for (int i = 0; i < m; ++i) {
        std::printf("  ");
        for (int j = 0; j < m; ++j) std::printf("%8.4f", q.dist(i, j));
        std::printf("\n");
    }
    std::printf("  block spread %.3g%s\n\n", q.max_spread,
                q.spread_warning ? " (warning: classes are not tight)" : "");

    Embedding e = embedding_dimension(gram_matrix(q.dist));
    std::printf("euclidean embedding: dimension %d (gram eigenvalues", e.dim);
    for (int k = 0; k < e.gram_eigenvalues.size(); ++k)
        std::printf(" %.4f", e.gram_eigenvalues(k));
    std::printf(")\n\n");

    GromovReport g = gromov_delta(q.dist);
    std::printf("gromov four-point delta: max %.6f, scaled max %.6f over %lld quadruples\n",
                g.delta_max, g.scaled_delta_max, static_cast<long long>(g.quadruple_count));
    std::printf("  extremal quadruple: classes %d,%d,%d,%d\n\n", g.best.w + 1, g.best.x + 1,
                g.best.y + 1, g.best.z + 1);

    InertiaReport inert = inertia(itc.dist);
    std::printf("node inertia (alpha = %.0f):\n", inert.alpha);
    for (int i = 0; i < n; ++i) std::printf("  node %2d: %.6f\n", i + 1, inert.inertia(i));
    std::printf("  gravity center(s): ");
    print_members(inert.gravity_centers);
    std::printf("   anti-gravity center(s): ");
    print_members(inert.anti_gravity_centers);
    std::printf("\n\n");

    ClusterTree tree = hierarchical_clusters(itc.dist);
    std::printf("threshold hierarchy (%zu clusters over %zu levels):\n", tree.clusters.size(),
                tree.thresholds.size());
    for (const Cluster& c : tree.clusters) {
        std::printf("  ");
        print_members(c.members);
        if (std::isfinite(c.birth))
            std::printf("  birth %.4f", c.birth);
        else
            std::printf("  birth inf");
        std::printf("  %s\n", c.valid ? "valid" : "invalid");
    }
    return 0;
}
