#include <catch2/catch_amalgamated.hpp>

#include <spinitc/cluster.hpp>
#include <spinitc/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace spinitc;

namespace {

Matrix random_semimetric(std::uint64_t seed, int n, bool quantized = false) {
    auto rng = seeded_stream(seed, 0);
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = 0.1 + uniform01(rng);
            if (quantized) v = std::round(v * 10.0) / 10.0;  // force ties
            d(i, j) = d(j, i) = v;
        }
    }
    return d;
}

bool is_subset(const std::vector<int>& small, const std::vector<int>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

TEST_CASE("clusters_at") {
    Matrix d(3, 3);
    d << 0, 0.1, 5,
         0.1, 0, 0.1,
         5, 0.1, 0;

    SECTION("epsilon zero gives singletons") {
        REQUIRE(clusters_at(d, 0.0) == std::vector<std::vector<int>>{{0}, {1}, {2}});
    }
    SECTION("the threshold is strict") {
        REQUIRE(clusters_at(d, 0.1) == std::vector<std::vector<int>>{{0}, {1}, {2}});
        REQUIRE(clusters_at(d, 0.1000001) == std::vector<std::vector<int>>{{0, 1, 2}});
    }
    SECTION("components close the relation transitively") {
        // d(0,2) = 5, yet 0 and 2 join through 1.
        auto parts = clusters_at(d, 0.2);
        REQUIRE(parts == std::vector<std::vector<int>>{{0, 1, 2}});
    }
    SECTION("epsilon = +inf merges every finite-distance component") {
        REQUIRE(clusters_at(d, kInf) == std::vector<std::vector<int>>{{0, 1, 2}});
    }
    SECTION("input checks") {
        REQUIRE_THROWS_AS(clusters_at(d, -0.5), invalid_input);
        REQUIRE_THROWS_AS(clusters_at(Matrix::Zero(2, 3), 1.0), invalid_input);
    }
}

TEST_CASE("clusters_at on the XX 3-chain groups the antipodal pair") {
    ITCMatrix itc = itc_matrix(build_chain(3, CouplingKind::XX));
    REQUIRE(clusters_at(itc.dist, 0.1) == std::vector<std::vector<int>>{{0, 2}, {1}});
}

TEST_CASE("coarser thresholds refine into larger clusters") {
    Matrix d = random_semimetric(31, 9);
    auto fine = clusters_at(d, 0.4);
    auto coarse = clusters_at(d, 0.8);
    for (const auto& f : fine) {
        bool contained = false;
        for (const auto& c : coarse) contained = contained || is_subset(f, c);
        REQUIRE(contained);
    }
}

TEST_CASE("hierarchical clustering of two tight pairs") {
    Matrix d(4, 4);
    d << 0, 0.1, 1, 1,
         0.1, 0, 1, 1,
         1, 1, 0, 0.2,
         1, 1, 0.2, 0;
    ClusterTree tree = hierarchical_clusters(d);
    REQUIRE(tree.n == 4);
    REQUIRE(tree.thresholds == std::vector<double>{0.1, 0.2, 1.0});
    REQUIRE(tree.clusters.size() == 3);

    REQUIRE(tree.clusters[0].members == std::vector<int>{0, 1});
    REQUIRE(tree.clusters[0].birth == 0.2);
    REQUIRE(tree.clusters[0].valid);
    REQUIRE(tree.clusters[0].parent == 2);

    REQUIRE(tree.clusters[1].members == std::vector<int>{2, 3});
    REQUIRE(tree.clusters[1].birth == 1.0);
    REQUIRE(tree.clusters[1].valid);
    REQUIRE(tree.clusters[1].parent == 2);

    REQUIRE(tree.clusters[2].members == std::vector<int>{0, 1, 2, 3});
    REQUIRE(std::isinf(tree.clusters[2].birth));
    REQUIRE(tree.clusters[2].valid);
    REQUIRE(tree.clusters[2].parent == -1);
}

TEST_CASE("simultaneous merges record one cluster") {
    Matrix d(3, 3);
    d << 0, 0.5, 0.9,
         0.5, 0, 0.5,
         0.9, 0.5, 0;
    ClusterTree tree = hierarchical_clusters(d);
    REQUIRE(tree.clusters.size() == 1);
    REQUIRE(tree.clusters[0].members == std::vector<int>{0, 1, 2});
    REQUIRE(tree.clusters[0].birth == 0.9);
    REQUIRE(tree.clusters[0].valid);
}

TEST_CASE("XX 7-chain: the earliest valid clusters are the antipodal pairs") {
    ITCMatrix itc = itc_matrix(build_chain(7, CouplingKind::XX));
    ClusterTree tree = hierarchical_clusters(itc.dist);
    std::vector<const Cluster*> valid;
    for (const auto& c : tree.clusters)
        if (c.valid) valid.push_back(&c);
    REQUIRE(valid.size() >= 3);
    std::stable_sort(valid.begin(), valid.end(),
                     [](const Cluster* a, const Cluster* b) { return a->birth < b->birth; });
    std::set<std::vector<int>> earliest = {valid[0]->members, valid[1]->members,
                                           valid[2]->members};
    std::set<std::vector<int>> want = {{0, 6}, {1, 5}, {2, 4}};
    REQUIRE(earliest == want);
}

TEST_CASE("hierarchy invariants on random semi-metrics") {
    for (std::uint64_t seed : {3u, 14u, 159u}) {
        for (bool quantized : {false, true}) {
            Matrix d = random_semimetric(seed, 8, quantized);
            ClusterTree tree = hierarchical_clusters(d);

            // Root: everything joins once eps clears the largest value.
            REQUIRE_FALSE(tree.clusters.empty());
            bool has_root = false;

            for (std::size_t a = 0; a < tree.clusters.size(); ++a) {
                const Cluster& c = tree.clusters[a];
                REQUIRE(c.members.size() >= 2);
                REQUIRE(std::is_sorted(c.members.begin(), c.members.end()));
                if (static_cast<int>(c.members.size()) == tree.n) has_root = true;

                // Birth is a sweep threshold or the +inf sentinel.
                if (std::isfinite(c.birth)) {
                    REQUIRE(std::binary_search(tree.thresholds.begin(), tree.thresholds.end(),
                                               c.birth));
                    // The cluster is a component of the graph at its birth.
                    auto parts = clusters_at(d, c.birth);
                    bool found = false;
                    for (const auto& p : parts) found = found || p == c.members;
                    REQUIRE(found);
                } else {
                    auto parts = clusters_at(d, kInf);
                    bool found = false;
                    for (const auto& p : parts) found = found || p == c.members;
                    REQUIRE(found);
                }

                // Validity against a direct recomputation.
                double max_intra = 0.0, min_inter = kInf;
                for (int u : c.members)
                    for (int v = 0; v < tree.n; ++v) {
                        if (v == u) continue;
                        bool in = std::binary_search(c.members.begin(), c.members.end(), v);
                        if (in)
                            max_intra = std::max(max_intra, d(u, v));
                        else
                            min_inter = std::min(min_inter, d(u, v));
                    }
                REQUIRE(c.valid == (max_intra < min_inter));

                // Laminar family: pairwise disjoint or nested.
                for (std::size_t b = a + 1; b < tree.clusters.size(); ++b) {
                    const Cluster& other = tree.clusters[b];
                    std::vector<int> common;
                    std::set_intersection(c.members.begin(), c.members.end(),
                                          other.members.begin(), other.members.end(),
                                          std::back_inserter(common));
                    bool disjoint = common.empty();
                    bool nested = common.size() == std::min(c.members.size(),
                                                            other.members.size());
                    REQUIRE((disjoint || nested));
                }

                // Parent is the smallest strict superset.
                int want_parent = -1;
                std::size_t want_size = 0;
                for (std::size_t b = 0; b < tree.clusters.size(); ++b) {
                    if (b == a) continue;
                    const auto& cand = tree.clusters[b].members;
                    if (cand.size() <= c.members.size()) continue;
                    if (!is_subset(c.members, cand)) continue;
                    if (want_parent == -1 || cand.size() < want_size) {
                        want_parent = static_cast<int>(b);
                        want_size = cand.size();
                    }
                }
                REQUIRE(c.parent == want_parent);
            }
            REQUIRE(has_root);
        }
    }
}

TEST_CASE("hierarchical_clusters input checks") {
    REQUIRE_THROWS_AS(hierarchical_clusters(Matrix::Zero(3, 2)), invalid_input);
}

TEST_CASE("a single node yields an empty hierarchy") {
    ClusterTree tree = hierarchical_clusters(Matrix::Zero(1, 1));
    REQUIRE(tree.n == 1);
    REQUIRE(tree.thresholds.empty());
    REQUIRE(tree.clusters.empty());
}
