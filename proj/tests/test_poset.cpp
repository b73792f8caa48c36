#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "seterm/point_cloud.hpp"
#include "seterm/poset.hpp"
#include "seterm/rng.hpp"

using namespace seterm;

TEST_CASE("three-point example") {
    PointCloud cloud(2, {0.1, 0.1, 0.5, 0.5, 0.9, 0.2});
    DominancePoset p = build_dominance_poset(cloud);
    REQUIRE(p.node_count() == 3);
    std::vector<std::pair<int, int>> expect{{0, 1}, {0, 2}};
    REQUIRE(p.edges() == expect);
    REQUIRE(p.reachable(0, 1));
    REQUIRE(p.reachable(0, 2));
    REQUIRE_FALSE(p.reachable(1, 2));
    REQUIRE_FALSE(p.reachable(2, 1));
}

TEST_CASE("singleton has no edges") {
    PointCloud cloud(3, {0.2, 0.4, 0.9});
    DominancePoset p = build_dominance_poset(cloud);
    REQUIRE(p.node_count() == 1);
    REQUIRE(p.edges().empty());
}

TEST_CASE("reachability equals brute-force pairwise dominance") {
    RngStream rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        std::size_t n = 50;
        std::size_t d = 3;
        PointCloud cloud = PointCloud::uniform(n, d, rng);
        DominancePoset p = build_dominance_poset(cloud);
        REQUIRE(p.node_count() == n); // duplicates have probability zero
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                bool dom = cloud.dominates(j, i); // point_i <= point_j
                bool reach = p.reachable(p.node_of_sample(i), p.node_of_sample(j));
                if (i == j)
                    REQUIRE(reach);
                else
                    REQUIRE(dom == reach);
            }
    }
}

TEST_CASE("transitive reduction is minimal") {
    RngStream rng(99);
    PointCloud cloud = PointCloud::uniform(40, 2, rng);
    DominancePoset p = build_dominance_poset(cloud);
    // removing any edge must change reachability: i.e., no edge (i,j) has an
    // alternative path through some k
    for (auto [i, j] : p.edges()) {
        bool alt = false;
        for (std::size_t k = 0; k < p.node_count() && !alt; ++k)
            if (static_cast<int>(k) != i && static_cast<int>(k) != j &&
                p.reachable(i, static_cast<int>(k)) && p.reachable(static_cast<int>(k), j))
                alt = true;
        REQUIRE_FALSE(alt);
    }
}

TEST_CASE("duplicates merge with multiplicity") {
    PointCloud cloud(2, {0.5, 0.5, 0.5, 0.5, 0.1, 0.1});
    DominancePoset p = build_dominance_poset(cloud);
    REQUIRE(p.node_count() == 2);
    REQUIRE(p.multiplicity(p.node_of_sample(0)) == 2);
    REQUIRE(p.node_of_sample(0) == p.node_of_sample(1));
    REQUIRE(p.reachable(p.node_of_sample(2), p.node_of_sample(0)));
}

TEST_CASE("permutation equivariance") {
    RngStream rng(7);
    std::size_t n = 30, d = 2;
    PointCloud cloud = PointCloud::uniform(n, d, rng);
    std::vector<double> coords;
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>((i * 7 + 3) % n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) coords.push_back(cloud.coord(perm[i], k));
    PointCloud shuffled(d, coords);
    DominancePoset p0 = build_dominance_poset(cloud);
    DominancePoset p1 = build_dominance_poset(shuffled);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            bool r0 = p0.reachable(p0.node_of_sample(perm[i]), p0.node_of_sample(perm[j]));
            bool r1 = p1.reachable(p1.node_of_sample(i), p1.node_of_sample(j));
            REQUIRE(r0 == r1);
        }
}

TEST_CASE("reverse poset swaps the order") {
    RngStream rng(11);
    PointCloud cloud = PointCloud::uniform(25, 3, rng);
    DominancePoset p = build_dominance_poset(cloud);
    DominancePoset r = reverse_poset(p);
    for (std::size_t i = 0; i < p.node_count(); ++i)
        for (std::size_t j = 0; j < p.node_count(); ++j)
            REQUIRE(p.reachable(static_cast<int>(i), static_cast<int>(j)) ==
                    r.reachable(static_cast<int>(j), static_cast<int>(i)));
}

TEST_CASE("point cloud csv round trip") {
    RngStream rng(3);
    PointCloud cloud = PointCloud::uniform(17, 3, rng);
    std::stringstream ss;
    cloud.write_csv(ss);
    PointCloud back = PointCloud::read_csv(ss);
    REQUIRE(back.size() == cloud.size());
    REQUIRE(back.dim() == cloud.dim());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        for (std::size_t k = 0; k < 3; ++k) REQUIRE(back.coord(i, k) == cloud.coord(i, k));
}

TEST_CASE("cloud validation rejects bad input") {
    REQUIRE_THROWS_AS(PointCloud(2, {0.5, 1.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(PointCloud(2, {0.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(PointCloud(0, {}), std::invalid_argument);
}
