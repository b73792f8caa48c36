#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "seterm/max_flow.hpp"
#include "seterm/rng.hpp"

using namespace seterm;

TEST_CASE("single edge") {
    FlowNetwork net(2, 0, 1);
    net.add_edge(0, 1, 5);
    auto r = net.solve();
    REQUIRE(r.flow == 5);
    REQUIRE(r.cut_capacity == 5);
}

TEST_CASE("two parallel paths") {
    FlowNetwork net(4, 0, 3);
    net.add_edge(0, 1, 2);
    net.add_edge(1, 3, 2);
    net.add_edge(0, 2, 3);
    net.add_edge(2, 3, 3);
    auto r = net.solve();
    REQUIRE(r.flow == 5);
}

TEST_CASE("infinite s-t path rejected") {
    FlowNetwork net(3, 0, 2);
    net.add_edge(0, 1, FlowNetwork::kInfCapacity);
    net.add_edge(1, 2, FlowNetwork::kInfCapacity);
    REQUIRE_THROWS_AS(net.solve(), std::invalid_argument);
}

namespace {

// exhaustive min cut over all 2^k subsets of internal nodes
std::int64_t brute_min_cut(int k, int s,
                           const std::vector<std::tuple<int, int, std::int64_t>>& edges) {
    std::int64_t best = -1;
    const int total = k + 2;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<char> in_s(total, 0);
        in_s[s] = 1;
        for (int i = 0; i < k; ++i)
            if ((mask >> i) & 1u) in_s[2 + i] = 1;
        std::int64_t cut = 0;
        for (auto [u, v, c] : edges)
            if (in_s[u] && !in_s[v]) cut += c;
        if (best < 0 || cut < best) best = cut;
    }
    return best;
}

} // namespace

TEST_CASE("max-flow equals exhaustive min cut on random DAG networks") {
    RngStream rng(321);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 2 + static_cast<int>(rng.below(9)); // internal nodes, <= 10
        int total = k + 2, s = 0, t = 1;
        std::vector<std::tuple<int, int, std::int64_t>> edges;
        for (int i = 0; i < k; ++i) {
            if (rng.uniform() < 0.8) edges.emplace_back(s, 2 + i, static_cast<std::int64_t>(rng.below(20)));
            if (rng.uniform() < 0.8) edges.emplace_back(2 + i, t, static_cast<std::int64_t>(rng.below(20)));
        }
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (rng.uniform() < 0.4)
                    edges.emplace_back(2 + i, 2 + j, static_cast<std::int64_t>(rng.below(15)));
        FlowNetwork net(total, s, t);
        for (auto [u, v, c] : edges) net.add_edge(u, v, c);
        auto r = net.solve();
        REQUIRE(r.flow == brute_min_cut(k, s, edges));
        REQUIRE(r.cut_capacity == r.flow);
        REQUIRE(r.source_side[s]);
        REQUIRE_FALSE(r.source_side[t]);
    }
}

TEST_CASE("canonical cut is residual reachability (minimal source side)") {
    // two min cuts exist; the source-minimal one keeps only s
    FlowNetwork net(3, 0, 2);
    net.add_edge(0, 1, 3);
    net.add_edge(1, 2, 3);
    auto r = net.solve();
    REQUIRE(r.flow == 3);
    REQUIRE(r.source_side[0]);
    REQUIRE_FALSE(r.source_side[1]);
}

TEST_CASE("dimacs dump") {
    FlowNetwork net(3, 0, 2);
    net.add_edge(0, 1, 4);
    net.add_edge(1, 2, 7);
    std::stringstream ss;
    net.write_dimacs(ss);
    REQUIRE(ss.str() == "p max 3 2\nn 1 s\nn 3 t\na 1 2 4\na 2 3 7\n");
}
