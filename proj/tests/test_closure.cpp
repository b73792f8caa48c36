#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "seterm/closure.hpp"
#include "seterm/point_cloud.hpp"
#include "seterm/poset.hpp"
#include "seterm/rng.hpp"

using namespace seterm;

namespace {

PointCloud chain_cloud() { return PointCloud(1, {0.2, 0.8}); }

bool is_down_closed(const DominancePoset& p, const SetSelection& sel) {
    for (int j : sel.indices)
        for (std::size_t i = 0; i < p.node_count(); ++i)
            if (p.reachable(static_cast<int>(i), j) && !sel.contains(static_cast<int>(i)))
                return false;
    return true;
}

} // namespace

TEST_CASE("all weights non-positive gives empty set at value 0") {
    RngStream rng(5);
    PointCloud cloud = PointCloud::uniform(10, 2, rng);
    DominancePoset p = build_dominance_poset(cloud);
    std::vector<double> w(p.node_count(), -0.3);
    WeightedInstance inst(p, w);
    SetSelection sel = max_weight_down_set(inst, true);
    REQUIRE(sel.indices.empty());
    REQUIRE(sel.objective_value == 0.0);
}

TEST_CASE("chain closure forces the predecessor") {
    PointCloud cloud = chain_cloud();
    DominancePoset p = build_dominance_poset(cloud);
    WeightedInstance inst(p, {-1.0, 3.0});
    SetSelection sel = max_weight_down_set(inst, true);
    REQUIRE(sel.indices == std::vector<int>{0, 1});
    REQUIRE(sel.objective_value == 2.0);
}

TEST_CASE("up-set on the chain contains the successor") {
    PointCloud cloud = chain_cloud();
    DominancePoset p = build_dominance_poset(cloud);
    WeightedInstance inst(p, {3.0, -1.0});
    SetSelection sel = max_weight_up_set(inst, true);
    REQUIRE(sel.indices == std::vector<int>{0, 1});
    REQUIRE(sel.objective_value == 2.0);
}

TEST_CASE("solver equals brute force on 500 random instances") {
    RngStream rng(678);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 4 + rng.below(13); // <= 16
        std::size_t d = 2 + rng.below(2);
        PointCloud cloud = PointCloud::uniform(n, d, rng);
        DominancePoset p = build_dominance_poset(cloud);
        std::vector<double> w(p.node_count());
        for (double& x : w) x = rng.uniform(-1.0, 1.0);
        WeightedInstance inst(p, w);
        SetSelection fast = max_weight_down_set(inst, true);
        SetSelection slow = brute_force_down_set(inst, true);
        REQUIRE(fast.objective_value == slow.objective_value);
        REQUIRE(fast.indices == slow.indices); // both canonical minimal
        REQUIRE(is_down_closed(p, fast));
    }
}

TEST_CASE("up-set solver equals down-set solver on the reversed poset") {
    RngStream rng(4242);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 4 + rng.below(11);
        PointCloud cloud = PointCloud::uniform(n, 2, rng);
        DominancePoset p = build_dominance_poset(cloud);
        DominancePoset r = reverse_poset(p);
        std::vector<double> w(p.node_count());
        for (double& x : w) x = rng.uniform(-1.0, 1.0);
        WeightedInstance up_inst(p, w);
        WeightedInstance down_inst(r, w);
        SetSelection a = max_weight_up_set(up_inst, true);
        SetSelection b = max_weight_down_set(down_inst, true);
        REQUIRE(a.objective_value == b.objective_value);
        REQUIRE(a.indices == b.indices);
    }
}

TEST_CASE("optimality beats random feasible down-sets") {
    RngStream rng(31);
    PointCloud cloud = PointCloud::uniform(40, 3, rng);
    DominancePoset p = build_dominance_poset(cloud);
    std::vector<double> w(p.node_count());
    for (double& x : w) x = rng.uniform(-1.0, 1.0);
    WeightedInstance inst(p, w);
    SetSelection opt = max_weight_down_set(inst, true);
    for (int trial = 0; trial < 1000; ++trial) {
        // random down-set: take the predecessor closure of a random subset
        std::vector<char> in(p.node_count(), 0);
        for (std::size_t v = 0; v < p.node_count(); ++v)
            if (rng.uniform() < 0.3) {
                in[v] = 1;
                for (std::size_t u = 0; u < p.node_count(); ++u)
                    if (p.reachable(static_cast<int>(u), static_cast<int>(v))) in[u] = 1;
            }
        double val = 0.0;
        for (std::size_t v = 0; v < p.node_count(); ++v)
            if (in[v]) val += w[v];
        REQUIRE(opt.objective_value >= val - 1e-12);
    }
}

TEST_CASE("scaling equivariance of the canonical argmax") {
    RngStream rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 5 + rng.below(10);
        PointCloud cloud = PointCloud::uniform(n, 2, rng);
        DominancePoset p = build_dominance_poset(cloud);
        std::vector<double> w(p.node_count()), w2(p.node_count());
        double lambda = 0.5 + rng.uniform() * 3.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = rng.uniform(-1.0, 1.0);
            w2[i] = lambda * w[i];
        }
        SetSelection a = max_weight_down_set(WeightedInstance(p, w), true);
        SetSelection b = max_weight_down_set(WeightedInstance(p, w2), true);
        REQUIRE(a.indices == b.indices);
        REQUIRE(b.objective_value == Catch::Approx(lambda * a.objective_value).margin(1e-9));
    }
}

TEST_CASE("allow_empty=false returns the best non-empty down-set") {
    PointCloud cloud(1, {0.1, 0.5, 0.9});
    DominancePoset p = build_dominance_poset(cloud);
    WeightedInstance inst(p, {-0.5, -0.2, -0.4});
    SetSelection sel = max_weight_down_set(inst, false);
    REQUIRE(sel.indices == std::vector<int>{0}); // cheapest ideal is {first}
    REQUIRE(sel.objective_value == -0.5);

    SetSelection up = max_weight_up_set(inst, false);
    REQUIRE(up.indices == std::vector<int>{2});
    REQUIRE(up.objective_value == -0.4);
}

TEST_CASE("sample weights pool onto merged nodes") {
    PointCloud cloud(2, {0.5, 0.5, 0.5, 0.5, 0.2, 0.1});
    DominancePoset p = build_dominance_poset(cloud);
    WeightedInstance inst = WeightedInstance::from_samples(p, {1.0, 2.0, -0.5});
    REQUIRE(inst.weights[p.node_of_sample(0)] == 3.0);
    REQUIRE(inst.weights[p.node_of_sample(2)] == -0.5);
}

TEST_CASE("dimacs debug dump has closure structure") {
    PointCloud cloud = chain_cloud();
    DominancePoset p = build_dominance_poset(cloud);
    WeightedInstance inst(p, {-1.0, 3.0});
    std::stringstream ss;
    dump_closure_dimacs(inst, true, ss);
    std::string out = ss.str();
    REQUIRE(out.find("p max 4") == 0);
    REQUIRE(out.find("n 3 s") != std::string::npos);
    REQUIRE(out.find("n 4 t") != std::string::npos);
}

TEST_CASE("brute force rejects oversized instances") {
    RngStream rng(1);
    PointCloud cloud = PointCloud::uniform(23, 2, rng);
    DominancePoset p = build_dominance_poset(cloud);
    std::vector<double> w(p.node_count(), 0.1);
    WeightedInstance inst(p, w);
    REQUIRE_THROWS_AS(brute_force_down_set(inst, true), std::invalid_argument);
}
