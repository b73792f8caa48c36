#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "seterm/rng.hpp"

using namespace seterm;

TEST_CASE("derive_stream is deterministic") {
    SeedPolicy pol{42};
    REQUIRE(pol.derive(0, "noise") == pol.derive(0, "noise"));
    REQUIRE(pol.derive(3, "cloud") == pol.derive(3, "cloud"));
}

TEST_CASE("derive_stream separates replicates and purposes") {
    SeedPolicy pol{42};
    REQUIRE(pol.derive(0, "noise") != pol.derive(1, "noise"));
    REQUIRE(pol.derive(0, "noise") != pol.derive(0, "cloud"));
}

TEST_CASE("no collisions over 10^4 (replicate, purpose) pairs") {
    SeedPolicy pol{977};
    std::set<std::uint64_t> seen;
    const char* purposes[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    for (std::uint64_t rep = 0; rep < 1000; ++rep)
        for (const char* p : purposes) seen.insert(pol.derive(rep, p));
    REQUIRE(seen.size() == 10000);
}

TEST_CASE("uniform stays in [0,1) and streams reproduce") {
    RngStream a(7), b(7);
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(u == b.uniform());
    }
}

TEST_CASE("normal moments are sane") {
    RngStream rng(123);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    REQUIRE(std::fabs(mean) < 0.01);
    REQUIRE(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("rademacher is +-1 with balanced sign") {
    RngStream rng(5);
    int pos = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        int r = rng.rademacher();
        REQUIRE((r == 1 || r == -1));
        if (r == 1) ++pos;
    }
    REQUIRE(std::fabs(pos / static_cast<double>(n) - 0.5) < 0.01);
}
