#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "otb/rng.hpp"

using namespace otb;

TEST_CASE("same seed reproduces the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64() ? 1 : 0;
    CHECK(equal < 5);
}

TEST_CASE("uniform01 stays in [0,1)") {
    Rng rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform_index covers [0,n) without bias artifacts") {
    Rng rng(9);
    int counts[7] = {0};
    for (int i = 0; i < 70000; ++i) counts[rng.uniform_index(7)]++;
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("gaussian moments are sane") {
    Rng rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("derived seeds separate by tag and index") {
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) seen.insert(derive_seed(123, "alpha", i));
    for (int i = 0; i < 100; ++i) seen.insert(derive_seed(123, "beta", i));
    seen.insert(derive_seed(124, "alpha", 0));
    CHECK(seen.size() == 201);
    CHECK(derive_seed(123, "alpha", 5) == derive_seed(123, "alpha", 5));
}
