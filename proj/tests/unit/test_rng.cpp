#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "copasbias/rng.hpp"
#include "support/ks.hpp"
#include "copasbias/normal.hpp"

using namespace copasbias;

TEST_CASE("identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("uniform01 stays inside the open unit interval") {
    Rng rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("below(n) covers exactly 0..n-1") {
    Rng rng(11);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 3000; ++i) {
        const std::uint64_t v = rng.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("substreams are order-independent and distinct") {
    // building stream k never depends on the other streams
    Rng s3_first = substream(99, 3);
    Rng s3_again = substream(99, 3);
    for (int i = 0; i < 100; ++i) CHECK(s3_first.next_u64() == s3_again.next_u64());
    Rng a = substream(99, 3), b = substream(99, 5);
    int same = 0;
    for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
    CHECK(same == 0);
}

TEST_CASE("normal draws pass a KS sanity check") {
    Rng rng(2024);
    std::vector<double> draws;
    draws.reserve(20000);
    for (int i = 0; i < 20000; ++i) draws.push_back(rng.normal());
    const double d = testsupport::ks_statistic(draws, [](double x) { return norm_cdf(x); });
    CHECK(testsupport::ks_pvalue(d, draws.size()) > 0.001);
}
