#include "semigarch/rng.hpp"

#include "semigarch/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace semigarch;

TEST_CASE("derive_stream is deterministic") {
    RngStream a = derive_stream(42, 7);
    RngStream b = derive_stream(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct replicate indices give distinct streams") {
    RngStream a = derive_stream(42, 0);
    RngStream b = derive_stream(42, 1);
    int equal = 0;
    for (int i = 0; i < 1000; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniforms live strictly inside (0,1) and look uniform") {
    RngStream s = derive_stream(1, 0);
    const int n = 10000;
    double sum = 0.0;
    double min_v = 1.0, max_v = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
        min_v = std::min(min_v, u);
        max_v = std::max(max_v, u);
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(min_v < 0.01);
    CHECK(max_v > 0.99);
}

TEST_CASE("streams for adjacent indices pass a two-sample location smoke test") {
    RngStream a = derive_stream(9, 0);
    RngStream b = derive_stream(9, 1);
    const int n = 10000;
    std::vector<double> ua, ub;
    for (int i = 0; i < n; ++i) {
        ua.push_back(a.next_uniform());
        ub.push_back(b.next_uniform());
    }
    const MeanSe ma = mean_and_se(ua);
    const MeanSe mb = mean_and_se(ub);
    const double z = (ma.mean - mb.mean) / std::sqrt(ma.se * ma.se + mb.se * mb.se);
    CHECK(std::fabs(z) < 4.0);
    // lag-0 cross correlation should vanish
    double cov = 0.0;
    for (int i = 0; i < n; ++i) cov += (ua[i] - ma.mean) * (ub[i] - mb.mean);
    cov /= n;
    CHECK(std::fabs(cov) < 4.0 / std::sqrt(static_cast<double>(n)) / 12.0 + 0.005);
}

TEST_CASE("split produces unrelated child streams") {
    RngStream parent = derive_stream(5, 3);
    RngStream c1 = parent.split(1);
    RngStream c2 = parent.split(2);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) {
        seen.insert(c1.next_u64());
        seen.insert(c2.next_u64());
    }
    CHECK(seen.size() == 200);
}
