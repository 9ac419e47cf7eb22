#include "doctest.h"

#include <cmath>

#include "uavsec/rng.hpp"

using namespace uavsec;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known answers") {
    // Random123 reference vectors.
    auto r0 = Philox4x32::raw_block({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r0[0] == 0x6627e8d5u);
    CHECK(r0[1] == 0xe169c58du);
    CHECK(r0[2] == 0xbc57ac4cu);
    CHECK(r0[3] == 0x9b00dbd8u);

    auto r1 = Philox4x32::raw_block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
    CHECK(r1[0] == 0x408f276du);
    CHECK(r1[1] == 0x41c83b0eu);
    CHECK(r1[2] == 0xa20bc7c6u);
    CHECK(r1[3] == 0x6d5451fdu);

    auto r2 = Philox4x32::raw_block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                    {0xa4093822u, 0x299f31d0u});
    CHECK(r2[0] == 0xd16cfe09u);
    CHECK(r2[1] == 0x94fdccebu);
    CHECK(r2[2] == 0x5001e420u);
    CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("uniform draws are deterministic and in (0,1)") {
    const Philox4x32 a(42), b(42), c(43);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = a.uniform(i);
        CHECK(u == b.uniform(i));
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    bool differs = false;
    for (std::uint64_t i = 0; i < 16; ++i)
        if (a.uniform(i) != c.uniform(i)) differs = true;
    CHECK(differs);
}

TEST_CASE("exponential draws have unit mean") {
    const Philox4x32 rng(7);
    const std::uint64_t n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double v = rng.exponential(i);
        CHECK(v > 0.0);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sumsq / n - mean * mean);
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 1.0) < 4.0 * se);  // unit-mean within 4 sigma
    CHECK(sd == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE
