#include <cmath>
#include <gtest/gtest.h>
#include <vector>

#include "maplk/rng.hpp"
#include "maplk/stats.hpp"

using namespace maplk;

// =============================================================================
// Philox4x32-10 known-answer vectors
// =============================================================================

TEST(Philox, ZeroCounterZeroKey) {
    const auto r = philox4x32({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r[0], 0x6627e8d5u);
    EXPECT_EQ(r[1], 0xe169c58du);
    EXPECT_EQ(r[2], 0xbc57ac4cu);
    EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, AllOnes) {
    const auto r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(r[0], 0x408f276du);
    EXPECT_EQ(r[1], 0x41c83b0eu);
    EXPECT_EQ(r[2], 0xa20bc7c6u);
    EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, PiDigits) {
    const auto r = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(r[0], 0xd16cfe09u);
    EXPECT_EQ(r[1], 0x94fdccebu);
    EXPECT_EQ(r[2], 0x5001e420u);
    EXPECT_EQ(r[3], 0x24126ea1u);
}

// =============================================================================
// Streams
// =============================================================================

TEST(RandomStream, ReproducibleFromSeedAndId) {
    RandomStream a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, DistinctIdsDiffer) {
    RandomStream a(42, 7), b(42, 8), c(43, 7);
    const auto x = a.next_u64();
    EXPECT_NE(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
}

TEST(RandomStream, UniformInOpenUnitInterval) {
    RandomStream r(1, 0);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        xs.push_back(u);
    }
    const auto ks = ks_one_sample(xs, [](double x) { return x; });
    EXPECT_GT(ks.p_value, 0.001);
}

TEST(RandomStream, NormalMoments) {
    RandomStream r(3, 1);
    std::vector<double> xs, sq;
    for (int i = 0; i < 200000; ++i) {
        const double z = r.normal();
        xs.push_back(z);
        sq.push_back(z * z);
    }
    const auto m = mean_estimate(xs), v = mean_estimate(sq);
    EXPECT_LT(z_score(m.value, m.se, 0.0), 4.0);
    EXPECT_LT(z_score(v.value, v.se, 1.0), 4.0);
}

TEST(RandomStream, ExponentialMean) {
    RandomStream r(5, 2);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(r.exponential(2.0));
    const auto m = mean_estimate(xs);
    EXPECT_LT(z_score(m.value, m.se, 0.5), 4.0);
}

TEST(RandomStream, DeriveSeedSpreads) {
    EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
    EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
    EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}
