#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "bbgen/rng.hpp"

using bbgen::SeededRng;

TEST(SplitMix, ReferenceValues) {
    // Reference SplitMix64 outputs for state 0.
    std::uint64_t s = 0;
    EXPECT_EQ(bbgen::splitmix64(s), UINT64_C(0xE220A8397B1DCDAF));
    EXPECT_EQ(bbgen::splitmix64(s), UINT64_C(0x6E789E6AA1B965F4));
}

TEST(SeededRng, SameSeedSameStream) {
    SeededRng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs |= x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(SeededRng, Uniform01Range) {
    SeededRng rng(1);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(SeededRng, BelowIsUnbiasedEnough) {
    SeededRng rng(2);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) EXPECT_NEAR(c / 70000.0, 1.0 / 7, 0.01);
}

TEST(SeededRng, NormalMoments) {
    SeededRng rng(3);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(SeededRng, SplitIsDeterministicAndDistinct) {
    SeededRng a(9), b(9);
    SeededRng ca = a.split(), cb = b.split();
    EXPECT_EQ(ca.next(), cb.next());
    EXPECT_EQ(a.next(), b.next());
    SeededRng c1 = a.split(), c2 = a.split();
    EXPECT_NE(c1.next(), c2.next());
}

TEST(SeededRng, DeriveIsPureInSeedAndKey) {
    SeededRng a(5);
    const auto first = a.derive(17).next();
    a.next();
    a.next();
    EXPECT_EQ(a.derive(17).next(), first);
    EXPECT_EQ(SeededRng(5).derive(17).next(), first);
    EXPECT_NE(SeededRng(5).derive(18).next(), first);
    EXPECT_NE(SeededRng(6).derive(17).next(), first);
}

TEST(Shuffle, IsAPermutationAndDeterministic) {
    std::vector<int> v(50), w;
    std::iota(v.begin(), v.end(), 0);
    w = v;
    SeededRng r1(4), r2(4);
    bbgen::shuffle(v, r1);
    bbgen::shuffle(w, r2);
    EXPECT_EQ(v, w);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}
