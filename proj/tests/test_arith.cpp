#include <heightgrowth/arith.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace hg = heightgrowth;
using namespace heightgrowth::arith;

TEST(Primes, SieveMatchesTrialDivision) {
    const auto ps = primes_up_to(5000);
    std::size_t i = 0;
    for (std::int64_t n = 0; n <= 5000; ++n) {
        const bool expect = oracle::is_prime(n);
        EXPECT_EQ(is_prime(n), expect) << n;
        if (expect) {
            ASSERT_LT(i, ps.size());
            EXPECT_EQ(ps[i++], n);
        }
    }
    EXPECT_EQ(i, ps.size());
}

TEST(Primes, MillerRabinOnLargeValues) {
    EXPECT_TRUE(is_prime(1'000'000'007));
    EXPECT_TRUE(is_prime(999'999'999'989));
    EXPECT_FALSE(is_prime(999'999'999'987));
    EXPECT_FALSE(is_prime(3215031751));  // strong pseudoprime to bases 2, 3, 5, 7
    EXPECT_TRUE(is_prime(2305843009213693951LL));
}

TEST(Factorize, ProductAndPrimality) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dist(1, 1'000'000'000'000LL);
    for (int t = 0; t < 200; ++t) {
        const auto n = dist(rng);
        std::int64_t prod = 1;
        std::int64_t last = 1;
        for (const auto& [p, k] : factorize(n)) {
            EXPECT_GT(p, last);
            last = p;
            EXPECT_TRUE(is_prime(p));
            for (int i = 0; i < k; ++i) prod *= p;
        }
        EXPECT_EQ(prod, n);
    }
    EXPECT_TRUE(factorize(std::int64_t{1}).empty());
    EXPECT_THROW(factorize(std::int64_t{0}), hg::DomainError);
}

TEST(Factorize, BigIntAgreesWithInt64) {
    for (std::int64_t n : {2LL, 360LL, 9973LL * 9973LL, 600851475143LL}) {
        const auto a = factorize(n);
        const auto b = factorize(hg::BigInt(n));
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].p, b[i].p);
            EXPECT_EQ(a[i].k, b[i].k);
        }
    }
}

TEST(Valuation, Basic) {
    EXPECT_EQ(valuation(hg::BigInt(48), 2), 4);
    EXPECT_EQ(valuation(hg::BigInt(-48), 3), 1);
    EXPECT_EQ(valuation(hg::BigInt(7), 5), 0);
    EXPECT_EQ(ipow(3, 40), hg::BigInt("12157665459056928801"));
}

TEST(CompensatedSum, RecoversCancellation) {
    CompensatedSum s;
    s.add(1e16);
    for (int i = 0; i < 1000; ++i) s.add(1.0);
    s.add(-1e16);
    EXPECT_EQ(s.value(), 1000.0);
}
