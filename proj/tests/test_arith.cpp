#include "chowla/arith.hpp"
#include "chowla/error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace chowla;

TEST(Kronecker, SpecExamples)
{
    EXPECT_EQ(kronecker(5, 1), 1);
    EXPECT_EQ(kronecker(5, 4), 1);
    EXPECT_EQ(kronecker(5, 2), -1);
}

TEST(Kronecker, MatchesDefinitionFromFactorisation)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dd(-100000, 100000);
    std::uniform_int_distribution<std::uint64_t> nn(0, 20000);
    for (int i = 0; i < 20000; ++i) {
        const std::int64_t d = dd(rng);
        const std::uint64_t n = nn(rng);
        ASSERT_EQ(kronecker(d, n), oracle::kronecker(d, n)) << "d=" << d << " n=" << n;
    }
}

TEST(Kronecker, CompletelyMultiplicative)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> dd(-1'000'000'000, 1'000'000'000);
    std::uniform_int_distribution<std::uint64_t> nn(1, 1'000'000);
    for (int i = 0; i < 100000; ++i) {
        const std::int64_t d = dd(rng);
        const std::uint64_t m = nn(rng), n = nn(rng);
        ASSERT_EQ(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n)) << d << " " << m << " " << n;
    }
}

TEST(Kronecker, PeriodicForFamilyDiscriminants)
{
    for (std::uint64_t d : {5ULL, 17ULL, 37ULL, 101ULL, 145ULL, 4'000'001ULL})
        for (std::uint64_t n = 1; n < 300; ++n)
            ASSERT_EQ(kronecker(static_cast<std::int64_t>(d), n),
                      kronecker(static_cast<std::int64_t>(d), n + d));
}

TEST(Jacobsthal, SmallPrimesByHand)
{
    EXPECT_EQ(jacobsthal_sum(5), -1);
    EXPECT_EQ(jacobsthal_sum(3), -1);
}

TEST(Jacobsthal, MinusOneForAllOddPrimesBelow10000)
{
    for (std::uint64_t p = 3; p <= 10000; p += 2)
        if (oracle::is_prime(p)) ASSERT_EQ(jacobsthal_sum(p), -1) << p;
}

TEST(Jacobsthal, RejectsEvenAndComposite)
{
    EXPECT_THROW(jacobsthal_sum(2), DomainError);
    EXPECT_THROW(jacobsthal_sum(9), DomainError);
}

TEST(COfP, Values)
{
    EXPECT_EQ(c_of(5), 2);
    EXPECT_EQ(c_of(3), 0);
    EXPECT_EQ(c_of(13), 2);
    EXPECT_THROW(c_of(2), DomainError);
}

TEST(PrimeTable, AgreesWithTrialDivision)
{
    const PrimeTable table(100000);
    std::size_t expected = 0;
    for (std::uint64_t n = 0; n <= 100000; ++n) {
        const bool p = oracle::is_prime(n);
        ASSERT_EQ(table.contains(n), p) << n;
        expected += p;
    }
    ASSERT_EQ(table.size(), expected);
    for (std::size_t i = 1; i < table.size(); ++i) ASSERT_LT(table[i - 1], table[i]);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const unsigned want = table[i] == 2 ? 2u : table[i] % 4;
        ASSERT_EQ(table.residue_mod4(i), want);
    }
    EXPECT_EQ(table.count_upto(100), 25u);
    EXPECT_THROW(static_cast<void>(table.contains(100001)), DomainError);
}

TEST(PrimeSegments, StreamMatchesTable)
{
    const PrimeTable table(2'000'000);
    std::vector<std::uint64_t> streamed;
    for_each_prime_segment(1'000'000, 2'000'000, [&](std::span<const std::uint64_t> seg) {
        streamed.insert(streamed.end(), seg.begin(), seg.end());
    });
    std::vector<std::uint64_t> want;
    for (auto p : table.primes())
        if (p >= 1'000'000) want.push_back(p);
    EXPECT_EQ(streamed, want);
}

TEST(Primality, MillerRabinMatchesTrialDivision)
{
    for (std::uint64_t n = 0; n < 200000; ++n) ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
    // Strong pseudoprimes to several small bases and large known primes.
    EXPECT_FALSE(is_prime(3215031751ULL));
    EXPECT_FALSE(is_prime(3825123056546413051ULL));
    EXPECT_TRUE(is_prime(18446744073709551557ULL));
    EXPECT_TRUE(is_prime(1'000'000'007ULL));
}

TEST(ModularArithmetic, SquareRootsModPrime)
{
    for (std::uint64_t p : {3ULL, 5ULL, 13ULL, 17ULL, 97ULL, 65537ULL, 1'000'000'007ULL}) {
        for (std::uint64_t a = 0; a < 200; ++a) {
            std::uint64_t r = 0;
            const bool ok = sqrt_mod_prime(a, p, r);
            ASSERT_EQ(ok, oracle::legendre(static_cast<std::int64_t>(a), p) >= 0) << a << " mod " << p;
            if (ok) ASSERT_EQ(mulmod(r, r, p), a % p);
        }
    }
}

TEST(ModularArithmetic, IntegerSquareRoot)
{
    for (std::uint64_t n : {0ULL, 1ULL, 15ULL, 16ULL, 17ULL, 999999999999ULL, 18446744073709551615ULL}) {
        const std::uint64_t r = isqrt(n);
        ASSERT_LE(static_cast<unsigned __int128>(r) * r, n);
        ASSERT_GT(static_cast<unsigned __int128>(r + 1) * (r + 1), n);
    }
    EXPECT_TRUE(is_square(1ULL << 62));
    EXPECT_FALSE(is_square((1ULL << 62) + 1));
}

TEST(FactorChowla, SpecExamples)
{
    const auto f1 = factor_chowla(1);
    EXPECT_EQ(f1.n, 5u);
    EXPECT_TRUE(f1.is_squarefree);
    const auto f9 = factor_chowla(9);
    EXPECT_EQ(f9.n, 325u);
    EXPECT_FALSE(f9.is_squarefree);
    EXPECT_EQ(f9.prime_powers, (std::vector<std::pair<std::uint64_t, int>>{{5, 2}, {13, 1}}));
    const auto f6 = factor_chowla(6);
    EXPECT_EQ(f6.prime_powers, (std::vector<std::pair<std::uint64_t, int>>{{5, 1}, {29, 1}}));
    EXPECT_TRUE(f6.is_squarefree);
}

TEST(FactorChowla, AgreesWithNaiveFactorisation)
{
    for (std::uint64_t m = 1; m <= 10000; ++m) {
        const auto f = factor_chowla(m);
        const std::uint64_t n = 4 * m * m + 1;
        ASSERT_EQ(f.is_squarefree, oracle::squarefree(n)) << m;
        ASSERT_EQ(f.prime_powers, oracle::factor(n)) << m;
    }
}

TEST(FactorChowla, LargeArgumentsMultiplyBack)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> mm(100'000'000, kMaxChowlaM);
    for (int i = 0; i < 300; ++i) {
        const std::uint64_t m = mm(rng);
        const auto f = factor_chowla(m);
        unsigned __int128 prod = 1;
        bool sf = true;
        for (auto [p, e] : f.prime_powers) {
            ASSERT_TRUE(is_prime(p));
            ASSERT_EQ(p % 4, 1u);
            for (int j = 0; j < e; ++j) prod *= p;
            sf = sf && e == 1;
        }
        ASSERT_EQ(static_cast<std::uint64_t>(prod), 4 * m * m + 1);
        ASSERT_EQ(f.is_squarefree, sf);
    }
    EXPECT_THROW(factor_chowla(kMaxChowlaM + 1), OverflowError);
    EXPECT_THROW(factor_chowla(0), DomainError);
}

TEST(FundamentalUnit, SpecExamples)
{
    const UnitInfo u5 = fundamental_unit(5);
    EXPECT_EQ(u5.a, 1);
    EXPECT_EQ(u5.b, 1);
    EXPECT_EQ(u5.norm_sign, -1);
    EXPECT_NEAR(u5.epsilon.convert_to<double>(), 1.6180339887498949, 1e-15);
    const UnitInfo u17 = fundamental_unit(17);
    EXPECT_EQ(u17.a, 8);
    EXPECT_EQ(u17.b, 2);
    EXPECT_EQ(u17.norm_sign, -1);
    EXPECT_NEAR(u17.epsilon.convert_to<double>(), 4.0 + std::sqrt(17.0), 1e-14);
}

TEST(FundamentalUnit, RejectsBadInput)
{
    EXPECT_THROW(fundamental_unit(9), DomainError);
    EXPECT_THROW(fundamental_unit(12), DomainError);
}

// Pell solution exact for every non-square d = 1 mod 4 below 1e5, and no
// smaller b solves either equation (searched up to min(b, 2000)).
TEST(FundamentalUnit, ExactAndMinimal)
{
    for (std::uint64_t d = 5; d <= 100000; d += 4) {
        if (is_square(d)) continue;
        const UnitInfo u = fundamental_unit(d);
        const BigInt norm = u.a * u.a - u.b * u.b * BigInt(d);
        ASSERT_EQ(norm, 4 * u.norm_sign) << d;
        ASSERT_GT(u.regulator, 0);
        const std::uint64_t limit = u.b < 2000 ? u.b.convert_to<std::uint64_t>() : 2000;
        for (std::uint64_t b = 1; b < limit; ++b) {
            const std::uint64_t bd = b * b * d;
            ASSERT_FALSE(is_square(bd + 4)) << "d=" << d << " b=" << b;
            ASSERT_FALSE(bd >= 4 && is_square(bd - 4)) << "d=" << d << " b=" << b;
        }
    }
}

TEST(FundamentalUnit, FamilyUnitIs2mPlusSqrtD)
{
    for (std::uint64_t m = 2; m <= 1000; ++m) {
        if (!factor_chowla(m).is_squarefree) continue;
        const std::uint64_t d = 4 * m * m + 1;
        const UnitInfo u = fundamental_unit(d);
        ASSERT_EQ(u.a, 4 * m) << m;
        ASSERT_EQ(u.b, 2) << m;
        const Quad expected = Quad(2 * m) + sqrt(Quad(d));
        ASSERT_LE(abs(u.epsilon - expected), 2 * std::numeric_limits<Quad>::epsilon() * expected) << m;
    }
}
