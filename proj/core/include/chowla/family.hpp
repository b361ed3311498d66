#pragma once

#include "chowla/arith.hpp"

#include <optional>
#include <vector>

namespace chowla {

/// One squarefree d = 4m^2 + 1.
struct FamilyDiscriminant {
    u64 m = 0;
    u64 d = 0;
    double regulator_paper = 0.0; // log(2m + sqrt d) = log(sqrt(d-1) + sqrt d)
    std::optional<double> cached_L;
    std::optional<u64> cached_h;
};

FamilyDiscriminant make_member(u64 m);

/// Largest bound accepted by the enumerators.
inline constexpr double kMaxFamilyBound = 1e12;

/// Largest m with 4m^2 + 1 <= x.
u64 max_m_for(double x);

/// Streams the members of the family with m in [m_lo, m_hi], ascending.
///
/// Residues m = +-r (mod p^2) are sieved out block by block for p = 1 mod 4
/// below a fixed bound; every survivor is then confirmed with factor_chowla.
/// Memory use is one block regardless of the range.
class FamilyStream {
public:
    static constexpr u64 kSieveBound = 10'000;
    static constexpr u64 kBlock = 1u << 16;

    explicit FamilyStream(double x);
    FamilyStream(u64 m_lo, u64 m_hi);

    std::optional<FamilyDiscriminant> next();

private:
    struct SievePrime {
        u64 square;
        u64 r1, r2;
    };

    void fill_block();

    u64 m_hi_;
    u64 block_lo_;
    std::vector<SievePrime> sieve_;
    std::vector<std::uint8_t> marked_;
    std::size_t cursor_ = 0;
    std::size_t block_len_ = 0;
};

/// Members with 4m^2+1 <= x, materialised.
std::vector<FamilyDiscriminant> enumerate(double x);
/// Members with m in [m_lo, m_hi], materialised.
std::vector<FamilyDiscriminant> enumerate_range(u64 m_lo, u64 m_hi);

struct DensityConstant {
    double value = 0.0;       // prod_{p>2} (1 - c(p)/p^2)
    double error_bound = 0.0; // rigorous bound on |value - true value|
    u64 prime_bound = 0;
};

/// Product up to prime_bound, corrected by the integral estimate of the
/// remaining primes. The error bound is the majorant 5.02/(P log P).
DensityConstant density_constant(u64 prime_bound);

struct FamilyCount {
    double x = 0.0;
    u64 count = 0;
    double predicted = 0.0;
    double density_constant = 0.0;
    double density_error = 0.0;
    double band_constant = 1.0;   // C in |count - predicted| <= C x^{1/3} log x
    double band = 0.0;
    double normalized_deviation = 0.0; // (count - predicted) / (x^{1/3} log x)
};

FamilyCount count_and_compare(double x, u64 density_prime_bound = 10'000'000);

} // namespace chowla
