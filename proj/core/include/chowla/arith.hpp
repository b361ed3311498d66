#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace chowla {

using u64 = std::uint64_t;
using i64 = std::int64_t;
__extension__ using u128 = unsigned __int128;

/// 113-bit mantissa real used for fundamental units and regulators.
using Quad = boost::multiprecision::cpp_bin_float_quad;
using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Primes

/// Immutable table of the primes up to `limit`, built with a segmented sieve
/// of Eratosthenes. Safe for concurrent read access once constructed.
class PrimeTable {
public:
    explicit PrimeTable(u64 limit);

    u64 limit() const noexcept { return limit_; }
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }
    std::size_t size() const noexcept { return primes_.size(); }
    std::uint32_t operator[](std::size_t i) const noexcept { return primes_[i]; }

    /// Exact for n <= limit(); throws DomainError above it.
    bool contains(u64 n) const;

    /// Residue of the i-th prime modulo 4 (2 for p = 2).
    unsigned residue_mod4(std::size_t i) const noexcept { return residue_[i]; }

    /// Number of primes <= n (n <= limit()).
    std::size_t count_upto(u64 n) const;

private:
    u64 limit_;
    std::vector<std::uint32_t> primes_;
    std::vector<std::uint8_t> residue_;
    std::vector<std::uint64_t> odd_bits_; // bit i set <=> 2i+1 prime
};

/// Streams the primes in [lo, hi] segment by segment without materialising
/// them; fn receives each segment's primes in increasing order.
void for_each_prime_segment(u64 lo, u64 hi,
                            const std::function<void(std::span<const u64>)>& fn);

/// Deterministic Miller-Rabin, valid for every 64-bit n.
bool is_prime(u64 n);

u64 isqrt(u64 n);
bool is_square(u64 n);
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);

/// A square root of a modulo the odd prime p (Tonelli-Shanks).
/// Returns false when a is a non-residue.
bool sqrt_mod_prime(u64 a, u64 p, u64& root);

// ---------------------------------------------------------------------------
// Characters

/// Kronecker symbol (d/n) for any integer d and n >= 0.
int kronecker(i64 d, u64 n);

/// c(p) = 1 + (-1/p) for odd primes: 2 if p = 1 mod 4, else 0.
int c_of(u64 p);

/// Brute-force sum_{m=0}^{p-1} ((4m^2+1)/p) for an odd prime p.
int jacobsthal_sum(u64 p);

// ---------------------------------------------------------------------------
// Factorisation of 4m^2+1

struct SquarefreeFactorization {
    u64 n = 0;
    std::vector<std::pair<u64, int>> prime_powers;
    bool is_squarefree = true;
};

/// Largest m accepted by factor_chowla (4m^2+1 must stay below 2^63).
inline constexpr u64 kMaxChowlaM = 1'518'500'249ULL;

/// Exact factorisation of 4m^2+1. Trial division by primes = 1 mod 4 up to
/// the cube root, then the cofactor is classified as 1, prime, prime square
/// or a product of two distinct primes.
SquarefreeFactorization factor_chowla(u64 m);

// ---------------------------------------------------------------------------
// Units

struct UnitInfo {
    u64 d = 0;
    BigInt a;            // smallest positive solution of a^2 - b^2 d = +-4
    BigInt b;
    Quad epsilon;        // (a + b sqrt d) / 2
    Quad regulator;      // log epsilon
    int norm_sign = 0;   // sign of a^2 - b^2 d
};

/// Fundamental unit of Q(sqrt d), d = 1 mod 4 non-square, from the continued
/// fraction of (1 + sqrt d)/2.
UnitInfo fundamental_unit(u64 d);

} // namespace chowla
