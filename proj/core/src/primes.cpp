#include "chowla/arith.hpp"
#include "chowla/error.hpp"

#include <algorithm>
#include <string>

namespace chowla {

namespace {

constexpr u64 kSegmentOdds = 1u << 18;

// Odd primes up to n by a plain sieve; used as sieving primes.
std::vector<u64> small_odd_primes(u64 n)
{
    std::vector<u64> out;
    if (n < 3) return out;
    std::vector<std::uint8_t> composite((n - 1) / 2 + 1, 0);
    for (u64 i = 3; i * i <= n; i += 2) {
        if (composite[i / 2]) continue;
        for (u64 j = i * i; j <= n; j += 2 * i) composite[j / 2] = 1;
    }
    for (u64 i = 3; i <= n; i += 2)
        if (!composite[i / 2]) out.push_back(i);
    return out;
}

} // namespace

void for_each_prime_segment(u64 lo, u64 hi,
                            const std::function<void(std::span<const u64>)>& fn)
{
    if (hi < 2 || lo > hi) return;
    std::vector<u64> found;
    if (lo <= 2) {
        found.push_back(2);
        fn(found);
        lo = 3;
    }
    if (lo % 2 == 0) ++lo;
    if (lo > hi) return;

    const std::vector<u64> base = small_odd_primes(isqrt(hi));
    std::vector<std::uint8_t> composite(kSegmentOdds);
    for (u64 seg_lo = lo; seg_lo <= hi;) {
        // Segment covers odd numbers seg_lo, seg_lo+2, ..., seg_hi.
        const u64 span_odds = std::min<u64>(kSegmentOdds, (hi - seg_lo) / 2 + 1);
        const u64 seg_hi = seg_lo + 2 * (span_odds - 1);
        std::fill(composite.begin(), composite.begin() + static_cast<std::ptrdiff_t>(span_odds), 0);
        for (u64 p : base) {
            if (p * p > seg_hi) break;
            u64 start = std::max(p * p, (seg_lo + p - 1) / p * p);
            if (start % 2 == 0) start += p;
            for (u64 j = start; j <= seg_hi; j += 2 * p) composite[(j - seg_lo) / 2] = 1;
        }
        found.clear();
        for (u64 i = 0; i < span_odds; ++i)
            if (!composite[i]) found.push_back(seg_lo + 2 * i);
        // 1 is not prime.
        if (!found.empty() && found.front() == 1) found.erase(found.begin());
        if (!found.empty()) fn(found);
        if (seg_hi >= hi) break;
        seg_lo = seg_hi + 2;
    }
}

PrimeTable::PrimeTable(u64 limit) : limit_(limit)
{
    if (limit > (u64{1} << 32))
        throw DomainError("PrimeTable limit " + std::to_string(limit) + " exceeds 2^32");
    odd_bits_.assign(limit / 128 + 1, 0);
    for_each_prime_segment(2, limit, [&](std::span<const u64> seg) {
        for (u64 p : seg) {
            primes_.push_back(static_cast<std::uint32_t>(p));
            residue_.push_back(static_cast<std::uint8_t>(p % 4));
            if (p & 1) odd_bits_[p / 128] |= std::uint64_t{1} << ((p / 2) % 64);
        }
    });
}

bool PrimeTable::contains(u64 n) const
{
    if (n > limit_)
        throw DomainError("PrimeTable query " + std::to_string(n) + " above limit " +
                          std::to_string(limit_));
    if (n == 2) return true;
    if (n < 2 || n % 2 == 0) return false;
    return (odd_bits_[n / 128] >> ((n / 2) % 64)) & 1u;
}

std::size_t PrimeTable::count_upto(u64 n) const
{
    return static_cast<std::size_t>(
        std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

} // namespace chowla
