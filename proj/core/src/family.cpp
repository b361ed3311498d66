#include "chowla/family.hpp"
#include "chowla/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/expint.hpp>

namespace chowla {

FamilyDiscriminant make_member(u64 m)
{
    FamilyDiscriminant out;
    out.m = m;
    out.d = 4 * m * m + 1;
    const double sd = std::sqrt(static_cast<double>(out.d));
    out.regulator_paper = std::log(2.0 * static_cast<double>(m) + sd);
    return out;
}

u64 max_m_for(double x)
{
    if (!(x >= 5.0)) throw DomainError("family bound must be >= 5");
    if (x > kMaxFamilyBound)
        throw OverflowError("family bound exceeds 1e12: " + std::to_string(x));
    const u64 xi = static_cast<u64>(std::floor(x));
    u64 m = isqrt((xi - 1) / 4);
    while (4 * (m + 1) * (m + 1) + 1 <= xi) ++m;
    while (m > 0 && 4 * m * m + 1 > xi) --m;
    return m;
}

FamilyStream::FamilyStream(double x) : FamilyStream(1, max_m_for(x)) {}

FamilyStream::FamilyStream(u64 m_lo, u64 m_hi) : m_hi_(m_hi), block_lo_(std::max<u64>(1, m_lo))
{
    if (m_hi_ > kMaxChowlaM) throw OverflowError("m range exceeds 63-bit discriminants");
    // p^2 | 4m^2+1 needs p <= 2m+1.
    const u64 bound = std::min<u64>(kSieveBound, 2 * m_hi_ + 1);
    for_each_prime_segment(5, bound, [&](std::span<const u64> seg) {
        for (u64 p : seg) {
            if (p % 4 != 1) continue;
            const u64 p2 = p * p;
            u64 s = 0;
            sqrt_mod_prime(p - 1, p, s);
            // Hensel lift of s^2 = -1 from p to p^2.
            const u64 t = ((s * s + 1) / p) % p;
            const u64 inv2s = powmod(2 * s % p, p - 2, p);
            const u64 k = (p - t * inv2s % p) % p;
            const u64 lifted = (s + k * p) % p2;
            const u64 inv2 = (p2 + 1) / 2;
            const u64 r = mulmod(lifted, inv2, p2);
            sieve_.push_back({p2, r, (p2 - r) % p2});
        }
    });
    marked_.resize(kBlock);
    fill_block();
}

void FamilyStream::fill_block()
{
    cursor_ = 0;
    block_len_ = block_lo_ > m_hi_ ? 0 : static_cast<std::size_t>(std::min<u64>(kBlock, m_hi_ - block_lo_ + 1));
    std::fill(marked_.begin(), marked_.begin() + static_cast<std::ptrdiff_t>(block_len_), 0);
    const u64 lo = block_lo_;
    const u64 hi = block_lo_ + block_len_; // exclusive
    for (const auto& sp : sieve_) {
        for (u64 r : {sp.r1, sp.r2}) {
            u64 first = lo % sp.square <= r ? lo - lo % sp.square + r : lo - lo % sp.square + sp.square + r;
            for (u64 m = first; m < hi; m += sp.square) marked_[m - lo] = 1;
        }
    }
}

std::optional<FamilyDiscriminant> FamilyStream::next()
{
    while (block_len_ > 0) {
        while (cursor_ < block_len_) {
            const std::size_t i = cursor_++;
            if (marked_[i]) continue;
            const u64 m = block_lo_ + i;
            if (!factor_chowla(m).is_squarefree) continue;
            return make_member(m);
        }
        block_lo_ += block_len_;
        fill_block();
    }
    return std::nullopt;
}

std::vector<FamilyDiscriminant> enumerate(double x)
{
    return enumerate_range(1, max_m_for(x));
}

std::vector<FamilyDiscriminant> enumerate_range(u64 m_lo, u64 m_hi)
{
    std::vector<FamilyDiscriminant> out;
    FamilyStream stream(m_lo, m_hi);
    while (auto member = stream.next()) out.push_back(*member);
    return out;
}

DensityConstant density_constant(u64 prime_bound)
{
    if (prime_bound < 1000) throw DomainError("density prime bound must be >= 1000");
    double log_sum = 0.0, comp = 0.0;
    for_each_prime_segment(5, prime_bound, [&](std::span<const u64> seg) {
        for (u64 p : seg) {
            if (p % 4 != 1) continue;
            const double pd = static_cast<double>(p);
            const double term = std::log1p(-2.0 / (pd * pd)) - comp;
            const double t = log_sum + term;
            comp = (t - log_sum) - term;
            log_sum = t;
        }
    });
    const double log_p = std::log(static_cast<double>(prime_bound));
    // sum_{p>P, p=1(4)} 2/p^2 ~ int_P^inf dt/(t^2 log t) = E1(log P).
    const double tail = boost::math::expint(1, log_p);
    DensityConstant out;
    out.value = std::exp(log_sum - tail);
    out.error_bound = 5.02 / (static_cast<double>(prime_bound) * log_p);
    out.prime_bound = prime_bound;
    return out;
}

FamilyCount count_and_compare(double x, u64 density_prime_bound)
{
    FamilyCount out;
    out.x = x;
    FamilyStream stream(x);
    while (stream.next()) ++out.count;
    const DensityConstant dc = density_constant(density_prime_bound);
    out.density_constant = dc.value;
    out.density_error = dc.error_bound * std::sqrt(x) / 2.0;
    out.predicted = std::sqrt(x) / 2.0 * dc.value;
    const double scale = std::cbrt(x) * std::log(x);
    out.band = out.band_constant * scale + out.density_error;
    out.normalized_deviation = (static_cast<double>(out.count) - out.predicted) / scale;
    return out;
}

} // namespace chowla
