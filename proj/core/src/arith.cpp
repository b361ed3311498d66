#include "chowla/arith.hpp"
#include "chowla/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace chowla {

u64 isqrt(u64 n)
{
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square(u64 n)
{
    const u64 r = isqrt(n);
    return r * r == n;
}

u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m)
{
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n)
{
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This base set is deterministic for all n < 3.3e24.
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

bool sqrt_mod_prime(u64 a, u64 p, u64& root)
{
    a %= p;
    if (p == 2 || a == 0) {
        root = a;
        return true;
    }
    if (powmod(a, (p - 1) / 2, p) != 1) return false;
    if (p % 4 == 3) {
        root = powmod(a, (p + 1) / 4, p);
        return true;
    }
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    u64 m = static_cast<u64>(s);
    u64 c = powmod(z, q, p);
    u64 t = powmod(a, q, p);
    u64 r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0;
        u64 t2 = t;
        while (t2 != 1) {
            t2 = mulmod(t2, t2, p);
            ++i;
        }
        u64 b = c;
        for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    root = r;
    return true;
}

int kronecker(i64 d, u64 n)
{
    static constexpr std::array<int, 8> tab2 = {0, 1, 0, -1, 0, -1, 0, 1};
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    if ((d & 1) == 0 && (n & 1) == 0) return 0;

    int v = std::countr_zero(n);
    n >>= v;
    int k = (v & 1) ? tab2[static_cast<unsigned>(d & 7)] : 1;

    // n is odd and positive; d may be negative only on the first pass.
    i64 a = d;
    u64 b = n;
    for (;;) {
        if (a == 0) return b > 1 ? 0 : k;
        v = std::countr_zero(static_cast<u64>(a));
        a >>= v;
        if (v & 1) k *= tab2[b & 7];
        if (a & static_cast<i64>(b) & 2) k = -k;
        const u64 r = a < 0 ? static_cast<u64>(-(a + 1)) + 1 : static_cast<u64>(a);
        a = static_cast<i64>(b % r);
        b = r;
    }
}

int c_of(u64 p)
{
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        throw DomainError("c(p) requires an odd prime, got " + std::to_string(p));
    return p % 4 == 1 ? 2 : 0;
}

int jacobsthal_sum(u64 p)
{
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        throw DomainError("jacobsthal_sum requires an odd prime, got " + std::to_string(p));
    int sum = 0;
    for (u64 m = 0; m < p; ++m) {
        const u64 value = (mulmod(4 % p, mulmod(m, m, p), p) + 1) % p;
        sum += kronecker(static_cast<i64>(value), p);
    }
    return sum;
}

namespace {

// Primes = 1 mod 4 up to the cube root of 2^63.
const std::vector<u64>& one_mod_four_primes()
{
    static const std::vector<u64> table = [] {
        std::vector<u64> out;
        for_each_prime_segment(5, 2'100'000, [&](std::span<const u64> seg) {
            for (u64 p : seg)
                if (p % 4 == 1) out.push_back(p);
        });
        return out;
    }();
    return table;
}

u64 pollard_brent(u64 n)
{
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

u64 icbrt(u64 n)
{
    u64 r = static_cast<u64>(std::cbrt(static_cast<double>(n)));
    while (r > 0 && static_cast<u128>(r) * r * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) * (r + 1) <= n) ++r;
    return r;
}

} // namespace

SquarefreeFactorization factor_chowla(u64 m)
{
    if (m == 0) throw DomainError("factor_chowla requires m >= 1");
    if (m > kMaxChowlaM)
        throw OverflowError("4m^2+1 overflows 63 bits for m = " + std::to_string(m));

    SquarefreeFactorization out;
    out.n = 4 * m * m + 1;
    u64 rest = out.n;
    const u64 bound = icbrt(out.n);
    for (u64 p : one_mod_four_primes()) {
        if (p > bound) break;
        if (rest % p) continue;
        int e = 0;
        do {
            rest /= p;
            ++e;
        } while (rest % p == 0);
        out.prime_powers.emplace_back(p, e);
        if (e > 1) out.is_squarefree = false;
    }
    // Every prime factor of rest exceeds n^{1/3}, so it has at most two.
    if (rest > 1) {
        if (is_prime(rest)) {
            out.prime_powers.emplace_back(rest, 1);
        } else if (is_square(rest)) {
            out.prime_powers.emplace_back(isqrt(rest), 2);
            out.is_squarefree = false;
        } else {
            u64 f = pollard_brent(rest);
            u64 g = rest / f;
            if (f > g) std::swap(f, g);
            out.prime_powers.emplace_back(f, 1);
            out.prime_powers.emplace_back(g, 1);
        }
    }
    return out;
}

} // namespace chowla
