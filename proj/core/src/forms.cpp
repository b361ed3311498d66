#include "chowla/error.hpp"
#include "chowla/lfun.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace chowla {

namespace {

// Sieving primes for the factorisation of (d - b^2)/4; covers d < 4e12.
const PrimeTable& sieving_primes()
{
    static const PrimeTable table(1'000'000);
    return table;
}

struct Form {
    i64 a;
    i64 b;
    friend bool operator<(const Form& x, const Form& y)
    {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    }
    friend bool operator==(const Form&, const Form&) = default;
};

constexpr int kMaxFactors = 16;

struct Factored {
    std::array<std::uint32_t, kMaxFactors> prime{};
    std::array<std::uint8_t, kMaxFactors> exponent{};
    int count = 0;
    u64 rest = 0;
};

void add_factor(Factored& f, u64 p, int e)
{
    f.prime[static_cast<std::size_t>(f.count)] = static_cast<std::uint32_t>(p);
    f.exponent[static_cast<std::size_t>(f.count)] = static_cast<std::uint8_t>(e);
    ++f.count;
}

// Factors n_k = M - k(k+1) for k in [0, count). A prime p divides n_k iff
// (2k+1)^2 = d (mod p), so each prime strides through at most two classes.
std::vector<Factored> factor_window(u64 d, u64 count)
{
    const u64 M = (d - 1) / 4;
    std::vector<Factored> out(count);
    for (u64 k = 0; k < count; ++k) out[k].rest = M - k * (k + 1);

    auto strike = [&](u64 p, u64 k0, u64 stride) {
        for (u64 k = k0; k < count; k += stride) {
            Factored& f = out[k];
            int e = 0;
            while (f.rest % p == 0) {
                f.rest /= p;
                ++e;
            }
            if (e) add_factor(f, p, e);
        }
    };

    if (M % 2 == 0) strike(2, 0, 1); // k(k+1) is even, so n_k = M (mod 2)

    const u64 root_bound = isqrt(M);
    std::span<const std::uint32_t> primes = sieving_primes().primes();
    std::vector<u64> local;
    if (root_bound > sieving_primes().limit()) {
        for_each_prime_segment(3, root_bound, [&](std::span<const u64> seg) {
            local.insert(local.end(), seg.begin(), seg.end());
        });
    }
    auto visit = [&](u64 p) {
        const u64 dp = d % p;
        const u64 inv2 = (p + 1) / 2;
        if (dp == 0) {
            strike(p, (p - 1) / 2, p);
            return;
        }
        u64 s = 0;
        if (!sqrt_mod_prime(dp, p, s)) return;
        const u64 k1 = mulmod((s + p - 1) % p, inv2, p);
        const u64 k2 = mulmod((2 * p - s - 1) % p, inv2, p);
        strike(p, k1, p);
        if (k2 != k1) strike(p, k2, p);
    };
    if (local.empty()) {
        for (std::uint32_t p : primes) {
            if (p == 2) continue;
            if (p > root_bound) break;
            visit(p);
        }
    } else {
        for (u64 p : local) visit(p);
    }
    // Whatever remains has no prime factor <= sqrt(M) and is <= M: prime or 1.
    return out;
}

void divisors_in_window(const Factored& f, u64 lo, u64 hi, std::vector<u64>& out)
{
    out.clear();
    std::vector<u64> divs{1};
    auto extend = [&](u64 p, int e) {
        const std::size_t base = divs.size();
        u64 pk = 1;
        for (int j = 1; j <= e; ++j) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) {
                const u128 v = static_cast<u128>(divs[i]) * pk;
                if (v <= hi) divs.push_back(static_cast<u64>(v));
            }
        }
    };
    for (int i = 0; i < f.count; ++i) extend(f.prime[static_cast<std::size_t>(i)], f.exponent[static_cast<std::size_t>(i)]);
    if (f.rest > 1) extend(f.rest, 1);
    for (u64 v : divs)
        if (v >= lo && v <= hi) out.push_back(v);
}

i64 floor_mod(i64 a, i64 m)
{
    const i64 r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace

FormCycles count_form_cycles(u64 d)
{
    if (d < 5 || d % 4 != 1 || is_square(d))
        throw DomainError("reduced-form cycles need a non-square d = 1 mod 4, got " + std::to_string(d));
    if (d > (u64{1} << 62)) throw OverflowError("discriminant too large for form enumeration");

    const u64 s = isqrt(d);
    const u64 count = (s + 1) / 2; // odd b = 2k+1 <= s
    const auto factored = factor_window(d, count);

    // Reduced: 0 < b < sqrt d and sqrt d - b < 2|a| < sqrt d + b.
    std::vector<Form> forms;
    std::vector<u64> divs;
    for (u64 k = 0; k < count; ++k) {
        const u64 b = 2 * k + 1;
        const u64 lo = (s - b + 2) / 2; // 2a >= s - b + 1
        const u64 hi = (s + b) / 2;     // 2a <= s + b
        divisors_in_window(factored[k], std::max<u64>(lo, 1), hi, divs);
        for (u64 a : divs) {
            forms.push_back({static_cast<i64>(a), static_cast<i64>(b)});
            forms.push_back({-static_cast<i64>(a), static_cast<i64>(b)});
        }
    }
    std::sort(forms.begin(), forms.end());

    const auto sd = static_cast<i64>(d);
    const auto si = static_cast<i64>(s);
    auto index_of = [&](const Form& f) {
        auto it = std::lower_bound(forms.begin(), forms.end(), f);
        if (it == forms.end() || !(*it == f))
            throw Error("rho left the set of reduced forms (internal error) at d = " + std::to_string(d));
        return static_cast<std::size_t>(it - forms.begin());
    };
    auto rho = [&](const Form& f) {
        const i64 c = (f.b * f.b - sd) / (4 * f.a);
        const i64 mod = 2 * (c < 0 ? -c : c);
        const i64 r = floor_mod(-f.b, mod);
        const i64 b2 = si - floor_mod(si - r, mod);
        return Form{c, b2};
    };

    const i64 principal_b = (s % 2 == 1) ? si : si - 1;
    const Form principal{1, principal_b};
    const Form negated{-1, principal_b};

    FormCycles out;
    out.d = d;
    out.reduced_forms = forms.size();
    std::vector<std::uint32_t> cycle_of(forms.size(), 0);
    std::uint32_t cycles = 0;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        if (cycle_of[i]) continue;
        ++cycles;
        std::size_t j = i;
        do {
            cycle_of[j] = cycles;
            j = index_of(rho(forms[j]));
        } while (j != i);
    }
    out.narrow_class_number = cycles;
    out.norm_minus_one = cycle_of[index_of(principal)] == cycle_of[index_of(negated)];
    out.class_number = out.norm_minus_one ? cycles : cycles / 2;
    return out;
}

u64 forms_oracle(u64 d, u64 cap)
{
    if (d > cap)
        throw BudgetError("forms oracle cap exceeded: d = " + std::to_string(d) +
                          " > " + std::to_string(cap));
    if (d < 5 || d % 4 != 1) throw DomainError("forms oracle needs d = 1 mod 4, d >= 5");
    for (u64 p = 3; p * p <= d; p += 2)
        if (d % (p * p) == 0) throw DomainError("forms oracle needs squarefree d, got " + std::to_string(d));
    return count_form_cycles(d).class_number;
}

} // namespace chowla
