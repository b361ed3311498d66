#include "chowla/error.hpp"
#include "chowla/model.hpp"
#include "chowla/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/expint.hpp>

namespace chowla {

namespace {

struct PrimePower {
    u64 p;
    int e;
};

std::vector<PrimePower> factor_small(u64 m)
{
    std::vector<PrimePower> out;
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (m > 1) out.push_back({m, 1});
    return out;
}

// Lemma-style product shared by expected_X and complete_char_sum; the
// (1 - c/p^2)^{-1} factors are included only for expected_X.
Rational char_average_closed_form(u64 m, bool with_density)
{
    if (m == 0) throw DomainError("m must be >= 1");
    Rational result = 1;
    Rational m0 = 1;
    int sign = 1;
    for (const auto& [p, e] : factor_small(m)) {
        if (p == 2) {
            if (e % 2) return 0;
            continue;
        }
        const int c = (p % 4 == 1) ? 2 : 0;
        const Rational pr = p;
        if (e % 2 == 0) {
            result *= 1 - Rational(c) / pr;
        } else {
            m0 *= pr;
            sign = -sign;
        }
        if (with_density) result /= 1 - Rational(c) / (pr * pr);
    }
    return Rational(sign) * result / m0;
}

double sum_tail_estimate(double log_p)
{
    // sum_{p > P} 1/p^2 ~ E1(log P)
    return boost::math::expint(1, log_p);
}

constexpr std::size_t kBlock = 1u << 15;

} // namespace

PrimeModel prime_model(u64 p)
{
    if (!is_prime(p)) throw DomainError("prime_model requires a prime, got " + std::to_string(p));
    PrimeModel out;
    out.p = p;
    if (p == 2) {
        out.alpha = Rational(1, 2);
        out.beta = Rational(1, 2);
        out.gamma = 0;
    } else {
        out.c = c_of(p);
        const Rational pr = p;
        const Rational c = out.c;
        const Rational inv_density = 1 / (1 - c / (pr * pr));
        out.alpha = Rational(1, 2) * (1 - (c + 1) / pr) * inv_density;
        out.beta = Rational(1, 2) * (1 - (c - 1) / pr) * inv_density;
        out.gamma = 1 - (1 - c / pr) * inv_density;
    }
    out.alpha_f = out.alpha.convert_to<double>();
    out.beta_f = out.beta.convert_to<double>();
    out.gamma_f = out.gamma.convert_to<double>();
    return out;
}

Rational expected_X(u64 m)
{
    return char_average_closed_form(m, true);
}

Rational complete_char_sum(u64 m)
{
    return char_average_closed_form(m, false);
}

Rational complete_char_sum_brute(u64 m)
{
    if (m == 0) throw DomainError("m must be >= 1");
    i64 sum = 0;
    for (u64 n = 1; n <= m; ++n) {
        const u64 value = 4 * (n % m) * (n % m) % (4 * m) + 1; // only its class mod 4m matters
        sum += kronecker(static_cast<i64>(value), m);
    }
    return Rational(sum) / Rational(m);
}

Complex ep(u64 p, Complex z)
{
    if (std::fabs(z.real()) > RandomModel::kMaxRealPart)
        throw OverflowError("E_p(z) requested with |Re z| above the supported cap");
    const PrimeModel pm = prime_model(p);
    const double pd = static_cast<double>(p);
    const double l1 = -std::log1p(-1.0 / pd);
    const double l2 = -std::log1p(1.0 / pd);
    return pm.alpha_f * std::exp(z * l1) + pm.beta_f * std::exp(z * l2) + pm.gamma_f;
}

RandomModel::RandomModel(u64 prime_limit, unsigned threads)
    : prime_limit_(prime_limit), threads_(std::max(1u, threads))
{
    if (prime_limit < 1000) throw DomainError("model prime limit must be >= 1000");
    for_each_prime_segment(2, prime_limit, [&](std::span<const u64> seg) {
        for (u64 p : seg) {
            const double pd = static_cast<double>(p);
            double a, b, g;
            if (p == 2) {
                a = b = 0.5;
                g = 0.0;
            } else {
                const double c = (p % 4 == 1) ? 2.0 : 0.0;
                const double denom = 2.0 * (pd * pd - c);
                a = pd * (pd - c - 1.0) / denom;
                b = pd * (pd - c + 1.0) / denom;
                g = 2.0 * c * (pd - 1.0) / denom;
            }
            p_.push_back(pd);
            alpha_.push_back(a);
            beta_.push_back(b);
            gamma_.push_back(g);
            log_minus_.push_back(-std::log1p(-1.0 / pd));
            log_plus_.push_back(-std::log1p(1.0 / pd));
        }
    });
}

std::size_t RandomModel::count_upto(u64 bound) const
{
    return static_cast<std::size_t>(
        std::upper_bound(p_.begin(), p_.end(), static_cast<double>(bound)) - p_.begin());
}

u64 RandomModel::truncation_for(double abs_z, double precision) const
{
    double P = std::max(1e6, 200.0 * abs_z);
    if (precision > 0.0) {
        while (2.0 * (abs_z * abs_z + abs_z) / (P * std::log(P)) > precision) {
            P *= 1.25;
            if (P > static_cast<double>(prime_limit_)) break;
        }
    }
    if (P > static_cast<double>(prime_limit_))
        throw BudgetError("script L truncation needs primes up to " + std::to_string(P) +
                          " but the model holds primes up to " + std::to_string(prime_limit_));
    return static_cast<u64>(P);
}

ScriptL RandomModel::script_L(Complex z, double precision) const
{
    const bool real = z.imag() == 0.0;
    if (std::fabs(z.imag()) > kMaxImagPart || z.real() > kMaxRealPart ||
        z.real() < (real ? -kMaxRealPart : kMinComplexRealPart))
        throw DomainError("z outside the supported domain of the moment generating function");

    const double az = std::abs(z);
    const u64 P = truncation_for(az, precision);
    // E_p(0) = 1 exactly; skip the sum so rounding in alpha+beta+gamma does not show.
    if (az == 0.0) return {Complex(0.0, 0.0), 0.0, P};
    const std::size_t n = count_upto(P);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<Complex> partial(blocks);
    const bool right = z.real() >= 0.0;
    parallel_for(blocks, threads_, [&](std::size_t blk) {
        Complex acc = 0.0;
        const std::size_t end = std::min(n, (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) {
            const double l1 = log_minus_[i], l2 = log_plus_[i];
            if (right) {
                acc += z * l1 + std::log(alpha_[i] + beta_[i] * std::exp(z * (l2 - l1)) +
                                         gamma_[i] * std::exp(-z * l1));
            } else {
                acc += z * l2 + std::log(alpha_[i] * std::exp(z * (l1 - l2)) + beta_[i] +
                                         gamma_[i] * std::exp(-z * l2));
            }
        }
        partial[blk] = acc;
    });
    Complex total = 0.0;
    for (const Complex& v : partial) total += v;

    const double log_p = std::log(static_cast<double>(P));
    total += (z * z - z) / 2.0 * sum_tail_estimate(log_p);

    ScriptL out;
    out.value = total;
    out.prime_bound = P;
    out.error_bound = 2.0 * (az * az + az) / (static_cast<double>(P) * log_p) +
                      1e-14 * (std::abs(total) + 1.0);
    if (precision > 0.0 && out.error_bound > precision)
        throw BudgetError("script L precision " + std::to_string(precision) + " not reachable");
    return out;
}

ScriptLDerivatives RandomModel::derivatives(double r) const
{
    if (!(std::fabs(r) <= kMaxRealPart)) throw DomainError("r outside the supported range");
    const u64 P = truncation_for(std::fabs(r));
    const std::size_t n = count_upto(P);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    struct Partial {
        double v = 0.0, d1 = 0.0, d2 = 0.0;
    };
    std::vector<Partial> partial(blocks);
    const bool right = r >= 0.0;
    parallel_for(blocks, threads_, [&](std::size_t blk) {
        Partial acc;
        const std::size_t end = std::min(n, (blk + 1) * kBlock);
        for (std::size_t i = blk * kBlock; i < end; ++i) {
            const double l1 = log_minus_[i], l2 = log_plus_[i];
            double A, B, C, shift;
            if (right) {
                A = alpha_[i];
                B = beta_[i] * std::exp(r * (l2 - l1));
                C = gamma_[i] * std::exp(-r * l1);
                shift = r * l1;
            } else {
                A = alpha_[i] * std::exp(r * (l1 - l2));
                B = beta_[i];
                C = gamma_[i] * std::exp(-r * l2);
                shift = r * l2;
            }
            const double S = A + B + C;
            const double w1 = A / S, w2 = B / S;
            const double mean = w1 * l1 + w2 * l2;
            acc.v += shift + std::log(S);
            acc.d1 += mean;
            acc.d2 += w1 * l1 * l1 + w2 * l2 * l2 - mean * mean;
        }
        partial[blk] = acc;
    });
    ScriptLDerivatives out;
    for (const Partial& p : partial) {
        out.value += p.v;
        out.first += p.d1;
        out.second += p.d2;
    }
    const double log_p = std::log(static_cast<double>(P));
    const double tail = sum_tail_estimate(log_p);
    out.value += (r * r - r) / 2.0 * tail;
    out.first += (2.0 * r - 1.0) / 2.0 * tail;
    out.second += tail;

    const double ar = std::fabs(r);
    const double scale = static_cast<double>(P) * log_p;
    out.error_value = 2.0 * (ar * ar + ar) / scale + 1e-14 * (std::fabs(out.value) + 1.0);
    out.error_first = 2.0 * (2.0 * ar + 1.0) / scale + 1e-14 * (std::fabs(out.first) + 1.0);
    out.error_second = 4.0 / scale + 1e-14 * std::fabs(out.second);
    out.prime_bound = P;
    return out;
}

} // namespace chowla
