#include "chowla/error.hpp"
#include "chowla/model.hpp"
#include "chowla/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace chowla {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStream = 0xD1B54A32D192ED03ULL;

constexpr std::uint64_t mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t to_threshold(long double probability)
{
    const long double scaled = probability * 18446744073709551616.0L;
    if (scaled >= 18446744073709551615.0L) return std::numeric_limits<std::uint64_t>::max();
    if (scaled <= 0.0L) return 0;
    return static_cast<std::uint64_t>(scaled);
}

constexpr std::uint64_t kSampleBlock = 1u << 16;

} // namespace

EulerProductSampler::EulerProductSampler(std::uint64_t seed, u64 sampled_prime_bound,
                                         u64 deterministic_prime_bound)
    : seed_(seed), key_(mix(seed))
{
    if (sampled_prime_bound < 1000) throw DomainError("Monte Carlo needs P_mc >= 1000");
    if (deterministic_prime_bound < sampled_prime_bound)
        throw DomainError("deterministic prime bound must be >= P_mc");

    for_each_prime_segment(2, sampled_prime_bound, [&](std::span<const u64> seg) {
        for (u64 p : seg) {
            const PrimeModel pm = prime_model(p);
            const long double a = pm.alpha.convert_to<long double>();
            const long double b = pm.beta.convert_to<long double>();
            threshold_plus_.push_back(to_threshold(a));
            // gamma = 0 (p = 2 and p = 3 mod 4): every draw above alpha is -1.
            threshold_minus_.push_back(pm.gamma == 0 ? std::numeric_limits<std::uint64_t>::max()
                                                     : to_threshold(a + b));
            const double pd = static_cast<double>(p);
            log_plus_.push_back(-std::log1p(-1.0 / pd));
            log_minus_.push_back(-std::log1p(1.0 / pd));
        }
    });

    double tail = 0.0;
    for_each_prime_segment(sampled_prime_bound + 1, deterministic_prime_bound,
                           [&](std::span<const u64> seg) {
        double block = 0.0;
        for (u64 p : seg) {
            const double pd = static_cast<double>(p);
            const double c = (p % 4 == 1) ? 2.0 : 0.0;
            const double denom = 2.0 * (pd * pd - c);
            const double a = pd * (pd - c - 1.0) / denom;
            const double b = pd * (pd - c + 1.0) / denom;
            block += a * -std::log1p(-1.0 / pd) + b * -std::log1p(1.0 / pd);
        }
        tail += block;
    });
    log_tail_ = tail;
    // Each omitted prime contributes at most ~2.5/p^2 in absolute value.
    const double P = static_cast<double>(deterministic_prime_bound);
    bias_bound_ = 2.0 * 2.51 / (P * std::log(P));
}

double EulerProductSampler::sample(std::uint64_t index) const
{
    const std::uint64_t base = mix(key_ ^ (index * kGolden));
    double log_l = log_tail_;
    const std::size_t n = threshold_plus_.size();
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t u = mix(base + (j + 1) * kStream);
        if (u < threshold_plus_[j])
            log_l += log_plus_[j];
        else if (threshold_minus_[j] == std::numeric_limits<std::uint64_t>::max() ||
                 u < threshold_minus_[j])
            log_l += log_minus_[j];
    }
    return std::exp(log_l);
}

std::vector<double> sample_L(std::uint64_t seed, std::uint64_t count, u64 sampled_prime_bound)
{
    if (count == 0) throw DomainError("sample count must be >= 1");
    const EulerProductSampler sampler(seed, sampled_prime_bound);
    std::vector<double> out(count);
    for (std::uint64_t i = 0; i < count; ++i) out[i] = sampler.sample(i);
    return out;
}

MonteCarloTails monte_carlo_tails(const EulerProductSampler& sampler, std::uint64_t samples,
                                  std::span<const double> tau_grid, unsigned threads)
{
    if (samples == 0) throw DomainError("sample count must be >= 1");
    const double eg = std::exp(std::numbers::egamma);
    const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    const std::size_t g = tau_grid.size();
    std::vector<double> upper_cut(g), lower_cut(g);
    for (std::size_t i = 0; i < g; ++i) {
        upper_cut[i] = eg * tau_grid[i];
        lower_cut[i] = zeta2 / (eg * tau_grid[i]);
    }

    struct Partial {
        std::vector<std::uint64_t> up, low;
        double sum = 0.0, sum_sq = 0.0;
    };
    const std::size_t blocks = static_cast<std::size_t>((samples + kSampleBlock - 1) / kSampleBlock);
    std::vector<Partial> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t blk) {
        Partial acc;
        acc.up.assign(g, 0);
        acc.low.assign(g, 0);
        const std::uint64_t lo = blk * kSampleBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + kSampleBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            const double v = sampler.sample(i);
            acc.sum += v;
            acc.sum_sq += v * v;
            for (std::size_t t = 0; t < g; ++t) {
                acc.up[t] += v > upper_cut[t];
                acc.low[t] += v < lower_cut[t];
            }
        }
        partial[blk] = std::move(acc);
    });

    MonteCarloTails out;
    out.samples = samples;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    out.upper_hits.assign(g, 0);
    out.lower_hits.assign(g, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (const Partial& p : partial) {
        for (std::size_t t = 0; t < g; ++t) {
            out.upper_hits[t] += p.up[t];
            out.lower_hits[t] += p.low[t];
        }
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    const double n = static_cast<double>(samples);
    out.mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - out.mean * out.mean);
    out.mean_stderr = std::sqrt(var / n);
    return out;
}

} // namespace chowla
