#pragma once

#include "chowla/arith.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace chowla {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// The random variables X(p)

/// Law of X(p): +1 with probability alpha, -1 with beta, 0 with gamma.
struct PrimeModel {
    u64 p = 0;
    int c = 0; // c(p); 0 for p = 2 where it is unused
    Rational alpha, beta, gamma;
    double alpha_f = 0.0, beta_f = 0.0, gamma_f = 0.0;
};

PrimeModel prime_model(u64 p);

/// E[X(m)] in closed form (zero when the power of 2 in m is odd).
Rational expected_X(u64 m);

/// (1/m) sum_{n=1}^{m} ((4n^2+1)/m) in closed form.
Rational complete_char_sum(u64 m);

/// The same average by direct summation of Kronecker symbols.
Rational complete_char_sum_brute(u64 m);

/// E_p(z) = alpha (1-1/p)^{-z} + beta (1+1/p)^{-z} + gamma.
Complex ep(u64 p, Complex z);

// ---------------------------------------------------------------------------
// log E(L(1,X)^z)

struct ScriptL {
    Complex value;
    double error_bound = 0.0;
    u64 prime_bound = 0;
};

struct ScriptLDerivatives {
    double value = 0.0;   // L(r)
    double first = 0.0;   // L'(r)
    double second = 0.0;  // L''(r)
    double error_value = 0.0;
    double error_first = 0.0;
    double error_second = 0.0;
    u64 prime_bound = 0;
};

/// Per-prime data for the Euler product model, precomputed up to a prime
/// limit. Immutable after construction; prime sums run in fixed-size blocks
/// that are reduced in order, so results do not depend on `threads`.
class RandomModel {
public:
    static constexpr u64 kDefaultPrimeLimit = 21'000'000;
    static constexpr double kMaxRealPart = 1e5;
    static constexpr double kMinComplexRealPart = -5.0;
    static constexpr double kMaxImagPart = 1e4;

    explicit RandomModel(u64 prime_limit = kDefaultPrimeLimit, unsigned threads = 1);

    u64 prime_limit() const noexcept { return prime_limit_; }
    unsigned threads() const noexcept { return threads_; }

    /// Truncation point for |z|: max(1e6, 200|z|), raised until the tail
    /// majorant meets `precision` when one is given.
    u64 truncation_for(double abs_z, double precision = 0.0) const;

    /// sum_p log E_p(z) with the tail estimate folded in; throws BudgetError
    /// when `precision` cannot be met below the prime limit.
    ScriptL script_L(Complex z, double precision = 0.0) const;

    /// L(r), L'(r), L''(r) for real r in one pass.
    ScriptLDerivatives derivatives(double r) const;

    /// Weight of X(p) values for sampling; primes up to `bound`.
    std::span<const double> primes() const noexcept { return p_; }
    std::span<const double> alpha() const noexcept { return alpha_; }
    std::span<const double> beta() const noexcept { return beta_; }
    std::span<const double> gamma() const noexcept { return gamma_; }

private:
    std::size_t count_upto(u64 bound) const;

    u64 prime_limit_;
    unsigned threads_;
    std::vector<double> p_, alpha_, beta_, gamma_, log_minus_, log_plus_;
};

// ---------------------------------------------------------------------------
// Saddle point

struct SaddleResult {
    double tau = 0.0;
    double kappa = 0.0;        // L'(kappa) = log tau + gamma
    double L_at = 0.0;         // L(kappa)
    double L2_at = 0.0;        // L''(kappa)
    double phi = 0.0;          // P(L(1,X) > e^gamma tau)
    double log_phi = 0.0;      // kept separately: phi underflows near tau = 10
    double kappa_lower = 0.0;  // L'(-kappa_lower) = log zeta(2) - gamma - log tau
    double L_at_lower = 0.0;
    double L2_at_lower = 0.0;
    double psi = 0.0;          // P(L(1,X) < zeta(2) / (e^gamma tau))
    double log_psi = 0.0;
    double rel_error_indicator = 0.0; // sqrt(log kappa / kappa)
    int iterations = 0;
    bool advisory = false;     // tau < 2: saddle error not small
};

SaddleResult solve_saddle(const RandomModel& model, double tau);

/// exp(-e^{tau - C0} / tau).
double phi_asymptotic(double tau);

// ---------------------------------------------------------------------------
// Constants

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

/// int_0^1 tanh(t)/t dt + int_1^inf (tanh(t) - 1)/t dt.
ValueWithError compute_C0();
/// Quadrature for C0 at a fixed composite Simpson step; used for
/// step-halving checks.
double compute_C0_simpson(int panels_per_unit);

/// Catalan's constant by an accelerated alternating series.
ValueWithError compute_catalan(int terms = 26);

/// C0 to double precision, computed once.
double C0();

struct Constants {
    double euler_gamma = 0.0;
    double zeta2 = 0.0;
    ValueWithError C0;
    ValueWithError catalan_G;
    ValueWithError density_constant;
    ValueWithError C1;
};

Constants compute_constants(u64 density_prime_bound = 300'000'000);

// ---------------------------------------------------------------------------
// Monte Carlo

/// Draws L(1,X) samples: X(p) sampled for p <= P_mc from a counter-based
/// generator keyed by (seed, sample index, prime index); primes in
/// (P_mc, P_det] contribute their expected log factor deterministically.
class EulerProductSampler {
public:
    static constexpr u64 kDefaultSampledPrimes = 1000;
    static constexpr u64 kDefaultDeterministicPrimes = 10'000'000;

    EulerProductSampler(std::uint64_t seed, u64 sampled_prime_bound = kDefaultSampledPrimes,
                        u64 deterministic_prime_bound = kDefaultDeterministicPrimes);

    double sample(std::uint64_t index) const;
    double log_tail_factor() const noexcept { return log_tail_; }
    /// Bound on the omitted primes above the deterministic bound.
    double residual_bias_bound() const noexcept { return bias_bound_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::vector<std::uint64_t> threshold_plus_, threshold_minus_;
    std::vector<double> log_plus_, log_minus_;
    double log_tail_ = 0.0;
    double bias_bound_ = 0.0;
};

std::vector<double> sample_L(std::uint64_t seed, std::uint64_t count,
                             u64 sampled_prime_bound = EulerProductSampler::kDefaultSampledPrimes);

struct MonteCarloTails {
    std::uint64_t samples = 0;
    std::vector<double> tau;
    std::vector<std::uint64_t> upper_hits;  // L > e^gamma tau
    std::vector<std::uint64_t> lower_hits;  // L < zeta(2)/(e^gamma tau)
    double mean = 0.0;
    double mean_stderr = 0.0;

    double upper(std::size_t i) const { return static_cast<double>(upper_hits[i]) / static_cast<double>(samples); }
    double lower(std::size_t i) const { return static_cast<double>(lower_hits[i]) / static_cast<double>(samples); }
};

MonteCarloTails monte_carlo_tails(const EulerProductSampler& sampler, std::uint64_t samples,
                                  std::span<const double> tau_grid, unsigned threads = 1);

} // namespace chowla
