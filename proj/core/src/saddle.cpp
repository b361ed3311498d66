#include "chowla/error.hpp"
#include "chowla/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace chowla {

namespace {

struct Root {
    double r = 0.0;
    ScriptLDerivatives at;
    int iterations = 0;
};

// Solves f(r) = target for increasing f on (0, hi], where eval(r) returns
// (f, f') together with the script-L data at the relevant point. Newton steps
// that leave the bracket are replaced by bisection.
template <class Eval>
Root solve_increasing(Eval&& eval, double target, double guess, double cap)
{
    double lo = 0.0;
    double hi = std::min(cap, std::max(1.0, 4.0 * guess));
    for (;;) {
        const auto [f, df, at] = eval(hi);
        (void)df;
        (void)at;
        if (f >= target) break;
        if (hi >= cap) throw ConvergenceError("saddle point lies beyond the supported range of r");
        lo = hi;
        hi = std::min(cap, hi * 4.0);
    }
    double r = std::min(std::max(guess, lo), hi);
    if (r <= 0.0) r = 0.5 * hi;
    for (int it = 1; it <= 200; ++it) {
        const auto [f, df, at] = eval(r);
        const double g = f - target;
        if (std::fabs(g) <= 1e-10) return {r, at, it};
        if (g < 0.0) lo = r; else hi = r;
        double next = r - g / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        r = next;
    }
    throw ConvergenceError("saddle point iteration did not converge in 200 steps");
}

} // namespace

double phi_asymptotic(double tau)
{
    return std::exp(-std::exp(tau - C0()) / tau);
}

SaddleResult solve_saddle(const RandomModel& model, double tau)
{
    if (!(tau >= 1.0)) throw DomainError("solve_saddle requires tau >= 1, got " + std::to_string(tau));
    const double euler = std::numbers::egamma;
    const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    const double guess = std::exp(tau - C0());
    const double cap = RandomModel::kMaxRealPart;

    struct Eval {
        double f, df;
        ScriptLDerivatives at;
    };

    SaddleResult out;
    out.tau = tau;
    out.advisory = tau < 2.0;

    const double upper_target = std::log(tau) + euler;
    const Root up = solve_increasing(
        [&](double r) {
            const ScriptLDerivatives d = model.derivatives(r);
            return Eval{d.first, d.second, d};
        },
        upper_target, guess, cap);
    out.kappa = up.r;
    out.L_at = up.at.value;
    out.L2_at = up.at.second;
    out.iterations = up.iterations;
    out.log_phi = out.L_at - out.kappa * upper_target -
                  std::log(out.kappa * std::sqrt(2.0 * std::numbers::pi * out.L2_at));
    out.phi = std::exp(out.log_phi);

    // L'(-k) decreases in k; solve -L'(-k) = -(log zeta(2) - gamma - log tau).
    const double lower_target = -(std::log(zeta2) - euler - std::log(tau));
    const Root down = solve_increasing(
        [&](double k) {
            const ScriptLDerivatives d = model.derivatives(-k);
            return Eval{-d.first, d.second, d};
        },
        lower_target, guess, cap);
    out.kappa_lower = down.r;
    out.L_at_lower = down.at.value;
    out.L2_at_lower = down.at.second;
    out.log_psi = out.L_at_lower + out.kappa_lower * std::log(zeta2 / (std::exp(euler) * tau)) -
                  std::log(out.kappa_lower * std::sqrt(2.0 * std::numbers::pi * out.L2_at_lower));
    out.psi = std::exp(out.log_psi);

    out.rel_error_indicator = std::sqrt(std::max(std::log(out.kappa), 1.0) / out.kappa);
    return out;
}

} // namespace chowla
