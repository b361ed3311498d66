#include "chowla/family.hpp"
#include "chowla/model.hpp"

#include <cmath>
#include <numbers>

namespace chowla {

namespace {

double tanh_over_t(double t)
{
    return t == 0.0 ? 1.0 : std::tanh(t) / t;
}

// tanh(t) - 1 over t, written without cancellation.
double tanh_minus_one_over_t(double t)
{
    const double e = std::exp(-2.0 * t);
    return -2.0 * e / ((1.0 + e) * t);
}

struct Simpson {
    double value = 0.0;
    double error = 0.0;
};

template <class F>
void adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                      double tol, int depth, Simpson& acc)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) {
        acc.value += left + right + diff / 15.0;
        acc.error += std::fabs(diff) / 15.0;
        return;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc);
    adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

template <class F>
Simpson integrate(F&& f, double a, double b, double tol)
{
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    Simpson acc;
    adaptive_simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50, acc);
    return acc;
}

template <class F>
double composite_simpson(F&& f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

constexpr double kUpper = 30.0;

} // namespace

ValueWithError compute_C0()
{
    const Simpson head = integrate(tanh_over_t, 0.0, 1.0, 1e-14);
    const Simpson tail = integrate(tanh_minus_one_over_t, 1.0, kUpper, 1e-14);
    ValueWithError out;
    out.value = head.value + tail.value;
    out.error = head.error + tail.error + std::exp(-2.0 * kUpper) / kUpper + 1e-15;
    return out;
}

double compute_C0_simpson(int panels_per_unit)
{
    const int n = 2 * ((panels_per_unit + 1) / 2);
    return composite_simpson(tanh_over_t, 0.0, 1.0, n) +
           composite_simpson(tanh_minus_one_over_t, 1.0, kUpper, n * static_cast<int>(kUpper - 1.0));
}

double C0()
{
    static const double value = compute_C0().value;
    return value;
}

ValueWithError compute_catalan(int terms)
{
    // Cohen, Rodriguez Villegas and Zagier acceleration of sum (-1)^k a_k.
    const int n = terms;
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d, s = 0.0;
    for (int k = 0; k < n; ++k) {
        c = b - c;
        const double a = 1.0 / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
        s += c * a;
        b = (static_cast<double>(k) + n) * (static_cast<double>(k) - n) * b /
            ((k + 0.5) * (k + 1.0));
    }
    ValueWithError out;
    out.value = s / d;
    out.error = 2.0 / std::pow(3.0 + std::sqrt(8.0), n) + 1e-15;
    return out;
}

Constants compute_constants(u64 density_prime_bound)
{
    Constants out;
    out.euler_gamma = std::numbers::egamma;
    out.zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    out.C0 = compute_C0();
    out.catalan_G = compute_catalan();
    const DensityConstant dc = density_constant(density_prime_bound);
    out.density_constant = {dc.value, dc.error_bound};
    out.C1 = {dc.value / 2.0, dc.error_bound / 2.0};
    return out;
}

} // namespace chowla
