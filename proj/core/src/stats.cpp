#include "chowla/error.hpp"
#include "chowla/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace chowla {

namespace {

constexpr std::size_t kChunk = 256;

double log_h_ratio_predicted(u64 H, double G)
{
    const double h = static_cast<double>(H);
    return H <= 1 ? 0.0 : h * std::log(h) / (2.0 * G);
}

} // namespace

std::vector<FamilyLRecord> family_l_values(double x, const BulkOptions& options)
{
    const std::vector<FamilyDiscriminant> members = enumerate(x);
    return evaluate_family(members, options);
}

// ---------------------------------------------------------------------------

CharAverage char_average(u64 m, double x)
{
    if (!(x >= 100.0)) throw DomainError("char_average requires x >= 100");
    const std::vector<FamilyDiscriminant> members = enumerate(x);
    return char_average(m, members, x);
}

CharAverage char_average(u64 m, std::span<const FamilyDiscriminant> members, double x)
{
    if (m == 0) throw DomainError("char_average requires m >= 1");
    if (members.empty()) throw DomainError("char_average over an empty family");
    i64 sum = 0;
    for (const FamilyDiscriminant& f : members) sum += kronecker(static_cast<i64>(f.d), m);
    CharAverage out;
    out.m = m;
    out.x = x;
    out.n_discriminants = members.size();
    const double n = static_cast<double>(members.size());
    out.empirical = static_cast<double>(sum) / n;
    out.model = expected_X(m).convert_to<double>();
    out.stderr_ = std::sqrt(std::max(0.0, 1.0 - out.model * out.model) / n);
    return out;
}

// ---------------------------------------------------------------------------

void check_moment_domain(Complex z)
{
    if (!(z.real() >= RandomModel::kMinComplexRealPart) || !(std::abs(z) <= 50.0))
        throw DomainError("moments need Re z >= -5 and |z| <= 50");
}

MomentEstimate moment_compare(Complex z, std::span<const FamilyLRecord> records, double x,
                              const RandomModel& model, LMode mode)
{
    check_moment_domain(z);
    if (records.empty()) throw DomainError("moment over an empty family");
    Complex sum = 0.0;
    double abs_sum = 0.0, abs_sq = 0.0;
    for (const FamilyLRecord& r : records) {
        if (!(r.L > 0.0)) throw Error("non-positive L value at d = " + std::to_string(r.d));
        const Complex term = z == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : std::exp(z * std::log(r.L));
        sum += term;
        const double a = std::abs(term);
        abs_sum += a;
        abs_sq += a * a;
    }
    const double n = static_cast<double>(records.size());
    MomentEstimate out;
    out.z = z;
    out.x = x;
    out.n_discriminants = records.size();
    out.mode = mode;
    out.empirical = sum / n;
    const double mean_abs = abs_sum / n;
    out.empirical_stderr = std::sqrt(std::max(0.0, abs_sq / n - mean_abs * mean_abs) / n);
    if (z == Complex(0.0, 0.0)) {
        out.model = 1.0;
    } else {
        const ScriptL sl = model.script_L(z);
        out.model = std::exp(sl.value);
        out.model_rel_error = std::expm1(sl.error_bound);
    }
    return out;
}

MomentEstimate moment_compare(Complex z, double x, const RandomModel& model, const BulkOptions& options)
{
    check_moment_domain(z);
    const std::vector<FamilyLRecord> records = family_l_values(x, options);
    return moment_compare(z, records, x, model, options.mode);
}

// ---------------------------------------------------------------------------

double upper_fraction(std::span<const double> l_values, double tau)
{
    const double cut = std::exp(std::numbers::egamma) * tau;
    const auto hits = std::count_if(l_values.begin(), l_values.end(), [&](double v) { return v > cut; });
    return static_cast<double>(hits) / static_cast<double>(l_values.size());
}

double lower_fraction(std::span<const double> l_values, double tau)
{
    const double cut = std::numbers::pi * std::numbers::pi / 6.0 / (std::exp(std::numbers::egamma) * tau);
    const auto hits = std::count_if(l_values.begin(), l_values.end(), [&](double v) { return v < cut; });
    return static_cast<double>(hits) / static_cast<double>(l_values.size());
}

TailReport tail_report(std::span<const FamilyLRecord> records, double x,
                       std::span<const double> tau_grid, const RandomModel& model,
                       const TailOptions& options)
{
    if (records.empty()) throw DomainError("tail report over an empty family");
    for (double t : tau_grid)
        if (!(t >= 1.0 && t <= 3.0)) throw DomainError("tail grid must lie in [1, 3]");

    std::vector<double> l_values;
    l_values.reserve(records.size());
    for (const FamilyLRecord& r : records) l_values.push_back(r.L);

    TailReport out;
    out.x = x;
    out.n_discriminants = records.size();
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    const double n = static_cast<double>(records.size());
    const double eg = std::exp(std::numbers::egamma);
    const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
    for (double t : tau_grid) {
        u64 up = 0, low = 0;
        for (double v : l_values) {
            up += v > eg * t;
            low += v < zeta2 / (eg * t);
        }
        out.upper_counts.push_back(up);
        out.lower_counts.push_back(low);
        out.empirical_upper.push_back(static_cast<double>(up) / n);
        out.empirical_lower.push_back(static_cast<double>(low) / n);
        const SaddleResult s = solve_saddle(model, t);
        out.model_phi.push_back(s.phi);
        out.model_psi.push_back(s.psi);
        out.saddle_advisory.push_back(s.advisory);
    }

    out.seed = options.seed;
    out.mc_samples = options.mc_samples;
    if (options.mc_samples > 0) {
        const EulerProductSampler sampler(options.seed);
        const MonteCarloTails mc = monte_carlo_tails(sampler, options.mc_samples, tau_grid, options.threads);
        for (std::size_t i = 0; i < tau_grid.size(); ++i) {
            out.mc_upper.push_back(mc.upper(i));
            out.mc_lower.push_back(mc.lower(i));
        }
    }
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const bool use_mc = out.saddle_advisory[i] && options.mc_samples > 0;
        out.reference_upper.push_back(use_mc ? out.mc_upper[i] : out.model_phi[i]);
        out.reference_lower.push_back(use_mc ? out.mc_lower[i] : out.model_psi[i]);
        out.expected_upper_count.push_back(out.reference_upper[i] * n);
        out.expected_lower_count.push_back(out.reference_lower[i] * n);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Normalization n)
{
    return n == Normalization::paper ? "paper" : "classical";
}

Normalization parse_normalization(std::string_view text)
{
    if (text == "paper") return Normalization::paper;
    if (text == "classical") return Normalization::classical;
    throw DomainError("unknown normalization '" + std::string(text) + "'");
}

u64 normalized_class_number(const FamilyLRecord& record, Normalization n)
{
    if (n == Normalization::classical) return record.h;
    return static_cast<u64>(std::llround(ell(static_cast<double>(record.d)) * record.L));
}

double class_count_cutoff(u64 H, Normalization n, double l_floor)
{
    const double scale = n == Normalization::paper ? 1.0 : 0.5;
    const double goal = static_cast<double>(H) + 0.5;
    auto ok = [&](double d) { return l_floor * scale * ell(d) > goal; };
    double lo = 5.0, hi = 16.0;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 0.5; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return std::ceil(hi);
}

double ell_inverse(double y)
{
    if (y <= ell(5.0)) return 5.0;
    double lo = 5.0, hi = 16.0;
    while (ell(hi) < y) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ell(mid) >= y ? hi : lo) = mid;
    }
    return hi;
}

double refined_class_count(u64 H, Normalization n, std::span<const double> l_samples)
{
    if (l_samples.empty()) throw DomainError("refined count needs model samples");
    // Members up to X number about (C'/2) sqrt(X), C' the density constant.
    static const double half_density = density_constant(10'000'000).value / 2.0;
    const double bound = (n == Normalization::paper ? 1.0 : 2.0) * (static_cast<double>(H) + 0.5);
    double sum = 0.0;
    for (double l : l_samples) sum += std::sqrt(ell_inverse(bound / l));
    return half_density * sum / static_cast<double>(l_samples.size());
}

ClassCountReport class_count_report(u64 H, Normalization normalization, const ClassCountOptions& options)
{
    if (H < 1) throw DomainError("H must be >= 1");
    if (options.mode == LMode::fast)
        throw DomainError("class counting needs exact or rigorous class numbers");

    u64 h_max = H;
    for (u64 t : options.trajectory) h_max = std::max(h_max, t);
    const double cutoff = class_count_cutoff(h_max, normalization, options.l_floor);
    if (cutoff > kMaxFamilyBound) throw OverflowError("class count cutoff beyond the family bound");

    BulkOptions bulk;
    bulk.mode = options.mode;
    bulk.threads = options.threads;
    bulk.summand_cap = options.summand_cap;

    std::vector<u64> scanned; // class numbers in scan order, capped at h_max + 1
    ClassCountReport out;
    out.H = H;
    out.normalization = normalization;
    out.d_cutoff = cutoff;

    FamilyStream stream(1, kMaxChowlaM);
    u64 run = 0;
    bool done = false;
    std::vector<FamilyDiscriminant> chunk;
    while (!done) {
        chunk.clear();
        while (chunk.size() < kChunk) {
            auto next = stream.next();
            if (!next) break;
            chunk.push_back(*next);
        }
        if (chunk.empty()) throw OverflowError("family exhausted before the class count cutoff");
        const std::vector<FamilyLRecord> records = evaluate_family(chunk, bulk);
        for (const FamilyLRecord& r : records) {
            const u64 h = normalized_class_number(r, normalization);
            ++out.members_scanned;
            out.last_d = r.d;
            if (r.L < options.l_floor) out.l_floor_violations.push_back({r.d, r.L});
            scanned.push_back(h);
            run = h > h_max ? run + 1 : 0;
            if (static_cast<double>(r.d) > cutoff && run >= options.run_length) {
                done = true;
                break;
            }
        }
    }

    out.catalan_G = compute_catalan().value;
    for (u64 h : scanned)
        if (h <= H) ++out.histogram[h];
    for (const auto& [h, count] : out.histogram) out.total += count;
    out.threshold_total = static_cast<u64>(
        std::count_if(scanned.begin(), scanned.end(), [&](u64 h) { return h <= H; }));
    out.predicted = log_h_ratio_predicted(H, out.catalan_G);
    out.ratio = out.predicted > 0.0 ? static_cast<double>(out.total) / out.predicted : 0.0;
    std::vector<double> l_samples;
    if (options.refined_samples > 0) {
        l_samples = sample_L(options.seed, options.refined_samples);
        out.refined = refined_class_count(H, normalization, l_samples);
    }

    for (u64 t : options.trajectory) {
        ClassCountPoint p;
        p.H = t;
        p.total = static_cast<u64>(
            std::count_if(scanned.begin(), scanned.end(), [&](u64 h) { return h <= t; }));
        p.predicted = log_h_ratio_predicted(t, out.catalan_G);
        p.ratio = p.predicted > 0.0 ? static_cast<double>(p.total) / p.predicted : 0.0;
        if (!l_samples.empty()) p.refined = refined_class_count(t, normalization, l_samples);
        out.trajectory.push_back(p);
    }
    return out;
}

} // namespace chowla
