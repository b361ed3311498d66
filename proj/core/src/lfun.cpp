#include "chowla/lfun.hpp"
#include "chowla/error.hpp"
#include "chowla/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace chowla {

namespace {

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x)
    {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

u64 member_m(u64 d)
{
    if (d < 5 || (d - 1) % 4 != 0) throw DomainError("d = " + std::to_string(d) + " is not of the form 4m^2+1");
    const u64 m = isqrt((d - 1) / 4);
    if (4 * m * m + 1 != d) throw DomainError("d = " + std::to_string(d) + " is not of the form 4m^2+1");
    if (!factor_chowla(m).is_squarefree)
        throw DomainError("d = " + std::to_string(d) + " is not squarefree");
    return m;
}

} // namespace

std::string_view to_string(LMode mode)
{
    switch (mode) {
    case LMode::rigorous: return "rigorous";
    case LMode::fast: return "fast";
    case LMode::exact: return "exact";
    }
    return "unknown";
}

LMode parse_l_mode(std::string_view text)
{
    if (text == "rigorous") return LMode::rigorous;
    if (text == "fast") return LMode::fast;
    if (text == "exact") return LMode::exact;
    throw DomainError("unknown L mode '" + std::string(text) + "'");
}

std::vector<std::int8_t> character_table(u64 d, u64 size)
{
    std::vector<std::int8_t> chi(size, 0);
    if (size > 1) chi[1] = 1;
    std::vector<std::uint32_t> primes;
    std::vector<bool> composite(size, false);
    const auto sd = static_cast<i64>(d);
    for (u64 i = 2; i < size; ++i) {
        if (!composite[i]) {
            primes.push_back(static_cast<std::uint32_t>(i));
            chi[i] = static_cast<std::int8_t>(kronecker(sd, i));
        }
        for (std::uint32_t p : primes) {
            const u64 ip = i * p;
            if (ip >= size) break;
            composite[ip] = true;
            chi[ip] = static_cast<std::int8_t>(chi[i] * chi[p]);
            if (i % p == 0) break;
        }
    }
    return chi;
}

LValue l_value_rigorous(u64 d, double target, u64 summand_cap)
{
    if (!(target > 0.0)) throw DomainError("error budget must be positive");
    if (d < 5) throw DomainError("discriminant must be >= 5");
    const double sd = std::sqrt(static_cast<double>(d));
    const double needed = std::ceil(sd * std::log(static_cast<double>(d)) / target);
    if (needed > static_cast<double>(summand_cap))
        throw BudgetError("rigorous L(1, chi_" + std::to_string(d) + ") needs " +
                          std::to_string(needed) + " summands, cap is " +
                          std::to_string(summand_cap));
    const u64 n_max = static_cast<u64>(needed);
    const u64 table = std::min<u64>(d, n_max + 1);
    const auto chi = character_table(d, table);

    CompensatedSum acc;
    u64 r = 1 % table;
    for (u64 n = 1; n <= n_max; ++n) {
        if (const int c = chi[r]) acc.add(c / static_cast<double>(n));
        if (++r == table) r = 0;
    }
    LValue out;
    out.d = d;
    out.value = acc.value();
    out.terms = n_max;
    // Tail bound plus the compensated-summation rounding allowance.
    out.abs_error_bound = sd * std::log(static_cast<double>(d)) / static_cast<double>(n_max) +
                          4e-16 * (std::log(static_cast<double>(n_max)) + 1.0);
    out.mode = LMode::rigorous;
    return out;
}

double default_fast_smoothing(u64 d)
{
    const double ld = std::log(static_cast<double>(d));
    return 1e4 * ld * ld;
}

LValue l_value_fast(u64 d, double y)
{
    if (d < 5) throw DomainError("discriminant must be >= 5");
    const double ld = std::log(static_cast<double>(d));
    if (!(y >= ld * ld)) throw DomainError("smoothing length must be >= (log d)^2");
    const double l3y = std::log(3.0 * y);
    const u64 n_max = static_cast<u64>(std::floor(y * l3y * l3y));
    const u64 table = std::min<u64>(d, n_max + 1);
    const auto chi = character_table(d, table);

    const double step = std::exp(-1.0 / y);
    CompensatedSum full, half;
    double w = 1.0;
    u64 r = 1 % table;
    for (u64 n = 1; n <= n_max; ++n) {
        if ((n & 1023) == 0)
            w = std::exp(-static_cast<double>(n) / y);
        else
            w *= step;
        if (const int c = chi[r]) {
            const double base = c / static_cast<double>(n);
            full.add(base * w);
            half.add(base * w * w);
        }
        if (++r == table) r = 0;
    }
    LValue out;
    out.d = d;
    out.value = full.value();
    out.abs_error_bound = std::fabs(full.value() - half.value());
    out.mode = LMode::fast;
    out.terms = n_max;
    return out;
}

LValue l_value_exact(u64 d)
{
    const FormCycles cycles = count_form_cycles(d);
    const UnitInfo unit = fundamental_unit(d);
    const double regulator = unit.regulator.convert_to<double>();
    LValue out;
    out.d = d;
    out.value = 2.0 * static_cast<double>(cycles.class_number) * regulator /
                std::sqrt(static_cast<double>(d));
    out.abs_error_bound = 4.0 * std::numeric_limits<double>::epsilon() * out.value;
    out.mode = LMode::exact;
    return out;
}

ClassNumberResult class_number(u64 d, u64 summand_cap)
{
    const u64 m = member_m(d);
    const UnitInfo unit = fundamental_unit(d);
    const double regulator = unit.regulator.convert_to<double>();
    const double sd = std::sqrt(static_cast<double>(d));
    // An L error below 0.4 R/(2 sqrt d) moves h by at most 0.2.
    const double target = 0.999 * 0.4 * regulator / (2.0 * sd);

    ClassNumberResult out;
    out.d = d;
    out.regulator = regulator;
    out.l = l_value_rigorous(d, target, summand_cap);
    out.h_estimate = sd * out.l.value / (2.0 * regulator);
    const double rounded = std::round(out.h_estimate);
    out.margin = 0.5 - std::fabs(out.h_estimate - rounded);
    if (rounded < 1.0 || out.margin < 0.05)
        throw AmbiguousRoundingError("class number rounding for d = " + std::to_string(d) +
                                     " has margin " + std::to_string(out.margin));
    out.h_true = static_cast<u64>(rounded);
    if (m == 1) {
        // eps_5 = (1+sqrt 5)/2, not 2+sqrt 5: report 2h by convention.
        out.paper_canonical = false;
        out.h_paper = 2 * out.h_true;
    } else {
        const double paper_reg = std::log(2.0 * static_cast<double>(m) + sd);
        out.h_paper = static_cast<u64>(std::llround(sd * out.l.value / paper_reg));
    }
    return out;
}

double ell(double x)
{
    if (!(x > 1.0)) throw DomainError("ell(x) requires x > 1");
    return std::sqrt(x) / std::log(std::sqrt(x - 1.0) + std::sqrt(x));
}

std::vector<FamilyLRecord> evaluate_family(std::span<const FamilyDiscriminant> members,
                                           const BulkOptions& options)
{
    std::vector<FamilyLRecord> out(members.size());
    parallel_for(members.size(), options.threads, [&](std::size_t i) {
        const FamilyDiscriminant& member = members[i];
        FamilyLRecord rec;
        rec.m = member.m;
        rec.d = member.d;
        switch (options.mode) {
        case LMode::exact: {
            const FormCycles cycles = count_form_cycles(member.d);
            const UnitInfo unit = fundamental_unit(member.d);
            rec.h = cycles.class_number;
            rec.L = 2.0 * static_cast<double>(rec.h) * unit.regulator.convert_to<double>() /
                    std::sqrt(static_cast<double>(member.d));
            rec.abs_error = 4.0 * std::numeric_limits<double>::epsilon() * rec.L;
            break;
        }
        case LMode::rigorous: {
            const ClassNumberResult cn = class_number(member.d, options.summand_cap);
            rec.L = cn.l.value;
            rec.abs_error = cn.l.abs_error_bound;
            rec.h = cn.h_true;
            break;
        }
        case LMode::fast: {
            const double y = options.fast_y > 0.0 ? options.fast_y : default_fast_smoothing(member.d);
            const LValue l = l_value_fast(member.d, y);
            rec.L = l.value;
            rec.abs_error = l.abs_error_bound;
            const UnitInfo unit = fundamental_unit(member.d);
            rec.h = static_cast<u64>(std::max<long long>(1, std::llround(
                rec.L * std::sqrt(static_cast<double>(member.d)) /
                (2.0 * unit.regulator.convert_to<double>()))));
            break;
        }
        }
        out[i] = rec;
    });
    return out;
}

} // namespace chowla
