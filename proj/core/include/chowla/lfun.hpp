#pragma once

#include "chowla/arith.hpp"
#include "chowla/family.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace chowla {

enum class LMode {
    rigorous, // partial Dirichlet sum with a proven Polya-Vinogradov tail bound
    fast,     // exponentially smoothed Dirichlet sum, heuristic error
    exact,    // class number formula with h counted from reduced form cycles
};

std::string_view to_string(LMode mode);
LMode parse_l_mode(std::string_view text);

struct LValue {
    u64 d = 0;
    double value = 0.0;
    double abs_error_bound = 0.0;
    LMode mode = LMode::rigorous;
    u64 terms = 0; // summands used (0 for exact mode)
};

inline constexpr u64 kDefaultSummandCap = 10'000'000'000ULL;

/// chi_d(n) for 0 <= n < size, built multiplicatively from chi_d(p).
std::vector<std::int8_t> character_table(u64 d, u64 size);

/// sum_{n<=N} chi_d(n)/n with N chosen so that sqrt(d) log(d) / N <= target.
LValue l_value_rigorous(u64 d, double target, u64 summand_cap = kDefaultSummandCap);

/// sum_{n <= y log^2(3y)} chi_d(n) e^{-n/y} / n. The reported error is the
/// change against the same sum smoothed at y/2, accumulated in the same pass.
LValue l_value_fast(u64 d, double y);

/// Default smoothing length for bulk fast-mode evaluation, 1e4 (log d)^2.
double default_fast_smoothing(u64 d);

/// L(1, chi_d) = h log(eps) * 2 / sqrt(d), h from count_form_cycles.
LValue l_value_exact(u64 d);

// ---------------------------------------------------------------------------
// Indefinite binary quadratic forms

struct FormCycles {
    u64 d = 0;
    u64 narrow_class_number = 0; // number of rho-cycles of reduced forms
    u64 class_number = 0;        // h+ or h+/2
    bool norm_minus_one = false; // (1,b,c) and (-1,b,-c) share a cycle
    u64 reduced_forms = 0;
};

/// Enumerates every reduced form (a,b,c), b^2 - 4ac = d, 0 < b < sqrt d,
/// sqrt d - b < 2|a| < sqrt d + b, and partitions them into rho-cycles.
/// d must be a positive non-square, d = 1 mod 4, squarefree.
FormCycles count_form_cycles(u64 d);

inline constexpr u64 kDefaultOracleCap = 10'000'000;

/// Independent ground truth for class numbers of squarefree d = 1 mod 4.
u64 forms_oracle(u64 d, u64 cap = kDefaultOracleCap);

// ---------------------------------------------------------------------------
// Class numbers

struct ClassNumberResult {
    u64 d = 0;
    u64 h_true = 0;        // classical normalisation
    u64 h_paper = 0;       // sqrt(d) L / log(2m + sqrt d)
    bool paper_canonical = true; // false only for d = 5
    double margin = 0.0;   // distance of the estimate to the nearest half-integer
    double h_estimate = 0.0;
    double regulator = 0.0;
    LValue l;
};

/// Class number of a family member from a rigorous L-value.
/// Throws AmbiguousRoundingError when margin < 0.05.
ClassNumberResult class_number(u64 d, u64 summand_cap = kDefaultSummandCap);

/// sqrt(x) / log(sqrt(x-1) + sqrt(x)).
double ell(double x);

// ---------------------------------------------------------------------------
// Bulk evaluation

struct FamilyLRecord {
    u64 m = 0;
    u64 d = 0;
    double L = 0.0;
    double abs_error = 0.0;
    u64 h = 0; // classical class number (rounded from L in fast mode)
};

struct BulkOptions {
    LMode mode = LMode::exact;
    unsigned threads = 1;
    double fast_y = 0.0;          // 0 selects default_fast_smoothing(d)
    u64 summand_cap = kDefaultSummandCap;
};

/// L-values for members in order; output is independent of thread count.
std::vector<FamilyLRecord> evaluate_family(std::span<const FamilyDiscriminant> members,
                                           const BulkOptions& options);

} // namespace chowla
