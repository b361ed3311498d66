#pragma once

#include "chowla/family.hpp"
#include "chowla/lfun.hpp"
#include "chowla/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace chowla {

/// L-values of every member of the family up to x, ascending in d.
std::vector<FamilyLRecord> family_l_values(double x, const BulkOptions& options = {});

// ---------------------------------------------------------------------------
// Character averages

struct CharAverage {
    u64 m = 0;
    double x = 0.0;
    u64 n_discriminants = 0;
    double empirical = 0.0;
    double model = 0.0;   // E[X(m)]
    double stderr_ = 0.0; // sqrt((1 - model^2) / n)
};

CharAverage char_average(u64 m, double x);
/// Same average over a precomputed member list.
CharAverage char_average(u64 m, std::span<const FamilyDiscriminant> members, double x);

// ---------------------------------------------------------------------------
// Complex moments

struct MomentEstimate {
    Complex z;
    double x = 0.0;
    Complex empirical;
    double empirical_stderr = 0.0; // sample standard error of |L^z| terms
    Complex model;
    double model_rel_error = 0.0;  // from the script-L truncation bound
    u64 n_discriminants = 0;
    LMode mode = LMode::exact;
};

/// Domain accepted by moment_compare: Re z >= -5 and |z| <= 50.
void check_moment_domain(Complex z);

MomentEstimate moment_compare(Complex z, std::span<const FamilyLRecord> records, double x,
                              const RandomModel& model, LMode mode = LMode::exact);
MomentEstimate moment_compare(Complex z, double x, const RandomModel& model,
                              const BulkOptions& options = {});

// ---------------------------------------------------------------------------
// Distribution tails

struct TailOptions {
    std::uint64_t mc_samples = 10'000'000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double min_expected_count = 100.0;
};

struct TailReport {
    double x = 0.0;
    u64 n_discriminants = 0;
    std::vector<double> tau;
    std::vector<u64> upper_counts;
    std::vector<u64> lower_counts;
    std::vector<double> empirical_upper; // fraction with L > e^gamma tau
    std::vector<double> empirical_lower; // fraction with L < zeta(2)/(e^gamma tau)
    std::vector<double> model_phi;       // saddle point
    std::vector<double> model_psi;
    std::vector<bool> saddle_advisory;   // tau < 2
    std::uint64_t mc_samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> mc_upper;        // Monte Carlo model tails
    std::vector<double> mc_lower;
    std::vector<double> reference_upper; // saddle, or Monte Carlo where advisory
    std::vector<double> reference_lower;
    std::vector<double> expected_upper_count; // reference * n
    std::vector<double> expected_lower_count;
};

/// Paired empirical and model tails. The grid must lie in [1, 3].
TailReport tail_report(std::span<const FamilyLRecord> records, double x,
                       std::span<const double> tau_grid, const RandomModel& model,
                       const TailOptions& options = {});

/// Fraction of records with L > e^gamma tau, recounted from raw L values.
double upper_fraction(std::span<const double> l_values, double tau);
double lower_fraction(std::span<const double> l_values, double tau);

// ---------------------------------------------------------------------------
// Class number counting

enum class Normalization { paper, classical };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view text);

struct ClassCountPoint {
    u64 H = 0;
    u64 total = 0;
    double predicted = 0.0; // H log H / (2G)
    double ratio = 0.0;
    double refined = 0.0;   // C1 E[sqrt(ell^{-1}(H / L(1,X)))], before the log expansion
};

struct LFloorViolation {
    u64 d = 0;
    double L = 0.0;
};

struct ClassCountOptions {
    LMode mode = LMode::exact; // exact or rigorous
    unsigned threads = 1;
    u64 summand_cap = kDefaultSummandCap;
    std::vector<u64> trajectory; // extra H values reported from the same scan
    double l_floor = 0.1;
    u64 run_length = 50;
    std::uint64_t refined_samples = 200'000; // model draws for the refined prediction; 0 skips it
    std::uint64_t seed = 0;
};

struct ClassCountReport {
    u64 H = 0;
    Normalization normalization = Normalization::paper;
    std::map<u64, u64> histogram; // class number -> F_ch count
    u64 total = 0;
    u64 threshold_total = 0; // direct count of members with class number <= H
    double predicted = 0.0;
    double ratio = 0.0;
    double refined = 0.0; // see ClassCountPoint::refined
    double catalan_G = 0.0;
    u64 members_scanned = 0;
    u64 last_d = 0;
    double d_cutoff = 0.0;
    std::vector<ClassCountPoint> trajectory;
    std::vector<LFloorViolation> l_floor_violations;
};

/// Class number of a record in the requested normalisation: round(ell(d) L)
/// for `paper`, the classical h for `classical`.
u64 normalized_class_number(const FamilyLRecord& record, Normalization n);

/// Smallest d with floor * ell(d) * scale > H + 1/2; scale is 1/2 for the
/// classical normalisation.
double class_count_cutoff(u64 H, Normalization n, double l_floor = 0.1);

/// Inverse of ell on [5, inf): smallest x with ell(x) >= y (5 when y <= ell(5)).
double ell_inverse(double y);

/// Expected count of members with normalised class number <= H, computed
/// from model draws of L(1,X) without expanding ell^{-1} asymptotically.
double refined_class_count(u64 H, Normalization n, std::span<const double> l_samples);

ClassCountReport class_count_report(u64 H, Normalization normalization,
                                    const ClassCountOptions& options = {});

} // namespace chowla
