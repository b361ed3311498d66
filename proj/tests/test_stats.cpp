#include "chowla/error.hpp"
#include "chowla/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace chowla;

namespace {

const RandomModel& model()
{
    static const RandomModel m;
    return m;
}

const std::vector<FamilyLRecord>& records_1e6()
{
    static const std::vector<FamilyLRecord> r = family_l_values(1e6);
    return r;
}

} // namespace

TEST(FamilyLValues, CoversTheFamily)
{
    const auto& r = records_1e6();
    const auto members = enumerate(1e6);
    ASSERT_EQ(r.size(), members.size());
    for (std::size_t i = 0; i < r.size(); ++i) ASSERT_EQ(r[i].d, members[i].d);
}

TEST(CharAverage, TrivialCharacter)
{
    const CharAverage a = char_average(1, 1e6);
    EXPECT_EQ(a.empirical, 1.0);
    EXPECT_EQ(a.model, 1.0);
    EXPECT_EQ(a.n_discriminants, enumerate(1e6).size());
}

TEST(CharAverage, EvenPowerOfTwoVanishes)
{
    const CharAverage a = char_average(2, 1e6);
    EXPECT_EQ(a.model, 0.0);
    EXPECT_LE(std::fabs(a.empirical), 5 * a.stderr_);
    EXPECT_NEAR(a.stderr_, 1.0 / std::sqrt(static_cast<double>(a.n_discriminants)), 1e-15);
}

TEST(CharAverage, SmallOddModuliAt1e7)
{
    const auto members = enumerate(1e7);
    for (u64 m : {3ULL, 5ULL, 7ULL, 9ULL}) {
        const CharAverage a = char_average(m, members, 1e7);
        EXPECT_EQ(a.model, expected_X(m).convert_to<double>());
        EXPECT_LE(std::fabs(a.empirical - a.model), 5 * a.stderr_) << m;
    }
}

TEST(Moments, ZeroIsExactlyOne)
{
    const MomentEstimate e = moment_compare({0, 0}, records_1e6(), 1e6, model());
    EXPECT_EQ(e.empirical, Complex(1, 0));
    EXPECT_EQ(e.model, Complex(1, 0));
}

TEST(Moments, ConjugateSymmetry)
{
    const Complex z(1.0, 1.0);
    const MomentEstimate a = moment_compare(z, records_1e6(), 1e6, model());
    const MomentEstimate b = moment_compare(std::conj(z), records_1e6(), 1e6, model());
    EXPECT_NEAR(std::abs(a.empirical - std::conj(b.empirical)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.model - std::conj(b.model)), 0.0, 1e-12);
}

TEST(Moments, FirstMomentCloseAt1e6)
{
    const MomentEstimate e = moment_compare({1, 0}, records_1e6(), 1e6, model());
    EXPECT_NEAR(e.empirical.real(), e.model.real(), 0.05 * e.model.real());
    EXPECT_EQ(e.n_discriminants, records_1e6().size());
}

TEST(Moments, Domain)
{
    EXPECT_THROW(check_moment_domain({-6, 0}), DomainError);
    EXPECT_THROW(check_moment_domain({1, 60}), DomainError);
    EXPECT_NO_THROW(check_moment_domain({-1, 0}));
}

TEST(Tails, FractionsAreMonotone)
{
    std::vector<double> grid;
    for (double t = 1.0; t <= 3.0 + 1e-9; t += 0.25) grid.push_back(t);
    TailOptions opt;
    opt.mc_samples = 200'000;
    const TailReport r = tail_report(records_1e6(), 1e6, grid, model(), opt);
    ASSERT_EQ(r.tau.size(), grid.size());
    std::vector<double> ls;
    for (const auto& rec : records_1e6()) ls.push_back(rec.L);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_GE(r.empirical_upper[i], 0.0);
        EXPECT_LE(r.empirical_upper[i], 1.0);
        EXPECT_EQ(r.empirical_upper[i], upper_fraction(ls, grid[i]));
        EXPECT_EQ(r.empirical_lower[i], lower_fraction(ls, grid[i]));
        if (i > 0) {
            EXPECT_LE(r.empirical_upper[i], r.empirical_upper[i - 1]);
            EXPECT_LE(r.empirical_lower[i], r.empirical_lower[i - 1]);
            EXPECT_LE(r.mc_upper[i], r.mc_upper[i - 1]);
            EXPECT_LE(r.mc_lower[i], r.mc_lower[i - 1]);
        }
        EXPECT_EQ(r.saddle_advisory[i], grid[i] < 2.0);
        EXPECT_EQ(r.reference_upper[i], grid[i] < 2.0 ? r.mc_upper[i] : r.model_phi[i]);
    }
}

TEST(Tails, GridOutsideRangeIsRejected)
{
    const std::vector<double> grid{0.5, 1.0};
    EXPECT_THROW(tail_report(records_1e6(), 1e6, grid, model()), DomainError);
}

TEST(ClassCount, SmallestThreshold)
{
    const ClassCountReport r = class_count_report(1, Normalization::paper);
    EXPECT_EQ(r.total, 1u); // only d = 5
    EXPECT_EQ(r.histogram.at(1), 1u);
    EXPECT_EQ(r.predicted, 0.0);
}

TEST(ClassCount, HistogramAndThresholdRoutesAgree)
{
    const ClassCountReport r = class_count_report(20, Normalization::paper);
    u64 sum = 0;
    for (auto [h, n] : r.histogram) {
        EXPECT_GE(h, 1u);
        EXPECT_LE(h, 20u);
        sum += n;
    }
    EXPECT_EQ(sum, r.total);
    EXPECT_EQ(r.total, r.threshold_total);
    EXPECT_NEAR(r.predicted, 20 * std::log(20.0) / (2 * r.catalan_G), 1e-12);
    EXPECT_GE(r.last_d, r.d_cutoff);
    EXPECT_TRUE(r.l_floor_violations.empty());
}

TEST(ClassCount, ClassicalIsPaperAtTwiceH)
{
    for (u64 H : {3ULL, 8ULL}) {
        const ClassCountReport c = class_count_report(H, Normalization::classical);
        const ClassCountReport p = class_count_report(2 * H, Normalization::paper);
        EXPECT_EQ(c.total, p.total) << H;
    }
}

TEST(ClassCount, DeterministicAcrossThreads)
{
    ClassCountOptions one, three;
    three.threads = 3;
    one.refined_samples = three.refined_samples = 20'000;
    const ClassCountReport a = class_count_report(15, Normalization::paper, one);
    const ClassCountReport b = class_count_report(15, Normalization::paper, three);
    EXPECT_EQ(a.histogram, b.histogram);
    EXPECT_EQ(a.refined, b.refined);
    EXPECT_EQ(a.members_scanned, b.members_scanned);
}

TEST(ClassCount, RigorousModeAgreesWithExact)
{
    ClassCountOptions rig;
    rig.mode = LMode::rigorous;
    rig.refined_samples = 0;
    const ClassCountReport a = class_count_report(3, Normalization::paper, rig);
    const ClassCountReport b = class_count_report(3, Normalization::paper);
    EXPECT_EQ(a.histogram, b.histogram);
}

TEST(ClassCount, TrajectoryReportsEachThreshold)
{
    ClassCountOptions opt;
    opt.trajectory = {5, 10};
    opt.refined_samples = 20'000;
    const ClassCountReport r = class_count_report(10, Normalization::paper, opt);
    ASSERT_EQ(r.trajectory.size(), 2u);
    EXPECT_EQ(r.trajectory[1].total, r.total);
    EXPECT_LE(r.trajectory[0].total, r.trajectory[1].total);
    EXPECT_EQ(r.trajectory[0].total, class_count_report(5, Normalization::paper).total);
}

// Beyond the cutoff, L >= 0.1 forces the normalised class number above H.
TEST(ClassCount, CutoffProperty)
{
    for (u64 H : {10ULL, 100ULL}) {
        const double d = class_count_cutoff(H, Normalization::paper);
        EXPECT_GT(0.1 * ell(d), H + 0.5);
        EXPECT_LE(0.1 * ell(d * 0.99), H + 0.5);
        EXPECT_GT(class_count_cutoff(H, Normalization::classical), d);
    }
}

TEST(ClassCount, EllInverse)
{
    for (double y : {2.0, 10.0, 1000.0}) {
        const double x = ell_inverse(y);
        EXPECT_NEAR(ell(x), y, 1e-9 * y);
    }
    EXPECT_EQ(ell_inverse(1.0), 5.0);
}

TEST(Normalization, Names)
{
    EXPECT_EQ(parse_normalization("classical"), Normalization::classical);
    EXPECT_EQ(to_string(Normalization::paper), "paper");
    EXPECT_THROW(parse_normalization("other"), DomainError);
}
