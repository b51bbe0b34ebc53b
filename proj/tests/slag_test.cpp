#include "nlpt/error.hpp"
#include "nlpt/fixtures.hpp"
#include "nlpt/slag.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nlpt;

namespace {

constexpr double kPi = std::numbers::pi;

SampleBox box_with(std::uint64_t seed)
{
    SampleBox b;
    b.seed = seed;
    return b;
}

GridFunction h_grid(const std::string& fixture)
{
    const auto p = fixture_params(fixture);
    const auto& h = p.fields.at("h");
    return GridFunction(h.grid(), h.values());
}

}  // namespace

TEST(GEval, Examples)
{
    EXPECT_EQ(G_eval(SymMat(3)), 0.0);
    EXPECT_NEAR(G_eval(SymMat::identity(3)), 3.0 * kPi / 4.0, 1e-15);
    EXPECT_NEAR(G_eval(SymMat::diagonal({-20, 20})), 0.0, 1e-15);
}

TEST(GEval, MonotoneAndOrthogonallyInvariant)
{
    JetSampler s(box_with(1), 3);
    for (int i = 0; i < 2000; ++i) {
        const SymMat a = s.matrix();
        const SymMat p = s.psd(5.0);
        EXPECT_LE(G_eval(a), G_eval(a + p) + 1e-12);
        EXPECT_GT(G_eval(a.shifted(0.1)), G_eval(a));
        const auto ev = eigenvalues(a);
        const auto q = s.orthogonal();
        EXPECT_NEAR(G_eval(SymMat::from_spectrum(ev, q)), G_eval(a), 1e-10);
    }
}

TEST(PhasePartition, Examples)
{
    const auto p2 = phase_partition(2);
    ASSERT_EQ(p2.special_values.size(), 1u);
    EXPECT_EQ(p2.special_values[0], 0.0);
    EXPECT_NEAR(p2.intervals[0].lo, 0.0, 0.0);
    EXPECT_NEAR(p2.intervals[0].hi, kPi, 1e-15);
    EXPECT_NEAR(p2.intervals[1].lo, -kPi, 1e-15);
    const auto p3 = phase_partition(3);
    EXPECT_NEAR(p3.special_values[0], kPi / 2, 1e-15);
    EXPECT_NEAR(p3.special_values[1], -kPi / 2, 1e-15);
    EXPECT_NEAR(p3.intervals[1].lo, -kPi / 2, 1e-15);
    EXPECT_NEAR(p3.intervals[1].hi, kPi / 2, 1e-15);
    const auto p1 = phase_partition(1);
    EXPECT_TRUE(p1.special_values.empty());
    ASSERT_EQ(p1.intervals.size(), 1u);
    EXPECT_NEAR(p1.intervals[0].hi, kPi / 2, 1e-15);
}

TEST(PhasePartition, TilesRange)
{
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto p = phase_partition(n);
        EXPECT_NEAR(p.intervals.front().hi, n * kPi / 2, 1e-12);
        EXPECT_NEAR(p.intervals.back().lo, -(n * kPi / 2), 1e-12);
        for (std::size_t k = 0; k + 1 < p.intervals.size(); ++k) {
            EXPECT_DOUBLE_EQ(p.intervals[k].lo, p.intervals[k + 1].hi);
            EXPECT_DOUBLE_EQ(p.intervals[k].lo, p.special_values[k]);
        }
    }
}

TEST(EigBound, Examples)
{
    const auto b = eig_bound({kPi / 6, kPi / 2}, 2);
    ASSERT_TRUE(b.bounded);
    EXPECT_NEAR(b.c, 2.0 + std::sqrt(3.0), 1e-9);
    EXPECT_FALSE(eig_bound({0.0, kPi / 2}, 2).bounded);
    const auto single = eig_bound({kPi / 2, kPi / 2}, 2);
    ASSERT_TRUE(single.bounded);
    EXPECT_NEAR(single.c, 1.0, 1e-12);
    EXPECT_THROW(eig_bound({1.0, 0.0}, 2), InvalidParameter);
}

TEST(EigBound, SamplingOracle)
{
    for (const Interval sigma : {Interval{kPi / 6, kPi / 2}, Interval{kPi / 2, kPi / 2}, Interval{-2.5, -0.4}}) {
        const auto b = eig_bound(sigma, 2);
        ASSERT_TRUE(b.bounded);
        JetSampler s(box_with(2), 2);
        std::size_t landings = 0;
        for (int i = 0; i < 20000; ++i) {
            // |λ| log-uniform in [1.01·C, 1e4·C] with random signs.
            std::vector<double> ev(2);
            for (auto& l : ev) l = (s.uniform(0, 1) < 0.5 ? -1 : 1) * 1.01 * b.c * std::pow(1e4, s.uniform(0, 1));
            if (sigma.contains(G_eval(SymMat::from_spectrum(ev, s.orthogonal())))) ++landings;
        }
        EXPECT_EQ(landings, 0u);
    }
}

TEST(FailureWitness, AEqualsBTwentyGap)
{
    const auto w = block_witness(2, 1, 20.0);
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->b, 20.0, 1e-12);
    const double direct = std::atan(-19.0) + std::atan(21.0);
    EXPECT_NEAR(w->gap, direct, 1e-12);
    // The series 1/19 − 1/21 − (1/19³ − 1/21³)/3 puts the gap at 0.0049999…, not 0.005008.
    EXPECT_NEAR(w->gap, 0.0049999583, 1e-9);
}

TEST(FailureWitness, ThreeDimensionalInversion)
{
    const auto w = block_witness(3, 1, 10.0);
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->b, std::tan((kPi / 2 + std::atan(10.0)) / 2.0), 1e-9);
    EXPECT_NEAR(w->b, 20.05, 0.01);
    EXPECT_LE(std::abs(G_eval(w->matrix) - kPi / 2), 1e-9);
}

TEST(FailureWitness, TargetGapAndGuards)
{
    const auto w = failure_witness(2, 1, 0.01);
    EXPECT_GT(w.gap, 0.0);
    EXPECT_LT(w.gap, 0.01);
    EXPECT_LE(std::abs(w.phase_error), 1e-9);
    EXPECT_THROW(failure_witness(2, 2, 0.01), InvalidParameter);
    EXPECT_THROW(failure_witness(2, 0, 0.01), InvalidParameter);
    double prev = kPi;
    for (double a = 1; a < 1e4; a *= 4) {
        const auto bw = block_witness(2, 1, a);
        EXPECT_LT(bw->gap, prev);
        prev = bw->gap;
    }
}

TEST(FailureWitness, ReplayAgainstLevels)
{
    const auto w = failure_witness(2, 1, 0.01);
    const double hn = 0.05;  // h_n − θ_k > gap
    EXPECT_GE(G_eval(w.matrix), -1e-9);
    EXPECT_LT(G_eval(w.matrix.shifted(1.0)) - hn, 0.0);
}

TEST(CertifySlag, PositiveTable)
{
    const auto c = certify_slag_continuity(h_grid("slag_positive"), 2, {0.1, 0.5, 1.0}, box_with(3));
    EXPECT_EQ(c.continuity.verdict, Verdict::Certified);
    ASSERT_TRUE(c.interval);
    EXPECT_EQ(*c.interval, 1u);
    ASSERT_TRUE(c.bound.bounded);
    ASSERT_EQ(c.table.size(), 3u);
    for (const auto& r : c.table) {
        EXPECT_GT(r.delta, 0.0);
        EXPECT_EQ(r.violations, 0u);
        EXPECT_LE(r.target, c.epsilon);
        EXPECT_LE(r.target, r.eta / (1.0 + 4.0 * c.bound.c * c.bound.c) + 1e-15);
        EXPECT_LT(c.lipschitz * r.delta, r.target);
    }
}

TEST(CertifySlag, ThreeDimensionalCertified)
{
    const auto c = certify_slag_continuity(h_grid("slag_positive_3d"), 3, {0.5, 1.0}, box_with(4));
    EXPECT_EQ(c.continuity.verdict, Verdict::Certified);
    EXPECT_EQ(*c.interval, 2u);
}

TEST(CertifySlag, ConstantHasDiameterDelta)
{
    const Grid g(BoxDomain::cube(2, 0.0, 1.0), {9, 9});
    const GridFunction h(g, std::vector<double>(81, 0.4));
    const auto c = certify_slag_continuity(h, 2, {0.1, 1.0}, box_with(5));
    EXPECT_EQ(c.continuity.verdict, Verdict::Certified);
    for (const auto& r : c.table) EXPECT_DOUBLE_EQ(r.delta, g.domain().diameter());
}

TEST(CertifySlag, CrossingRefutedWithBlockWitness)
{
    const auto hg = h_grid("slag_crossing");
    const auto c = certify_slag_continuity(hg, 2, {0.1, 0.5, 1.0}, box_with(6));
    ASSERT_EQ(c.continuity.verdict, Verdict::Refuted);
    ASSERT_FALSE(c.witnesses.empty());
    const auto& w = c.witnesses.front();
    EXPECT_LE(std::abs(G_eval(w.block.matrix) - 0.0), 1e-9);
    const double hx = 0.5 - w.point[0];
    EXPECT_NEAR(w.h_point, hx, 1e-12);
    const double lifted = G_eval(w.block.matrix.shifted(1.0));
    EXPECT_GT(lifted, 0.0);
    EXPECT_LT(lifted, hx);
    // The sequence approaches the crossing.
    for (std::size_t i = 1; i < c.witnesses.size(); ++i)
        EXPECT_LT(std::abs(c.witnesses[i].point[0] - 0.5), std::abs(c.witnesses[i - 1].point[0] - 0.5));
}

TEST(CertifySlag, RangeGuard)
{
    const Grid g(BoxDomain::cube(2, 0.0, 1.0), {3, 3});
    const GridFunction h(g, std::vector<double>(9, 4.0));
    EXPECT_THROW(certify_slag_continuity(h, 2, {0.1}, box_with(1)), InvalidParameter);
}
