#include "nlpt/constraint.hpp"
#include "nlpt/error.hpp"
#include "nlpt/slag.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nlpt;

namespace {

constexpr double kPi = std::numbers::pi;

SampleBox box_with(std::uint64_t seed, std::size_t count)
{
    SampleBox b;
    b.seed = seed;
    b.count = count;
    return b;
}

ConstraintSet slag_fiber(double level, std::size_t n = 2)
{
    return ConstraintSet(n, [level](const Jet& j) { return G_eval(j.a) - level; }, "slag");
}

}  // namespace

TEST(Membership, CanonicalQ)
{
    const auto q = canonical(CanonicalKind::Q, 2);
    EXPECT_EQ(q.membership(Jet{-1.0, SymMat::identity(2)}).region, Region::Inside);
    EXPECT_EQ(q.membership(Jet{0.0, SymMat(2)}).region, Region::Boundary);
    EXPECT_EQ(q.membership(Jet{1.0, SymMat::identity(2)}).region, Region::Outside);
}

TEST(Membership, NonFiniteRaisesWithJet)
{
    const ConstraintSet s(2, [](const Jet& j) { return std::log(j.r); });
    try {
        s.membership(Jet{-1.0, SymMat(2)});
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.jet().r, -1.0);
    }
}

TEST(Canonical, Margins)
{
    const auto q = canonical(CanonicalKind::Q, 2);
    EXPECT_DOUBLE_EQ(q.margin(Jet{-3.0, SymMat::diagonal({2, 5})}), 2.0);
    const auto qd = canonical(CanonicalKind::Qdual, 2);
    const auto v = qd.membership(Jet{4.0, SymMat::diagonal({-2, -1})});
    EXPECT_DOUBLE_EQ(v.margin, -1.0);
    EXPECT_EQ(v.region, Region::Outside);
    EXPECT_EQ(canonical(CanonicalKind::P_cone, 2).membership(Jet{17.0, SymMat(2)}).region, Region::Boundary);
    EXPECT_TRUE(canonical(CanonicalKind::full_J, 2).improper());
}

TEST(Dual, OfQMatchesClosedForm)
{
    const auto dq = dual(canonical(CanonicalKind::Q, 2));
    EXPECT_EQ(dq.membership(Jet{1.0, SymMat::diagonal({-1, 1})}).region, Region::Inside);
    EXPECT_EQ(dq.membership(Jet{1.0, SymMat::identity(2, -1.0)}).region, Region::Outside);
}

TEST(Dual, DoubleDualAgreesAwayFromBoundary)
{
    const std::vector<ConstraintSet> sets{canonical(CanonicalKind::Q, 3), canonical(CanonicalKind::Qdual, 3),
                                          canonical(CanonicalKind::P_cone, 3), slag_fiber(0.7, 3)};
    for (const auto& s : sets) {
        const auto dd = dual(dual(s));
        for (const auto& j : random_jet(box_with(21, 1000), 3)) {
            const double g = s.margin(j);
            if (std::abs(g) <= 10.0 * s.boundary_tol()) continue;
            EXPECT_EQ(dd.membership(j).region, s.membership(j).region);
        }
    }
}

TEST(Dual, SlagFiberDualIsNegatedLevel)
{
    const auto d = dual(slag_fiber(kPi / 2));
    const auto closed_form = slag_fiber(-kPi / 2);
    for (const auto& j : random_jet(box_with(4, 2000), 2)) {
        if (std::abs(closed_form.margin(j)) < 1e-8) continue;
        EXPECT_EQ(d.membership(j).region, closed_form.membership(j).region);
    }
}

TEST(QMonotone, Examples)
{
    EXPECT_TRUE(check_q_monotone(canonical(CanonicalKind::Q, 2), box_with(1, 500)).pass);
    const ConstraintSet r_nonneg(2, [](const Jet& j) { return j.r; }, "r>=0", false);
    const auto rep = check_q_monotone(r_nonneg, box_with(1, 100));
    ASSERT_FALSE(rep.pass);
    EXPECT_EQ(*rep.witness_jet, (Jet{0.0, SymMat(2)}));
    EXPECT_EQ(*rep.witness_translate, (Jet{-1.0, SymMat(2)}));
    EXPECT_TRUE(check_q_monotone(slag_fiber(0.0), box_with(2, 10000)).pass);
}

TEST(QMonotone, QDefiningFunctionIsMonotone)
{
    const auto q = canonical(CanonicalKind::Q, 3);
    JetSampler s(box_with(8, 1), 3);
    for (int t = 0; t < 2000; ++t) {
        const Jet j = s.jet();
        const Jet step = s.q_element(10.0);
        EXPECT_GE(q.margin(j + step), q.margin(j) - 1e-12 * (1.0 + jet_norm(j) + jet_norm(step)));
    }
}

TEST(Duality, IdentitiesHoldForBuiltins)
{
    for (const auto& s : {canonical(CanonicalKind::Q, 2), slag_fiber(kPi / 2), canonical(CanonicalKind::P_cone, 2)}) {
        const auto rep = check_duality_identities(s, box_with(3, 10000));
        EXPECT_TRUE(rep.pass) << s.label();
        EXPECT_EQ(rep.sum_violations, 0u);
    }
}

TEST(Duality, HalfSpaceBoundaryOnBothSides)
{
    const ConstraintSet half(2, [](const Jet& j) { return -j.r; }, "r<=0");
    const auto d = dual(half);
    for (const auto& p : {SymMat(2), SymMat::identity(2), SymMat::diagonal({0.0, 3.0})}) {
        const Jet j{0.0, p};
        EXPECT_EQ(half.membership(j).region, Region::Boundary);
        EXPECT_NE(d.membership(-j).region, Region::Outside);
    }
    EXPECT_TRUE(check_duality_identities(half, box_with(5, 2000)).pass);
}

TEST(Hausdorff, Examples)
{
    const auto q = canonical(CanonicalKind::Q, 2);
    EXPECT_EQ(windowed_hausdorff(q, q, 5.0, box_with(1, 500)).value, 0.0);
    const auto est = windowed_hausdorff(q, enlarge(q, 0.3), 5.0, box_with(2, 500));
    EXPECT_LE(est.value, 0.3 + 1e-6);
    const ConstraintSet lo(2, [](const Jet& j) { return -1.0 - j.r; });
    const ConstraintSet hi(2, [](const Jet& j) { return 1.0 - j.r; });
    EXPECT_NEAR(windowed_hausdorff(lo, hi, 10.0, box_with(3, 2000)).value, 2.0, 0.05);
}
