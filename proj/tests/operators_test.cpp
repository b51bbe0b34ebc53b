#include "nlpt/error.hpp"
#include "nlpt/fixtures.hpp"
#include "nlpt/operators.hpp"
#include "nlpt/slag.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nlpt;

namespace {

const BoxDomain kUnit = BoxDomain::cube(2, 0.0, 1.0);

OperatorSpec with_constant(const std::string& kind, std::map<std::string, double> fields)
{
    OperatorParams p;
    p.domain = kUnit;
    for (const auto& [k, v] : fields) p.fields[k] = CoefficientField::constant(kUnit, v);
    return make_builtin(kind, p);
}

SampleBox box_with(std::uint64_t seed)
{
    SampleBox b;
    b.seed = seed;
    return b;
}

const std::vector<double> kX{0.3, 0.7};

}  // namespace

TEST(MakeBuiltin, AffineSphereZeroOnBranchJet)
{
    const auto op = with_constant("hyperbolic_affine_sphere", {{"h", 1.0}});
    EXPECT_DOUBLE_EQ(op.F(kX, Jet{-1.0, SymMat::identity(2)}), 0.0);
    EXPECT_TRUE(op.constrained());
}

TEST(MakeBuiltin, SlagOddness)
{
    const auto op = with_constant("special_lagrangian", {{"h", 0.0}});
    for (double a : {0.1, 1.0, 20.0, 1e4}) EXPECT_NEAR(op.F(kX, Jet{3.0, SymMat::diagonal({-a, a})}), 0.0, 1e-15);
    EXPECT_FALSE(op.constrained());
}

TEST(MakeBuiltin, PerturbedReducesToMongeAmpere)
{
    OperatorParams p;
    p.domain = kUnit;
    p.fields["m"] = CoefficientField::constant(kUnit, 0.0);
    p.fields["h"] = CoefficientField::constant(kUnit, 0.0);
    p.fields["M"] = CoefficientField::constant(kUnit, std::vector<double>{0.0, 0.0, 0.0});
    p.profile = MonotoneTable({-1.0, 1.0}, {-1.0, 1.0});
    const auto op = make_builtin("perturbed_monge_ampere", p);
    JetSampler s(box_with(3), 2);
    for (int i = 0; i < 200; ++i) {
        const Jet j = s.jet();
        const auto ev = eigenvalues(j.a);
        const double expect = -j.r * ev[0] * ev[1];
        EXPECT_NEAR(op.F(kX, j), expect, 1e-9 * (1.0 + std::abs(expect)));
    }
}

TEST(MakeBuiltin, ParameterGuards)
{
    EXPECT_THROW(with_constant("linear", {{"c", -1.0}}), InvalidParameter);
    EXPECT_THROW(with_constant("no_such_kind", {}), InvalidParameter);
    EXPECT_THROW(with_constant("hyperbolic_affine_sphere", {}), InvalidParameter);
    OperatorParams p;
    p.domain = kUnit;
    p.fields["m"] = CoefficientField::constant(kUnit, 0.0);
    p.fields["h"] = CoefficientField::constant(kUnit, 0.0);
    p.fields["M"] = CoefficientField::constant(kUnit, std::vector<double>{0.0, 0.0, 0.0});
    p.profile = MonotoneTable({-1.0, 1.0}, {0.0, 2.0});  // g(0) = 1
    EXPECT_THROW(make_builtin("perturbed_monge_ampere", p), InvalidParameter);
    EXPECT_THROW(MonotoneTable({0.0, 1.0}, {1.0, 0.0}), InvalidParameter);
}

TEST(Theta, AffineSphereVerdicts)
{
    const auto th = theta_from_pair(with_constant("hyperbolic_affine_sphere", {{"h", 1.0}}));
    const auto v = th.membership(kX, Jet{-2.0, SymMat::identity(2)});
    EXPECT_EQ(v.region, Region::Inside);
    EXPECT_DOUBLE_EQ(v.margin, 1.0);  // min(g_Q = 1, F = 2⁴ − 1)
    EXPECT_EQ(th.membership(kX, Jet{0.0, SymMat::identity(2)}).region, Region::Outside);
    const auto th2 = theta_from_pair(with_constant("special_lagrangian", {{"h", std::numbers::pi / 2}}));
    EXPECT_EQ(th2.membership(kX, Jet{123.0, SymMat::identity(2)}).region, Region::Boundary);
}

TEST(ClassifyJet, AffineSphereExamples)
{
    const auto op = with_constant("hyperbolic_affine_sphere", {{"h", 1.0}});
    auto v = classify_jet(op, kX, Jet{-1.0, SymMat::identity(2)});
    EXPECT_TRUE(v.sub);
    EXPECT_TRUE(v.super);
    v = classify_jet(op, kX, Jet{0.0, SymMat::identity(2)});
    EXPECT_DOUBLE_EQ(v.f, -1.0);
    EXPECT_FALSE(v.sub);
    EXPECT_TRUE(v.super);
    v = classify_jet(op, kX, Jet{-2.0, SymMat::identity(2)});
    EXPECT_DOUBLE_EQ(v.f, 15.0);
    EXPECT_TRUE(v.sub);
    EXPECT_FALSE(v.super);
}

TEST(ClassifyJet, SubIsQMonotone)
{
    for (const char* name : {"affine_sphere", "perturbed_ma", "slag_positive", "linear"}) {
        const auto op = fixture_operator(name);
        JetSampler s(box_with(4), 2);
        for (int i = 0; i < 2000; ++i) {
            const std::vector<double> x{s.uniform(0, 1), s.uniform(0, 1)};
            const Jet j = s.jet();
            if (!classify_jet(op, x, j).sub) continue;
            EXPECT_TRUE(classify_jet(op, x, j + s.q_element(5.0)).sub) << name;
        }
    }
}

TEST(CertifyPair, NegativeAffineSphereFailsPB1)
{
    PairOptions o;
    o.run_rc = false;
    const auto op = fixture_operator("affine_sphere_negative");
    const auto c = certify_pair(op, op.domain, box_with(1), o);
    const auto* pb1 = c.find("PB1");
    ASSERT_NE(pb1, nullptr);
    EXPECT_EQ(pb1->verdict, Verdict::Refuted);
    ASSERT_TRUE(pb1->witness);
    // h ≡ −1 keeps F ≥ 1 on Φ.
    EXPECT_GE(pb1->witness->value, 1.0);
    EXPECT_FALSE(c.pass());
}

TEST(CertifyPair, DegenerateMinRFailsNDC)
{
    PairOptions o;
    o.run_rc = false;
    const auto op = fixture_operator("degenerate_min_r");
    const auto c = certify_pair(op, op.domain, box_with(1), o);
    const auto* ndc = c.find("NDC");
    ASSERT_EQ(ndc->verdict, Verdict::Refuted);
    EXPECT_EQ(ndc->witness->value, 0.0);
    EXPECT_LT(ndc->witness->jet.r, 0.0);
}

TEST(CertifyPair, ApplicabilityByConstraint)
{
    PairOptions o;
    o.run_rc = false;
    o.points = 16;
    const auto lin = certify_pair(fixture_operator("linear"), kUnit, box_with(2), o);
    EXPECT_FALSE(lin.find("PB2")->applicable);
    EXPECT_TRUE(lin.find("F_UC")->applicable);
    EXPECT_EQ(lin.find("F_UC")->verdict, Verdict::Certified);
    const auto has = certify_pair(fixture_operator("affine_sphere"), kUnit, box_with(2), o);
    EXPECT_TRUE(has.find("PB2")->applicable);
    EXPECT_FALSE(has.find("F_UC")->applicable);
}

TEST(CheckRC, AffineSphereSlackTable)
{
    const auto op = fixture_operator("affine_sphere");
    SampleBudget b;
    b.pairs = 400;
    const auto c = check_RC(op, {0.5, 1.0}, kUnit, box_with(5), b);
    ASSERT_EQ(c.verdict, Verdict::Certified);
    for (const auto& row : c.rows) {
        ASSERT_TRUE(row.extras.count("delta_proof"));
        const double dp = row.extras.at("delta_proof");
        // η^{2N+2} − L_h·δ with L_h the grid Lipschitz constant of |x|², close to 2√2 on [0,1]².
        EXPECT_GE(std::pow(row.eta, 6) - op.params.fields.at("h").lipschitz() * dp, -1e-12);
        EXPECT_GE(*row.delta, dp * (1.0 - 1e-9));
    }
}

TEST(CheckRC, SlagCrossingAndLinearRefuted)
{
    SampleBudget b;
    b.pairs = 400;
    for (const char* name : {"slag_crossing", "linear"}) {
        const auto op = fixture_operator(name);
        const auto c = check_RC(op, {0.1, 0.5, 1.0}, kUnit, box_with(6), b);
        EXPECT_EQ(c.verdict, Verdict::Refuted) << name;
        ASSERT_TRUE(c.witness) << name;
        EXPECT_LT(op.F(c.witness->y, c.witness->jet + c.witness->translate), op.F(c.witness->x, c.witness->jet)) << name;
    }
}

TEST(Correspondence, CompatiblePairsAndDegenerateFixture)
{
    for (const char* name : {"affine_sphere", "slag_positive"}) {
        const auto op = fixture_operator(name);
        const auto r = correspondence_check(op, kUnit, box_with(7), 32, 64);
        EXPECT_TRUE(r.pass()) << name << " mismatches " << r.mismatches;
        EXPECT_GT(r.samples, 1000u);
    }
    const auto deg = correspondence_check(fixture_operator("degenerate_min_r"), kUnit, box_with(7), 16, 32);
    EXPECT_FALSE(deg.pass());
    ASSERT_FALSE(deg.examples.empty());
    EXPECT_TRUE(deg.examples.front().super);
    EXPECT_TRUE(deg.examples.front().interior);
}

TEST(ThetaFiber, QMonotoneAtSampledPoints)
{
    for (const char* name : {"affine_sphere", "perturbed_ma", "slag_positive"}) {
        const auto th = theta_from_pair(fixture_operator(name));
        SampleBox b = box_with(8);
        b.count = 2000;
        for (const auto& x : sample_points(kUnit, 6))
            EXPECT_TRUE(check_q_monotone(th.fiber(x), b).pass) << name;
    }
}
