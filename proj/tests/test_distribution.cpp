#include <cmath>
#include <gtest/gtest.h>
#include <vector>

#include "maplk/distribution.hpp"
#include "maplk/errors.hpp"
#include "maplk/stats.hpp"

using namespace maplk;

namespace {

std::vector<JumpLaw> sampleable_laws() {
    return {JumpLaw::normal(0.3, 0.7), JumpLaw::deterministic(-0.4), JumpLaw::two_sided_exponential(0.35, 3.0, 2.0),
            JumpLaw::uniform(-0.5, 1.0), laws::TiltedUniform{-1.0, 0.5, 1.7}};
}

}  // namespace

// =============================================================================
// MGF and sampling agree
// =============================================================================

TEST(JumpLaw, MgfAtZeroIsOne) {
    for (const auto& law : sampleable_laws()) EXPECT_NEAR(law.mgf(0.0), 1.0, 1e-15) << law.to_string();
}

TEST(JumpLaw, SampleMeanMatchesMgf) {
    for (const auto& law : sampleable_laws()) {
        RandomStream rng(99, 0);
        std::vector<double> e;
        for (int i = 0; i < 100000; ++i) e.push_back(std::exp(0.8 * law.sample(rng)));
        const auto m = mean_estimate(e);
        if (m.se < 1e-12 * m.value)
            EXPECT_NEAR(m.value, law.mgf(0.8), 1e-10 * m.value) << law.to_string();
        else
            EXPECT_LT(z_score(m.value, m.se, law.mgf(0.8)), 4.0) << law.to_string();
    }
}

TEST(JumpLaw, MeanMatchesMgfDerivative) {
    for (const auto& law : sampleable_laws()) {
        const double h = 1e-5;
        EXPECT_NEAR(law.mean(), (law.mgf(h) - law.mgf(-h)) / (2 * h), 1e-8) << law.to_string();
    }
}

TEST(JumpLaw, TiltedMgfIsRatio) {
    for (const auto& law : sampleable_laws()) {
        const double g = 0.6;
        const JumpLaw t = law.tilted(g);
        for (double z : {-0.5, 0.1, 0.9}) EXPECT_NEAR(t.mgf(z), law.mgf(z + g) / law.mgf(g), 1e-12) << law.to_string();
    }
}

TEST(JumpLaw, NegatedMgfIsReflected) {
    for (const auto& law : sampleable_laws()) {
        const JumpLaw n = law.negated();
        for (double z : {-0.7, 0.4, 1.1}) EXPECT_NEAR(n.mgf(z), law.mgf(-z), 1e-12) << law.to_string();
    }
}

TEST(JumpLaw, TwoSidedExponentialDomain) {
    const JumpLaw law = JumpLaw::two_sided_exponential(0.5, 3.0, 2.0);
    EXPECT_THROW(law.mgf(3.0), DomainViolation);
    EXPECT_THROW(law.mgf(-2.5), DomainViolation);
    EXPECT_EQ(law.mgf_domain().hi, 3.0);
    EXPECT_EQ(law.tilted(1.0).mgf_domain().hi, 2.0);
}

TEST(JumpLaw, TiltedUniformSamplesStayInSupport) {
    const JumpLaw law = laws::TiltedUniform{0.0, 2.0, -3.0};
    RandomStream rng(5, 5);
    for (int i = 0; i < 10000; ++i) {
        const double u = law.sample(rng);
        ASSERT_GE(u, 0.0);
        ASSERT_LE(u, 2.0);
    }
}

TEST(JumpLaw, AnalyticRefusesSampling) {
    const JumpLaw law = JumpLaw::analytic([](double z) { return 1.0 / (1.0 - z); }, Interval{-INFINITY, 1.0}, "exp");
    RandomStream rng(1, 1);
    EXPECT_FALSE(law.sampleable());
    EXPECT_THROW(law.sample(rng), AnalyticOnlyComponent);
    EXPECT_NEAR(law.tilted(0.5).mgf(0.25), (1.0 / 0.25) / (1.0 / 0.5), 1e-15);
}

// =============================================================================
// Text form
// =============================================================================

TEST(JumpLaw, ParseRoundTrip) {
    for (const auto& law : sampleable_laws()) {
        const JumpLaw back = JumpLaw::parse(law.to_string());
        EXPECT_EQ(back.to_string(), law.to_string());
        EXPECT_EQ(back.mgf(0.3), law.mgf(0.3));
    }
}

TEST(JumpLaw, ParseErrors) {
    EXPECT_THROW(JumpLaw::parse("gamma(1, 2)"), SchemaError);
    EXPECT_THROW(JumpLaw::parse("normal(1)"), SchemaError);
    EXPECT_THROW(JumpLaw::parse("normal(1, x)"), SchemaError);
    EXPECT_THROW(JumpLaw::parse("uniform(2, 1)"), SchemaError);
    EXPECT_THROW(JumpLaw::parse("deterministic 1"), SchemaError);
}

TEST(Interval, CoversAndShift) {
    const Interval a{-1.0, 2.0};
    EXPECT_TRUE(a.covers({0.0, 1.0}));
    EXPECT_FALSE(a.covers({0.0, 2.0, false, true}));
    EXPECT_TRUE((Interval{-1.0, 2.0, false, true}).covers({0.0, 2.0, false, true}));
    EXPECT_EQ(a.shifted(0.5).hi, 2.5);
    EXPECT_EQ(a.reflected().lo, -2.0);
}
