#include <cmath>
#include <gtest/gtest.h>

#include "maplk/errors.hpp"
#include "maplk/exp_functional.hpp"
#include "maplk/families.hpp"
#include "maplk/map_core.hpp"

using namespace maplk;

namespace {

IConfig icfg(std::size_t n, std::uint64_t seed) {
    IConfig c;
    c.n = n;
    c.seed = seed;
    return c;
}

MapSpec two_drift(double d1, double d2, double q) {
    MapSpec s;
    s.plus.drift = -d1;
    s.minus.drift = -d2;
    s.rates = {q, q, false};
    return s;
}

}  // namespace

// =============================================================================
// Segment primitives
// =============================================================================

TEST(Segment, IntegralClosedForms) {
    EXPECT_DOUBLE_EQ(segment_integral(0.8, 0.0, 0.0, 2.5), 2.5);
    EXPECT_NEAR(segment_integral(0.8, 0.3, -0.5, 2.0), std::exp(0.24) * (1 - std::exp(-0.8)) / 0.4, 1e-15);
    EXPECT_NEAR(segment_integral(0.8, 0.3, -0.5, INFINITY), std::exp(0.24) / 0.4, 1e-15);
    EXPECT_TRUE(std::isinf(segment_integral(0.8, 0.0, 0.1, INFINITY)));
    EXPECT_NEAR(segment_integral(1.0, 0.0, 1e-12, 1.0), 1.0 + 5e-13, 1e-15);
}

TEST(Segment, InvertRoundTrip) {
    for (double slope : {-0.7, -1e-9, 0.0, 0.4}) {
        for (double r : {0.01, 0.5, 1.3}) {
            const double u = segment_invert(0.6, -0.2, slope, r);
            if (std::isinf(u)) {
                EXPECT_GE(r, segment_integral(0.6, -0.2, slope, INFINITY));
                continue;
            }
            EXPECT_NEAR(segment_integral(0.6, -0.2, slope, u), r, 1e-13 * r);
        }
    }
}

// =============================================================================
// Exactness of I
// =============================================================================

TEST(SimulateI, DriftOnlyExact) {
    for (double d : {0.25, 1.0, 3.0})
        for (double alpha : {0.5, 0.8, 1.7}) {
            const double i = simulate_I(drift_only_map(d), alpha, 1e-6, 11, Phase::minus);
            EXPECT_NEAR(i, 1.0 / (alpha * d), 1e-12 / (alpha * d));
        }
}

TEST(SimulateI, DriftOnlyMomentsExact) {
    const double alpha = 0.8, d = 0.5;
    const auto xs = sample_I(drift_only_map(d), alpha, Phase::plus, icfg(200, 3));
    for (double s : {0.3, 0.7}) {
        const Estimate e = power_moment(xs, s);
        EXPECT_NEAR(e.value, std::pow(alpha * d, -s), 1e-12);
    }
}

TEST(SimulateI, AlphaRescalesDriftOnly) {
    const double i1 = simulate_I(drift_only_map(0.4), 0.5, 1e-6, 1);
    const double i2 = simulate_I(drift_only_map(0.4), 1.5, 1e-6, 1);
    EXPECT_NEAR(i1 / i2, 3.0, 1e-12);
}

TEST(SimulateI, TwoPhaseDriftMatchesQuadrature) {
    const MapSpec s = two_drift(0.3, 1.2, 0.8);
    const double alpha = 0.9;
    // trapezoid quadrature of e^{F(alpha) t} 1 on a fine grid
    const Mat2 f = evaluate_F(s, alpha).m;
    const double h = 1e-3;
    double oracle = 0.0;
    for (int k = 0; k <= 80000; ++k) {
        const Mat2 e = matrix_exp(f, k * h);
        oracle += (k == 0 || k == 80000 ? 0.5 : 1.0) * h * (e(0, 0) + e(0, 1));
    }
    const auto xs = sample_I(s, alpha, Phase::plus, icfg(20000, 5));
    const Estimate m = mean_estimate(xs);
    EXPECT_LT(z_score(m.value, m.se, oracle), 3.0) << m.value << " vs " << oracle;
}

TEST(SimulateI, KilledWithoutMotionIsKillTime) {
    MapSpec s;
    s.rates = {1.0, 1.0, false};
    s.plus.killing_rate = 0.6;
    s.minus.killing_rate = 0.6;
    const auto xs = sample_I(s, 0.8, Phase::plus, icfg(20000, 2));
    const Estimate m = mean_estimate(xs);
    EXPECT_LT(z_score(m.value, m.se, 1.0 / 0.6), 3.0);
    EXPECT_GT(ks_one_sample(xs, [](double x) { return -std::expm1(-0.6 * x); }).p_value, 0.01);
}

TEST(SimulateI, DivergentSpecRejected) {
    EXPECT_THROW(simulate_I(drift_only_map(-0.5), 0.8, 1e-6, 1), NotFinite);
    EXPECT_THROW(sample_I(esscher_tilt(reference_map(), 0.5519884378612765), 0.8, Phase::plus, icfg(10, 1)),
                 NotFinite);
}

TEST(SimulateI, WorkerCountInvariant) {
    IConfig c = icfg(500, 21);
    const auto a = sample_I(reference_map(), 0.8, Phase::minus, c);
    c.workers = 4;
    EXPECT_EQ(a, sample_I(reference_map(), 0.8, Phase::minus, c));
}

TEST(TailBound, MatchesResolventOfF) {
    const MapSpec s = reference_map();
    const TailBound b = TailBound::for_spec(s, 0.4);
    ASSERT_TRUE(b.finite_mean);
    const Vec2 fm = evaluate_F(s, 0.4).m * b.mean_tail;
    EXPECT_NEAR(fm[0], -1.0, 1e-13);
    EXPECT_NEAR(fm[1], -1.0, 1e-13);
    EXPECT_FALSE(TailBound::for_spec(s, 0.8).finite_mean);
}

// =============================================================================
// Moments and the finiteness dichotomy
// =============================================================================

TEST(MomentI, ReferenceMapConverges) {
    MomentConfig c;
    c.sampling = icfg(10000, 8);
    const auto m = moment_I(reference_map(), 0.8, 0.3, Phase::plus, c);
    ASSERT_TRUE(m.kappa_alpha_s.has_value());
    EXPECT_LT(*m.kappa_alpha_s, 0.0);
    EXPECT_LT(m.truncation_diagnostic, 0.01);
    EXPECT_FALSE(m.divergent);
    EXPECT_GT(m.std_error, 0.0);
}

TEST(MomentI, UpwardTiltDiverges) {
    const MapSpec up = esscher_tilt(reference_map(), 0.5519884378612765);
    MomentConfig c;
    c.sampling = icfg(2000, 9);
    c.base_horizon = 5.0;
    const auto m = moment_I(up, 0.8, 0.3, Phase::plus, c);
    EXPECT_GT(*m.kappa_alpha_s, 0.0);
    EXPECT_TRUE(m.divergent);
    for (std::size_t k = 1; k < m.sweep.size(); ++k) EXPECT_GT(m.sweep[k], m.sweep[k - 1]);
}

TEST(MomentI, JensenUpperBound) {
    MapSpec s = reference_map();
    s.plus.killing_rate = 0.3;
    s.minus.killing_rate = 0.3;
    const auto xs = sample_I(s, 0.8, Phase::plus, icfg(20000, 4));
    const Estimate mean = mean_estimate(xs);
    for (double p : {0.2, 0.6}) {
        const Estimate e = power_moment(xs, p);
        EXPECT_LE(e.value, std::pow(mean.value, p) + 3.0 * (e.se + p * std::pow(mean.value, p - 1) * mean.se));
    }
}

TEST(MomentI, MarkovSelfSimilarityInequality) {
    const MapSpec s = reference_map();
    const double alpha = 0.8, p = 0.3;
    const Estimate m_plus = power_moment(sample_I(s, alpha, Phase::plus, icfg(20000, 31)), p);
    const Estimate m_minus = power_moment(sample_I(s, alpha, Phase::minus, icfg(20000, 32)), p);
    const Mat2 e = matrix_exp(evaluate_F(s, alpha * p).m, 1.0);
    const double rhs = e(0, 0) * m_plus.value + e(0, 1) * m_minus.value;
    const double rhs_se = std::hypot(e(0, 0) * m_plus.se, e(0, 1) * m_minus.se);
    EXPECT_GE(m_plus.value + 3.0 * std::hypot(m_plus.se, rhs_se), rhs);
}

TEST(PowerMoment, ZeroExponentIsDegenerate) {
    const Estimate e = power_moment({0.3, 2.0, 7.5}, 0.0);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.se, 0.0);
}

// =============================================================================
// Tilted dual moments
// =============================================================================

TEST(TiltedDual, ExponentIsReflectedShift) {
    const MapSpec s = reference_map();
    const double th = 0.5519884378612765;
    const MapSpec sharp = tilted_dual_spec(s, th);
    for (double z : {-0.5, 0.0, 0.3, 0.9}) EXPECT_NEAR(kappa(sharp, z), kappa(s, th - z), 1e-10);
    EXPECT_LT(kappa_prime(sharp, 0.0), 0.0);
}

TEST(TiltedDual, NoCramerNumberForDrift) {
    EXPECT_FALSE(cramer_number(drift_only_map(0.5), 0.8).theta.has_value());
    EXPECT_THROW(tilted_dual_moment(drift_only_map(0.5), 0.8, 0.0, icfg(10, 1)), NoCramerNumber);
    EXPECT_THROW(tilted_dual_moment(reference_map(), 0.5, 0.55, icfg(10, 1)), NoCramerNumber);
}

TEST(TiltedDual, ReferenceMomentsFiniteAndStable) {
    const MapSpec s = reference_map();
    const double th = *cramer_number(s, 0.8).theta;
    const auto m = tilted_dual_moment(s, 0.8, th, icfg(10000, 6));
    for (const auto& e : m) {
        EXPECT_TRUE(std::isfinite(e.value));
        EXPECT_GT(e.value, 0.0);
        EXPECT_LT(e.std_error, 0.05 * e.value);
    }
    MomentConfig c;
    c.sampling = icfg(10000, 6);
    const auto sweep = moment_I(tilted_dual_spec(s, th), 0.8, th / 0.8 - 1.0, Phase::plus, c);
    EXPECT_LT(sweep.truncation_diagnostic, 0.01);
}
