#include <cmath>
#include <numbers>
#include <gtest/gtest.h>

#include "maplk/errors.hpp"
#include "maplk/families.hpp"
#include "maplk/map_core.hpp"

using namespace maplk;

namespace {

const StableParams kParams[] = {{1.5, 0.5}, {1.2, 0.4}, {0.7, 0.3}, {1.8, 0.5}};

double tg(double x) { return std::tgamma(x); }

}  // namespace

// =============================================================================
// Stable process
// =============================================================================

TEST(StableF, EntriesMatchGammaForms) {
    const StableParams p{1.5, 0.4};
    const double rh = p.rho_hat();
    for (double z : {-0.6, -0.2, 0.3, 1.1}) {
        const Mat2 f = stable_F(p, z);
        const double g = tg(p.alpha - z) * tg(1 + z);
        EXPECT_NEAR(f(0, 0), -g / (tg(p.alpha * rh - z) * tg(1 - p.alpha * rh + z)), 1e-12);
        EXPECT_NEAR(f(0, 1), g / (tg(p.alpha * rh) * tg(1 - p.alpha * rh)), 1e-12);
        EXPECT_NEAR(f(1, 0), g / (tg(p.alpha * p.rho) * tg(1 - p.alpha * p.rho)), 1e-12);
        EXPECT_NEAR(f(1, 1), -g / (tg(p.alpha * p.rho - z) * tg(1 - p.alpha * p.rho + z)), 1e-12);
    }
}

TEST(StableF, DeterminantIdentity) {
    for (const auto& p : kParams) {
        for (int k = 1; k <= 200; ++k) {
            const double z = -1.0 + (p.alpha + 1.0) * k / 201.0;
            if (std::fabs(z - std::round(z)) < 1e-9) continue;
            const double direct = stable_F(p, z).det();
            const double closed = tg(p.alpha - z) * tg(1 + z) / (tg(-z) * tg(1 - p.alpha + z));
            EXPECT_NEAR(direct, closed, 1e-10 * std::max(1.0, std::fabs(closed))) << p.alpha << " " << z;
            EXPECT_NEAR(stable_det(p, z), closed, 1e-10 * std::max(1.0, std::fabs(closed)));
        }
    }
}

TEST(StableF, DeterminantPoles) {
    EXPECT_THROW(stable_det({1.5, 0.5}, 0.0), PoleHit);
    EXPECT_THROW(stable_det({1.5, 0.5}, 1.0), PoleHit);
}

TEST(StableF, RowSumsAtZeroVanish) {
    for (const auto& p : kParams) {
        const Mat2 f = stable_F(p, 0.0);
        EXPECT_NEAR(f(0, 0) + f(0, 1), 0.0, 1e-13);
        EXPECT_NEAR(f(1, 0) + f(1, 1), 0.0, 1e-13);
    }
}

TEST(StableF, SpecReproducesFormula) {
    for (const auto& p : kParams) {
        const MapSpec s = stable_spec(p);
        for (double z = -0.9; z < p.alpha; z += 0.1)
            EXPECT_LT(max_abs_diff(evaluate_F(s, z).m, stable_F(p, z)), 1e-12);
    }
}

TEST(StableParams, Validation) {
    EXPECT_THROW(StableParams({2.5, 0.5}).validate(), Error);
    EXPECT_THROW(StableParams({1.5, 0.1}).validate(), Error);
    EXPECT_NO_THROW(StableParams({0.5, 0.2}).validate());
}

// =============================================================================
// Dual and conditioned stable processes
// =============================================================================

TEST(DualStable, SimilarityToStable) {
    for (const StableParams& p : {StableParams{0.7, 0.3}, StableParams{0.5, 0.6}}) {
        const Vec2 pi = dual_stable_pi(p);
        for (double z = -p.alpha + 0.05; z < 1.0; z += 0.1) {
            const Mat2 f = stable_F(p, -z);
            const Mat2 d = dual_stable_F(p, z);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) EXPECT_NEAR(d(i, j), f(j, i) * pi[j] / pi[i], 1e-12);
        }
    }
}

TEST(DualStable, PiIsStationary) {
    for (const auto& p : kParams) {
        const Vec2 pi = dual_stable_pi(p);
        const Vec2 ref = stationary_distribution(stable_spec(p).rates);
        EXPECT_NEAR(pi[0], ref[0], 1e-14);
        EXPECT_NEAR(pi[1], ref[1], 1e-14);
        const double s1 = std::sin(std::numbers::pi * p.alpha * p.rho_hat());
        const double s2 = std::sin(std::numbers::pi * p.alpha * p.rho);
        EXPECT_NEAR(pi[0], (1 / s1) / (1 / s1 + 1 / s2), 1e-14);
    }
}

TEST(DualStable, SpecMatchesFormula) {
    const StableParams p{0.7, 0.3};
    const MapSpec s = dual_stable_spec(p);
    for (double z = -0.65; z < 1.0; z += 0.1)
        EXPECT_LT(max_abs_diff(evaluate_F(s, z).m, dual_stable_F(p, z)), 1e-12);
    const MapSpec d = dual_spec(stable_spec(p));
    for (double z = -0.65; z < 1.0; z += 0.1)
        EXPECT_LT(max_abs_diff(evaluate_F(d, z).m, dual_stable_F(p, z)), 1e-12);
}

TEST(ConditionedStable, SwapsPositivityParameter) {
    const StableParams p{1.4, 0.35};
    for (double z = -1.2; z < 0.9; z += 0.15) {
        const Mat2 c = conditioned_stable_F(p, z);
        const Mat2 d = dual_stable_F({p.alpha, p.rho_hat()}, z);
        EXPECT_LT(max_abs_diff(c, d), 1e-13);
        EXPECT_NEAR(c.det(), stable_F(p, -z).det(), 1e-10 * std::max(1.0, std::fabs(c.det())));
    }
}

// =============================================================================
// Spectrally negative stable process
// =============================================================================

TEST(SpectrallyNegative, ZerosAndPole) {
    for (double a : {1.2, 1.5, 1.8}) {
        const auto [p1, m1] = spectrally_negative_exponents(a, a - 1.0);
        EXPECT_NEAR(p1, 0.0, 1e-14);
        EXPECT_NEAR(m1, 0.0, 1e-14);
        EXPECT_THROW(spectrally_negative_exponents(a, a), PoleHit);
    }
}

TEST(SpectrallyNegative, GammaForms) {
    const double a = 1.7;
    for (double z : {0.1, 0.5, 1.2, 1.6}) {
        const auto [p1, m1] = spectrally_negative_exponents(a, z);
        EXPECT_NEAR(p1, tg(1 + z) / tg(z - a + 1), 1e-12);
        EXPECT_NEAR(m1, tg(a - z) * tg(1 + z) / (tg(z - a) * tg(1 - z + a)), 1e-12);
    }
}

TEST(SpectrallyNegative, SpecIsReducible) {
    const MapSpec s = spectrally_negative_spec(1.5);
    EXPECT_TRUE(s.rates.reducible);
    EXPECT_EQ(s.rates.q_mp, 0.0);
    EXPECT_GT(s.rates.q_pm, 0.0);
    EXPECT_TRUE(s.domain.lo_closed);
    EXPECT_EQ(s.domain.lo, 0.0);
    EXPECT_EQ(s.domain.hi, 1.5);
}

// =============================================================================
// Cramér invariant across families
// =============================================================================

TEST(FamilyCramer, StableRootAtAlphaMinusOne) {
    for (const auto& p : kParams) {
        if (p.alpha <= 1.0) continue;
        const auto r = cramer_number(stable_spec(p), p.alpha);
        ASSERT_TRUE(r.theta.has_value());
        EXPECT_NEAR(*r.theta, p.alpha - 1.0, 1e-12);
        EXPECT_NEAR(kappa(stable_spec(p), *r.theta), 0.0, 1e-12);
    }
}

TEST(FamilyCramer, DualStableRootAtOneMinusAlpha) {
    const StableParams inside{0.75, 0.5};
    const auto r = cramer_number(dual_stable_spec(inside), inside.alpha);
    ASSERT_TRUE(r.theta.has_value());
    EXPECT_NEAR(*r.theta, 0.25, 1e-12);

    const StableParams beyond{0.3, 0.5};
    const auto b = cramer_number(dual_stable_spec(beyond), beyond.alpha);
    EXPECT_FALSE(b.theta.has_value());
    ASSERT_TRUE(b.root_beyond_alpha.has_value());
    EXPECT_NEAR(*b.root_beyond_alpha, 0.7, 1e-10);
}

TEST(FamilyCramer, KappaSignAroundRoot) {
    for (const auto& p : kParams) {
        if (p.alpha <= 1.0) continue;
        const MapSpec s = stable_spec(p);
        const double th = p.alpha - 1.0;
        EXPECT_LT(kappa(s, 0.5 * th), 0.0);
        EXPECT_GT(kappa(s, 0.5 * (th + p.alpha)), 0.0);
    }
}
