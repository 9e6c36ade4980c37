#include <cmath>
#include <gtest/gtest.h>

#include "maplk/errors.hpp"
#include "maplk/families.hpp"
#include "maplk/map_core.hpp"
#include "maplk/map_sim.hpp"

using namespace maplk;

namespace {

SimConfig config(double horizon, std::size_t n, std::uint64_t seed) {
    SimConfig c;
    c.horizon = horizon;
    c.n_paths = n;
    c.seed = seed;
    return c;
}

MapSpec chain_only(double q_pm, double q_mp) {
    MapSpec s;
    s.rates = {q_pm, q_mp, false};
    return s;
}

}  // namespace

// =============================================================================
// Path construction
// =============================================================================

TEST(SimulateMap, PureDriftIsLinear) {
    const MapSpec s = drift_only_map(0.4, 1.0);
    const MapPath p = simulate_map(s, config(3.0, 1, 5), 0.0, Phase::plus);
    EXPECT_NEAR(p.final_xi(), -1.2, 1e-13);
    EXPECT_NEAR(p.xi_at(1.7), -0.68, 1e-13);
    EXPECT_EQ(p.events.back().kind, EventKind::horizon);
    for (std::size_t k = 1; k < p.events.size(); ++k) EXPECT_GT(p.events[k].time, p.events[k - 1].time);
}

TEST(SimulateMap, Deterministic) {
    const MapSpec s = reference_map();
    const MapPath a = simulate_map(s, config(10.0, 1, 77), 0.0, Phase::minus);
    const MapPath b = simulate_map(s, config(10.0, 1, 77), 0.0, Phase::minus);
    ASSERT_EQ(a.events.size(), b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) {
        EXPECT_EQ(a.events[k].time, b.events[k].time);
        EXPECT_EQ(a.events[k].xi_after, b.events[k].xi_after);
        EXPECT_EQ(a.events[k].phase_after, b.events[k].phase_after);
    }
}

TEST(SimulateMap, CheckpointsDoNotChangeThePath) {
    const MapSpec s = reference_map();
    const MapPath a = simulate_map(s, config(5.0, 1, 3), 0.0, Phase::plus);
    const MapPath b = simulate_map(s, config(5.0, 1, 3), 0.0, Phase::plus, {0.5, 1.25, 4.0});
    for (double t : {0.3, 0.5, 1.25, 2.2, 4.0, 4.9}) EXPECT_NEAR(a.xi_at(t), b.xi_at(t), 1e-13);
}

TEST(SimulateMap, AnalyticComponentsRefused) {
    EXPECT_THROW(simulate_map(stable_spec({1.5, 0.5}), config(1.0, 1, 1), 0.0, Phase::plus), AnalyticOnlyComponent);
}

TEST(SimulateMap, TransitionalJumpApplied) {
    MapSpec s = chain_only(1.0, 1.0);
    s.u_pm = JumpLaw::deterministic(-0.3);
    s.u_mp = JumpLaw::deterministic(0.7);
    const MapPath p = simulate_map(s, config(20.0, 1, 11), 0.0, Phase::plus);
    for (const auto& e : p.events)
        if (e.kind == EventKind::phase_switch)
            EXPECT_NEAR(e.xi_after - e.xi_before, e.phase_after == Phase::minus ? -0.3 : 0.7, 1e-15);
}

TEST(SimulateMap, CsvExport) {
    const MapPath p = simulate_map(reference_map(), config(1.0, 1, 2), 0.0, Phase::plus);
    const std::string csv = path_to_csv(p);
    EXPECT_EQ(csv.rfind("time,phase,xi,kind\n", 0), 0u);
    EXPECT_NE(csv.find(",horizon\n"), std::string::npos);
}

// =============================================================================
// Event-time marginals
// =============================================================================

TEST(SimulateMap, SwitchCountMatchesFineGridChain) {
    const double q_pm = 2.0, q_mp = 0.5, h = 1e-4;
    // fine-grid chain oracle for the expected switch count on [0, 1] from phase +1
    double p_plus = 1.0, expected = 0.0;
    const double a = std::exp(-(q_pm + q_mp) * h);
    const double pi_plus = q_mp / (q_pm + q_mp);
    for (int k = 0; k < 10000; ++k) {
        expected += p_plus * -std::expm1(-q_pm * h) + (1.0 - p_plus) * -std::expm1(-q_mp * h);
        p_plus = pi_plus + (p_plus - pi_plus) * a;
    }
    const MapSpec s = chain_only(q_pm, q_mp);
    std::vector<double> counts;
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        const MapPath p = simulate_map(s, config(1.0, 1, seed), 0.0, Phase::plus);
        double c = 0;
        for (const auto& e : p.events) c += e.kind == EventKind::phase_switch;
        counts.push_back(c);
    }
    const Estimate m = mean_estimate(counts);
    EXPECT_LT(z_score(m.value, m.se, expected), 3.0) << m.value << " vs " << expected;
}

TEST(SimulateMap, ExponentialKilling) {
    MapSpec s = chain_only(1.0, 1.0);
    s.plus.killing_rate = 0.7;
    s.minus.killing_rate = 0.7;
    std::vector<double> alive;
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        const MapPath p = simulate_map(s, config(1.0, 1, seed), 0.0, Phase::plus);
        alive.push_back(p.killed_at ? 0.0 : 1.0);
        if (p.killed_at) {
            EXPECT_EQ(p.events.back().kind, EventKind::kill);
            EXPECT_THROW(p.xi_at(*p.killed_at), NotFinite);
        }
    }
    const Estimate m = mean_estimate(alive);
    EXPECT_LT(z_score(m.value, m.se, std::exp(-0.7)), 3.0);
}

TEST(SimulateMap, InterSwitchTimesExponential) {
    MapSpec s = reference_map();
    s.rates = {1.3, 0.6, false};
    const MapPath p = simulate_map(s, config(22000.0, 1, 4), 0.0, Phase::plus);
    std::vector<double> sojourn;
    double entered = -1.0;
    for (const auto& e : p.events) {
        if (e.kind != EventKind::phase_switch) continue;
        if (e.phase_after == Phase::minus && entered >= 0.0) sojourn.push_back(e.time - entered);
        if (e.phase_after == Phase::plus) entered = e.time;
    }
    ASSERT_GT(sojourn.size(), 5000u);
    const auto ks = ks_one_sample(sojourn, [](double x) { return -std::expm1(-1.3 * x); });
    EXPECT_GT(ks.p_value, 0.01);
}

TEST(SimulateMap, OccupationConvergesToPi) {
    const MapSpec s = chain_only(1.5, 0.5);
    const double horizon = 20000.0;
    const MapPath p = simulate_map(s, config(horizon, 1, 8), 0.0, Phase::plus);
    double occ = 0.0;
    for (std::size_t k = 0; k + 1 < p.events.size(); ++k)
        if (p.events[k].phase_after == Phase::plus) occ += p.events[k + 1].time - p.events[k].time;
    // CLT variance of the occupation fraction for a two-state chain
    const double lam = 2.0, pi_p = 0.25;
    const double se = std::sqrt(2.0 * pi_p * (1 - pi_p) / (lam * horizon));
    EXPECT_LT(std::fabs(occ / horizon - pi_p), 3.0 * se);
}

TEST(SimulateMap, GaussianIncrementVariance) {
    MapSpec s = chain_only(1.0, 1.0);
    s.plus.gaussian_variance = 0.5;
    s.minus.gaussian_variance = 0.5;
    std::vector<double> ends;
    SimConfig c = config(1.0, 1, 0);
    c.substep = 0.05;
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        c.seed = seed;
        ends.push_back(simulate_map(s, c, 0.0, Phase::plus).final_xi());
    }
    const Estimate v = variance_estimate(ends);
    EXPECT_LT(z_score(v.value, v.se, 0.5), 3.0);
    EXPECT_LT(std::fabs(mean_estimate(ends).value), 3.0 * mean_estimate(ends).se);
}

// =============================================================================
// Moment identity and martingale
// =============================================================================

TEST(EmpiricalExponent, TimeZeroIsIdentity) {
    const auto e = empirical_matrix_exponent(reference_map(), 0.3, 0.0, config(1.0, 10, 1));
    EXPECT_EQ(max_abs_diff(e.value, Mat2::identity()), 0.0);
}

TEST(EmpiricalExponent, ZeroIsChainMarginal) {
    const MapSpec s = reference_map();
    const auto e = empirical_matrix_exponent(s, 0.0, 0.8, config(1.0, 20000, 2));
    const Mat2 p = matrix_exp(s.rates.matrix(), 0.8);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(e.value(i, 0) + e.value(i, 1), 1.0, 1e-12);
        for (int j = 0; j < 2; ++j) EXPECT_LT(z_score(e.value(i, j), e.se(i, j), p(i, j)), 3.0);
    }
}

TEST(EmpiricalExponent, ReferenceMapMatchesMatrixExp) {
    const MapSpec s = reference_map();
    for (double z : {0.2, 0.5}) {
        const auto e = empirical_matrix_exponent(s, z, 1.0, config(1.0, 20000, 3));
        const Mat2 m = matrix_exp(evaluate_F(s, z).m, 1.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) EXPECT_LT(z_score(e.value(i, j), e.se(i, j), m(i, j)), 3.0) << z;
    }
}

TEST(EmpiricalExponent, WorkerCountInvariant) {
    SimConfig c = config(1.0, 3000, 9);
    const auto a = empirical_matrix_exponent(reference_map(), 0.4, 1.0, c);
    c.workers = 4;
    const auto b = empirical_matrix_exponent(reference_map(), 0.4, 1.0, c);
    EXPECT_EQ(max_abs_diff(a.value, b.value), 0.0);
    EXPECT_EQ(max_abs_diff(a.se, b.se), 0.0);
}

TEST(Wald, GammaZeroIsOne) {
    const auto r = wald_martingale_check(reference_map(), 0.0, {0.5, 1.0}, config(1.0, 500, 1));
    for (const auto& e : r) {
        EXPECT_NEAR(e.value, 1.0, 1e-14);
        EXPECT_LT(e.se, 1e-14);
    }
}

TEST(Wald, PureDriftIsIdenticallyOne) {
    const auto r = wald_martingale_check(drift_only_map(0.3), 0.7, {1.0, 2.0}, config(2.0, 200, 1));
    for (const auto& e : r) EXPECT_NEAR(e.value, 1.0, 1e-13);
}

TEST(Wald, ReferenceMapUnitMean) {
    const auto r = wald_martingale_check(reference_map(), 0.3, {0.5, 1.0, 2.0}, config(2.0, 20000, 4));
    for (const auto& e : r) EXPECT_LT(z_score(e.value, e.se, 1.0), 3.0);
}

TEST(Wald, KilledPathsContributeZero) {
    MapSpec s = reference_map();
    s.plus.killing_rate = 0.4;
    s.minus.killing_rate = 0.4;
    const auto r = wald_martingale_check(s, 0.25, {1.0}, config(1.0, 20000, 6));
    EXPECT_LT(z_score(r[0].value, r[0].se, 1.0), 3.0);
}

// =============================================================================
// Time reversal
// =============================================================================

TEST(TimeReversal, ReferenceMapAgainstDual) {
    const auto pts = time_reversal_check(reference_map(), 1.0, {0.0, 0.4, 1.0}, config(1.0, 20000, 12));
    EXPECT_EQ(pts[0].mean_original.value, 0.0);
    EXPECT_EQ(pts[0].var_dual.value, 0.0);
    for (const auto& p : pts) {
        EXPECT_LT(p.max_z(), 3.0) << "s = " << p.s;
        EXPECT_GT(p.ks.p_value, 0.001) << "s = " << p.s << " D = " << p.ks.statistic;
    }
}

TEST(TimeReversal, KilledSpecRejected) {
    MapSpec s = reference_map();
    s.plus.killing_rate = 0.1;
    EXPECT_THROW(time_reversal_check(s, 1.0, {0.5}, config(1.0, 10, 1)), Error);
}
