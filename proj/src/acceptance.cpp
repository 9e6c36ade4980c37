#include "maplk/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "maplk/errors.hpp"
#include "maplk/exp_functional.hpp"
#include "maplk/families.hpp"
#include "maplk/lamperti_kiu.hpp"
#include "maplk/map_core.hpp"
#include "maplk/map_sim.hpp"
#include "maplk/recurrent_extension.hpp"
#include "maplk/rng.hpp"

namespace maplk {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr double kRefAlpha = 0.8;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

class Context {
public:
    explicit Context(const AcceptanceOptions& o) : opt_(o) {}

    std::size_t n(double nominal, double floor) const {
        return static_cast<std::size_t>(std::max(floor, std::round(nominal * opt_.budget)));
    }
    std::uint64_t seed(int id, int k = 0) const {
        return derive_seed(opt_.seed, static_cast<std::uint64_t>(id) * 100 + static_cast<std::uint64_t>(k));
    }
    IConfig icfg(std::size_t count, int id, int k = 0) const {
        IConfig c;
        c.n = count;
        c.seed = seed(id, k);
        c.workers = opt_.workers;
        return c;
    }
    SimConfig scfg(double horizon, std::size_t count, int id, int k = 0) const {
        SimConfig c;
        c.horizon = horizon;
        c.n_paths = count;
        c.seed = seed(id, k);
        c.workers = opt_.workers;
        return c;
    }
    const AcceptanceOptions& options() const { return opt_; }

private:
    AcceptanceOptions opt_;
};

double reference_theta() { return *cramer_number(reference_map(), kRefAlpha).theta; }

CriterionResult started(int id, std::string name) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

json estimate(const Estimate& e) { return {{"value", e.value}, {"se", e.se}, {"n", e.n}}; }

// =============================================================================
// Analytic criteria
// =============================================================================

CriterionResult stable_cramer(const Context&) {
    CriterionResult r = started(1, "stable_cramer");
    const auto t0 = Clock::now();
    double worst = 0.0;
    int checked = 0, skipped = 0;
    bool found = true;
    r.data["pairs"] = json::array();
    for (double a : {1.1, 1.25, 1.5, 1.75, 1.9})
        for (double rho : {0.3, 0.5, 0.7}) {
            json row{{"alpha", a}, {"rho", rho}};
            if (a * rho > 1.0 || a * (1.0 - rho) > 1.0) {
                ++skipped;
                row["status"] = "invalid";
                r.data["pairs"].push_back(row);
                continue;
            }
            const CramerResult cr = cramer_number(stable_spec({a, rho}), a);
            ++checked;
            if (!cr.theta) {
                found = false;
                row["status"] = "no root";
            } else {
                const double err = std::fabs(*cr.theta - (a - 1.0));
                worst = std::max(worst, err);
                row["theta"] = *cr.theta;
                row["error"] = err;
            }
            r.data["pairs"].push_back(row);
        }
    const double elapsed = seconds_since(t0);
    const bool pass = found && worst < 1e-9 && elapsed < 2.0;
    r.verdict = pass ? Verdict::pass : Verdict::fail;
    r.detail = std::to_string(checked) + " pairs, max |theta-(alpha-1)| " + fmt("%.2e", worst) + ", " +
               std::to_string(skipped) + " invalid skipped";
    return r;
}

CriterionResult determinant_identity(const Context&) {
    CriterionResult r = started(2, "determinant_identity");
    double worst = 0.0;
    int points = 0;
    for (const StableParams& p : {StableParams{1.5, 0.5}, {1.2, 0.4}, {0.7, 0.3}, {1.8, 0.5}}) {
        double set_worst = 0.0;
        for (int k = 1; k <= 200; ++k) {
            double z = -1.0 + (p.alpha + 1.0) * k / 201.0;
            if (std::fabs(z - std::round(z)) < 1e-9) z += 1e-6;
            const double closed = std::tgamma(p.alpha - z) * std::tgamma(1.0 + z) /
                                  (std::tgamma(-z) * std::tgamma(1.0 - p.alpha + z));
            const double direct = stable_F(p, z).det();
            const double rel = std::fabs(direct - closed) / std::max(std::fabs(closed), 1e-300);
            set_worst = std::max(set_worst, rel);
            ++points;
        }
        r.data["sets"].push_back({{"alpha", p.alpha}, {"rho", p.rho}, {"max_rel_error", set_worst}});
        worst = std::max(worst, set_worst);
    }
    r.verdict = worst < 1e-10 ? Verdict::pass : Verdict::fail;
    r.detail = std::to_string(points) + " points, max rel error " + fmt("%.2e", worst);
    return r;
}

CriterionResult dual_stable_cramer(const Context&) {
    CriterionResult r = started(3, "dual_stable_cramer");
    double worst = 0.0;
    bool ok = true;
    for (double a : {0.55, 0.6, 0.75, 0.9}) {
        const CramerResult cr = cramer_number(dual_stable_spec({a, 0.5}), a);
        if (!cr.theta) {
            ok = false;
            r.data["inside"].push_back({{"alpha", a}, {"status", "no root"}});
            continue;
        }
        const double err = std::fabs(*cr.theta - (1.0 - a));
        worst = std::max(worst, err);
        r.data["inside"].push_back({{"alpha", a}, {"theta", *cr.theta}, {"error", err}});
    }
    for (double a : {0.3, 0.45}) {
        const CramerResult cr = cramer_number(dual_stable_spec({a, 0.5}), a);
        const std::string verdict = cr.theta ? "continuous extension" : "no continuous extension";
        if (cr.theta) ok = false;
        json row{{"alpha", a}, {"verdict", verdict}};
        if (cr.root_beyond_alpha) row["root_beyond_alpha"] = *cr.root_beyond_alpha;
        r.data["outside"].push_back(row);
    }
    r.verdict = ok && worst < 1e-9 ? Verdict::pass : Verdict::fail;
    r.detail = "max |theta-(1-alpha)| " + fmt("%.2e", worst) + ", alpha 0.3/0.45 no continuous extension" +
               (ok ? "" : " (mismatch)");
    return r;
}

CriterionResult spectrally_negative(const Context&) {
    CriterionResult r = started(4, "spectrally_negative");
    double worst = 0.0;
    for (double a : {1.2, 1.5, 1.8}) {
        const auto [p, m] = spectrally_negative_exponents(a, a - 1.0);
        worst = std::max({worst, std::fabs(p), std::fabs(m)});
        r.data["values"].push_back({{"alpha", a}, {"psi_plus_dagger", p}, {"psi_minus", m}});
    }
    r.verdict = worst < 1e-10 ? Verdict::pass : Verdict::fail;
    r.detail = "max |psi(alpha-1)| " + fmt("%.2e", worst);
    return r;
}

CriterionResult drift_only_exactness(const Context& ctx) {
    CriterionResult r = started(7, "exp_functional_exact");
    double worst = 0.0;
    for (double d : {0.25, 1.0, 3.0})
        for (double a : {0.5, 0.8, 1.7}) {
            const MapSpec s = drift_only_map(d);
            for (Phase ph : {Phase::plus, Phase::minus}) {
                const double i = simulate_I(s, a, 1e-6, ctx.seed(7), ph);
                const double exact = 1.0 / (a * d);
                worst = std::max(worst, std::fabs(i - exact) / exact);
            }
            const auto xs = sample_I(s, a, Phase::plus, ctx.icfg(64, 7, 1));
            for (double p : {0.3, 0.7, -0.4}) {
                const double exact = std::pow(a * d, -p);
                worst = std::max(worst, std::fabs(power_moment(xs, p).value - exact) / exact);
            }
        }
    r.data["max_rel_error"] = worst;
    r.verdict = worst < 1e-12 ? Verdict::pass : Verdict::fail;
    r.detail = "max rel error " + fmt("%.2e", worst);
    return r;
}

CriterionResult eigen_lemma(const Context& ctx) {
    CriterionResult r = started(14, "eigen_lemma");
    RandomStream rng(ctx.seed(14), streams::kAux);
    int accepted = 0, counterexamples = 0;
    double worst = -1.0;
    while (accepted < 10000) {
        Mat2 a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a(i, j) = 4.0 * rng.uniform() - 2.0;
        const double h = 0.5 * (a(0, 0) - a(1, 1));
        if (h * h + a(0, 1) * a(1, 0) < 0.0) continue;
        const EigenBoundReport b = leading_eigen_bound(a);
        if (b.certificate == EigenCertificate::hypotheses_violated) continue;
        ++accepted;
        const long double tr = a.trace(), det = a.det();
        const double lam = static_cast<double>((tr + std::sqrt(std::max(0.0L, tr * tr - 4 * det))) / 2);
        worst = std::max(worst, lam);
        if (lam > 1.0 + 1e-12) ++counterexamples;
    }
    r.data = {{"matrices", accepted}, {"counterexamples", counterexamples}, {"max_eigenvalue", worst}};
    r.verdict = counterexamples == 0 ? Verdict::pass : Verdict::fail;
    r.detail = std::to_string(accepted) + " matrices, max eigenvalue " + fmt("%.15f", worst) + ", " +
               std::to_string(counterexamples) + " counterexamples";
    return r;
}

// =============================================================================
// Monte Carlo criteria
// =============================================================================

CriterionResult moment_identity(const Context& ctx) {
    CriterionResult r = started(5, "moment_identity");
    const auto t0 = Clock::now();
    const MapSpec s = reference_map();
    const std::size_t n = ctx.n(1e5, 2000);
    double worst = 0.0;
    int k = 0;
    for (double z : {0.2, 0.5})
        for (double t : {0.5, 1.0}) {
            const MatrixEstimate e = empirical_matrix_exponent(s, z, t, ctx.scfg(t, n, 5, k++));
            const Mat2 m = matrix_exp(evaluate_F(s, z).m, t);
            double zmax = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) zmax = std::max(zmax, z_score(e.value(i, j), e.se(i, j), m(i, j)));
            worst = std::max(worst, zmax);
            r.data["points"].push_back({{"z", z}, {"t", t}, {"max_z", zmax}});
        }
    const double elapsed = seconds_since(t0);
    r.data["n"] = n;
    r.verdict = worst < 3.0 && elapsed < 30.0 ? Verdict::pass : Verdict::fail;
    r.detail = "n " + std::to_string(n) + ", max z " + fmt("%.2f", worst);
    return r;
}

CriterionResult wald_martingale(const Context& ctx) {
    CriterionResult r = started(6, "wald_martingale");
    const std::size_t n = ctx.n(1e5, 2000);
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const auto est = wald_martingale_check(reference_map(), 0.3, ts, ctx.scfg(2.0, n, 6));
    double worst = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double z = z_score(est[k].value, est[k].se, 1.0);
        worst = std::max(worst, z);
        r.data["points"].push_back({{"t", ts[k]}, {"mean", estimate(est[k])}, {"z", z}});
    }
    r.verdict = worst < 3.0 ? Verdict::pass : Verdict::fail;
    r.detail = "gamma 0.3, n " + std::to_string(n) + ", max z " + fmt("%.2f", worst);
    return r;
}

CriterionResult finiteness_dichotomy(const Context& ctx) {
    CriterionResult r = started(8, "finiteness_dichotomy");
    const double s = 0.3;
    MomentConfig c;
    c.sampling = ctx.icfg(ctx.n(1e4, 1000), 8);
    const MomentEstimate fin = moment_I(reference_map(), kRefAlpha, s, Phase::plus, c);
    MomentConfig up = c;
    up.sampling = ctx.icfg(ctx.n(2000, 500), 8, 1);
    up.base_horizon = 5.0;
    const MomentEstimate div = moment_I(esscher_tilt(reference_map(), reference_theta()), kRefAlpha, s, Phase::plus, up);
    bool monotone = true;
    for (std::size_t k = 1; k < div.sweep.size(); ++k)
        if (!(div.sweep[k] > div.sweep[k - 1])) monotone = false;
    const bool ok = fin.kappa_alpha_s && *fin.kappa_alpha_s < 0.0 && fin.truncation_diagnostic < 0.01 &&
                    !fin.divergent && div.kappa_alpha_s && *div.kappa_alpha_s > 0.0 && div.divergent && monotone;
    r.data = {{"finite", {{"kappa_alpha_s", fin.kappa_alpha_s.value_or(NAN)},
                          {"drift", fin.truncation_diagnostic},
                          {"divergent", fin.divergent},
                          {"sweep", fin.sweep}}},
              {"tilted", {{"kappa_alpha_s", div.kappa_alpha_s.value_or(NAN)},
                          {"divergent", div.divergent},
                          {"sweep", div.sweep}}}};
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    r.detail = "reference drift " + fmt("%.2e", fin.truncation_diagnostic) + ", tilted " +
               (div.divergent ? "divergent" : "not flagged");
    return r;
}

CriterionResult entrance_law(const Context& ctx) {
    CriterionResult r = started(9, "entrance_law");
    const MapSpec s = reference_map();
    const double theta = reference_theta();
    const NormalizationReport nr = excursion_normalization(s, kRefAlpha, theta, ctx.icfg(ctx.n(2e4, 2000), 9));
    const double zn = z_score(nr.mass.value, nr.mass.se, 1.0);

    const std::size_t n = ctx.n(1e4, 1000);
    const double c = 4.0;
    const auto at1 = sample_entrance_law(s, kRefAlpha, theta, 1.0, n, ctx.seed(9, 1), ctx.options().workers);
    const auto atc = sample_entrance_law(s, kRefAlpha, theta, c, n, ctx.seed(9, 2), ctx.options().workers);
    std::vector<double> a, b;
    for (const auto& e : at1) a.push_back(e.x);
    for (const auto& e : atc) b.push_back(e.x / std::pow(c, 1.0 / kRefAlpha));
    const KsResult ks = ks_two_sample(a, b);

    r.data = {{"normalization", estimate(nr.mass)}, {"z", zn}, {"ks_statistic", ks.statistic},
              {"ks_p", ks.p_value}, {"n", n}};
    r.verdict = zn < 3.0 && ks.p_value > 0.01 ? Verdict::pass : Verdict::fail;
    r.detail = "n(1-e^{-T0}) " + fmt("%.4f", nr.mass.value) + " (z " + fmt("%.2f", zn) + "), KS p " +
               fmt("%.3f", ks.p_value);
    return r;
}

CriterionResult jump_constants(const Context& ctx) {
    CriterionResult r = started(10, "jump_constants");
    const double alpha = 0.5;
    double worst = 0.0;
    int k = 0;
    for (double beta : {alpha / 4.0, alpha / 2.0}) {
        const JumpInReport jr = jump_in_constants(reference_map(), alpha, beta, 1.0, 1.0, ctx.icfg(ctx.n(2e4, 2000), 10, k++));
        const double z = z_score(jr.residual.value, jr.residual.se, 0.0);
        worst = std::max(worst, z);
        r.data["betas"].push_back({{"beta", beta},
                                   {"b_plus", jr.measure.b_plus},
                                   {"b_minus", jr.measure.b_minus},
                                   {"residual", estimate(jr.residual)},
                                   {"z", z}});
    }
    r.verdict = worst < 3.0 ? Verdict::pass : Verdict::fail;
    r.detail = "alpha 0.5, beta alpha/4 and alpha/2, max z " + fmt("%.2f", worst);
    return r;
}

CriterionResult sojourn(const Context& ctx) {
    CriterionResult r = started(11, "sojourn_power_law");
    SojournConfig cfg;
    cfg.sampling = ctx.icfg(ctx.n(2e4, 2000), 11);
    const SojournReport s = sojourn_constants(reference_map(), kRefAlpha, ContinuousMode{reference_theta()}, cfg);
    const bool in_ci = s.slope_lo <= s.expected_slope && s.expected_slope <= s.slope_hi;
    const double z = z_score(s.residual.value, s.residual.se, 0.0);
    r.data = {{"slope", s.slope},      {"ci", {s.slope_lo, s.slope_hi}}, {"expected", s.expected_slope},
              {"residual", estimate(s.residual)}, {"z", z}, {"c_plus", estimate(s.c[0])},
              {"c_minus", estimate(s.c[1])}};
    r.verdict = in_ci && z < 3.0 ? Verdict::pass : Verdict::fail;
    r.detail = "slope " + fmt("%.4f", s.slope) + " in [" + fmt("%.4f", s.slope_lo) + ", " + fmt("%.4f", s.slope_hi) +
               "] vs " + fmt("%.4f", s.expected_slope) + ", residual z " + fmt("%.2f", z);
    return r;
}

CriterionResult invariant_function(const Context& ctx) {
    CriterionResult r = started(12, "invariant_function");
    const MapSpec s = reference_map();
    const CramerResult cr = cramer_number(s, kRefAlpha);
    const auto pts = invariant_function_check(s, kRefAlpha, *cr.theta, *cr.v_theta,
                                              {{1.0, 0.1}, {1.0, 1.0}, {-2.0, 0.5}, {0.5, 2.0}},
                                              ctx.icfg(ctx.n(2e4, 2000), 12));
    double worst = 0.0;
    for (const auto& p : pts) {
        worst = std::max(worst, p.z());
        r.data["points"].push_back(
            {{"x", p.x}, {"t", p.t}, {"h", p.h}, {"estimate", estimate(p.estimate)}, {"z", p.z()}});
    }
    r.verdict = worst < 3.0 ? Verdict::pass : Verdict::fail;
    r.detail = "4 points, max z " + fmt("%.2f", worst);
    return r;
}

CriterionResult weak_duality(const Context& ctx) {
    CriterionResult r = started(13, "weak_duality");
    struct Case {
        double q;
        IntervalIndicator f, g;
    };
    double worst = 0.0;
    int k = 0;
    for (const Case& c : {Case{1.0, {1.0, 2.0}, {-2.0, -1.0}}, Case{0.5, {0.5, 1.0}, {1.5, 3.0}}}) {
        const DualityReport d =
            resolvent_duality_check(reference_map(), kRefAlpha, c.q, c.f, c.g, ctx.icfg(ctx.n(2e4, 2000), 13, k++));
        worst = std::max(worst, d.z());
        r.data["pairs"].push_back({{"q", c.q},
                                   {"f", {c.f.lo, c.f.hi}},
                                   {"g", {c.g.lo, c.g.hi}},
                                   {"lhs", estimate(d.lhs)},
                                   {"rhs", estimate(d.rhs)},
                                   {"z", d.z()}});
    }
    r.verdict = worst < 3.0 ? Verdict::pass : Verdict::fail;
    r.detail = "2 pairs, max z " + fmt("%.2f", worst);
    return r;
}

RunConfig rerun_config(const AcceptanceOptions& o) {
    RunConfig c;
    c.seed = o.seed;
    c.set("command", "verify");
    c.set("budget", o.budget);
    c.set("quick", o.quick ? "true" : "false");
    return c;
}

CriterionResult determinism(const Context& ctx) {
    CriterionResult r = started(15, "determinism");
    AcceptanceOptions o = ctx.options();
    o.determinism = false;
    o.budget = 0.02;
    std::vector<std::string> outs;
    for (int w : {1, 1, 4, 4}) {
        o.workers = w;
        outs.push_back(results_json(run_acceptance(o), rerun_config(o)));
    }
    bool same = true;
    for (const auto& s : outs) same = same && s == outs.front();
    r.data = {{"runs", outs.size()}, {"workers", {1, 1, 4, 4}}, {"bytes", outs.front().size()},
              {"digest", fnv1a(outs.front())}};
    r.verdict = same ? Verdict::pass : Verdict::fail;
    r.detail = std::to_string(outs.size()) + " runs at workers 1,1,4,4, " +
               (same ? "byte-identical" : "outputs differ");
    return r;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::skip: return "SKIP";
    }
    return "?";
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const ResultSink& sink) {
    using Fn = CriterionResult (*)(const Context&);
    struct Entry {
        int id;
        const char* name;
        Fn fn;
        bool analytic;
    };
    static const Entry entries[] = {
        {1, "stable_cramer", stable_cramer, true},
        {2, "determinant_identity", determinant_identity, true},
        {3, "dual_stable_cramer", dual_stable_cramer, true},
        {4, "spectrally_negative", spectrally_negative, true},
        {5, "moment_identity", moment_identity, false},
        {6, "wald_martingale", wald_martingale, false},
        {7, "exp_functional_exact", drift_only_exactness, true},
        {8, "finiteness_dichotomy", finiteness_dichotomy, false},
        {9, "entrance_law", entrance_law, false},
        {10, "jump_constants", jump_constants, false},
        {11, "sojourn_power_law", sojourn, false},
        {12, "invariant_function", invariant_function, false},
        {13, "weak_duality", weak_duality, false},
        {14, "eigen_lemma", eigen_lemma, true},
        {15, "determinism", determinism, false},
    };
    const Context ctx(options);
    std::vector<CriterionResult> out;
    for (const Entry& e : entries) {
        CriterionResult r = started(e.id, e.name);
        const auto t0 = Clock::now();
        if ((options.quick && !e.analytic) || (e.id == 15 && !options.determinism)) {
            r.verdict = Verdict::skip;
            r.detail = options.quick ? "quick mode" : "nested run";
        } else {
            try {
                r = e.fn(ctx);
            } catch (const std::exception& ex) {
                r.verdict = Verdict::fail;
                r.detail = std::string("error: ") + ex.what();
            }
        }
        r.seconds = seconds_since(t0);
        out.push_back(r);
        if (sink) sink(out.back());
    }
    return out;
}

std::string format_result_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%-4s  criterion %2d  %-22s ", to_string(r.verdict).c_str(), r.id, r.name.c_str());
    return head + r.detail + " (" + fmt("%.1f", r.seconds) + " s)";
}

std::string results_json(const std::vector<CriterionResult>& results, const RunConfig& config) {
    JsonLines lines(config);
    for (const auto& r : results)
        lines.add({{"criterion", r.id}, {"name", r.name}, {"verdict", to_string(r.verdict)},
                   {"detail", r.detail}, {"data", r.data}});
    return lines.str();
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::none_of(results.begin(), results.end(),
                        [](const CriterionResult& r) { return r.verdict == Verdict::fail; });
}

}  // namespace maplk
