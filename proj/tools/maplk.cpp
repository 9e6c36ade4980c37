#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "maplk/acceptance.hpp"
#include "maplk/errors.hpp"
#include "maplk/exp_functional.hpp"
#include "maplk/families.hpp"
#include "maplk/map_core.hpp"
#include "maplk/map_sim.hpp"
#include "maplk/recurrent_extension.hpp"
#include "maplk/report.hpp"
#include "maplk/spec_io.hpp"

using namespace maplk;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kStatistical = 1, kConfig = 2, kNumeric = 3 };

struct Options {
    std::string family = "reference";
    std::string spec_file;
    double alpha = 0.8;
    double rho = 0.5;
    double beta = 0.1;
    double theta = NAN;
    double t = 1.0;
    double drift = 0.5;
    double s = 0.3;
    double epsilon = 1e-4;
    double budget = 1.0;
    std::size_t n = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    int points = 41;
    std::string phase = "plus";
    std::string mode = "continuous";
    std::string out;
    bool quick = false;
};

std::string canonical_family(std::string f) {
    for (char& c : f)
        if (c == '-') c = '_';
    return f;
}

MapSpec family_spec(const Options& o) {
    const std::string f = canonical_family(o.family);
    if (f == "reference") return reference_map();
    if (f == "drift_only") return drift_only_map(o.drift);
    if (f == "stable") return stable_spec({o.alpha, o.rho});
    if (f == "dual_stable") return dual_stable_spec({o.alpha, o.rho});
    if (f == "conditioned_stable") return conditioned_stable_spec({o.alpha, o.rho});
    if (f == "spectrally_negative") return spectrally_negative_spec(o.alpha);
    throw SchemaError(0, "unknown family '" + o.family + "'");
}

MapSpec load(const Options& o) {
    if (!o.spec_file.empty()) return load_spec_file(o.spec_file);
    try {
        return family_spec(o);
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(0, e.what());
    }
}

Phase parse_phase(const std::string& p) {
    if (p == "plus" || p == "+1" || p == "1") return Phase::plus;
    if (p == "minus" || p == "-1") return Phase::minus;
    throw SchemaError(0, "phase must be plus or minus");
}

RunConfig run_config(const std::string& command, const Options& o) {
    RunConfig c;
    c.seed = o.seed;
    c.set("command", command);
    if (o.spec_file.empty())
        c.set("family", canonical_family(o.family));
    else
        c.set("spec_file", o.spec_file);
    c.set("alpha", o.alpha).set("rho", o.rho).set("beta", o.beta).set("t", o.t).set("n", static_cast<double>(o.n));
    c.set("drift", o.drift).set("s", o.s).set("epsilon", o.epsilon).set("mode", o.mode).set("phase", o.phase);
    if (!std::isnan(o.theta)) c.set("theta", o.theta);
    return c;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        write_text(o.out, text);
}

IConfig icfg(const Options& o) {
    IConfig c;
    c.n = o.n;
    c.seed = o.seed;
    c.workers = o.workers;
    return c;
}

json estimate(const Estimate& e) { return {{"value", e.value}, {"se", e.se}, {"n", e.n}}; }

double resolve_theta(const MapSpec& spec, const Options& o) {
    if (!std::isnan(o.theta)) return o.theta;
    const CramerResult cr = cramer_number(spec, o.alpha);
    if (!cr.theta) throw NoCramerNumber("no Cramér number in (0, alpha); pass --theta or choose another spec");
    return *cr.theta;
}

ExtensionMode resolve_mode(const MapSpec& spec, const Options& o) {
    if (o.mode == "continuous") return ContinuousMode{resolve_theta(spec, o)};
    if (o.mode == "jump") {
        const JumpInReport jr = jump_in_constants(spec, o.alpha, o.beta, 1.0, 1.0, icfg(o));
        return JumpMode{jr.measure};
    }
    throw SchemaError(0, "mode must be continuous or jump");
}

// =============================================================================
// Commands
// =============================================================================

std::string cramer_verdict(const CramerResult& cr, double alpha) {
    std::ostringstream v;
    if (cr.theta) {
        v << "theta = " << format_double(*cr.theta) << " in (0, alpha): continuous extension exists";
        v << "; jump extensions exist for beta in (0, theta)";
        return v.str();
    }
    bool negative = true;
    for (const KappaSample& k : cr.profile)
        if (k.z > 0.0 && k.z < alpha && !(k.kappa < 0.0)) negative = false;
    if (cr.root_beyond_alpha)
        v << "theta = " << format_double(*cr.root_beyond_alpha) << " not in (0, alpha): no continuous extension";
    else
        v << "no Cramér number";
    if (negative) v << "; kappa < 0 on (0, alpha); jump extensions exist for all beta in (0, alpha)";
    else v << "; no recurrent extension";
    return v.str();
}

int cmd_cramer(const Options& o) {
    const MapSpec spec = load(o);
    const CramerResult cr = cramer_number(spec, o.alpha);
    JsonLines out(run_config("cramer", o));
    json grid = json::array();
    for (const KappaSample& k : cr.profile) grid.push_back({k.z, k.kappa});
    json rec{{"alpha", o.alpha}};
    rec["theta"] = cr.theta ? json(*cr.theta) : json(nullptr);
    rec["v_theta"] = cr.v_theta ? json({(*cr.v_theta)[0], (*cr.v_theta)[1]}) : json(nullptr);
    if (cr.root_beyond_alpha) rec["root_beyond_alpha"] = *cr.root_beyond_alpha;
    rec["touching"] = cr.touching;
    rec["verdict"] = cramer_verdict(cr, o.alpha);
    rec["kappa_grid"] = grid;
    out.add(rec);
    emit(o, out.str());
    std::cerr << rec["verdict"].get<std::string>() << "\n";
    return kPass;
}

int cmd_kappa_grid(const Options& o) {
    const MapSpec spec = load(o);
    const double lo = std::isfinite(spec.domain.lo) ? spec.domain.lo : -2.0;
    const double hi = std::isfinite(spec.domain.hi) ? spec.domain.hi : 2.0;
    std::string csv = "z,kappa,v_plus,v_minus\n";
    char row[160];
    for (int k = 1; k <= o.points; ++k) {
        const double z = lo + (hi - lo) * k / (o.points + 1);
        const PerronPair pp = perron_pair(spec, z);
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g,%.17g\n", z, pp.kappa, pp.v[0], pp.v[1]);
        csv += row;
    }
    emit(o, stamp_csv(run_config("kappa-grid", o), csv));
    return kPass;
}

int cmd_simulate_map(const Options& o) {
    const MapSpec spec = load(o);
    SimConfig c;
    c.horizon = o.t;
    c.seed = o.seed;
    c.n_paths = 1;
    const MapPath path = simulate_map(spec, c, 0.0, parse_phase(o.phase));
    emit(o, stamp_csv(run_config("simulate-map", o), path_to_csv(path)));
    return kPass;
}

int cmd_exp_functional(const Options& o) {
    const MapSpec spec = load(o);
    MomentConfig c;
    c.sampling = icfg(o);
    const MomentEstimate m = moment_I(spec, o.alpha, o.s, parse_phase(o.phase), c);
    JsonLines out(run_config("exp-functional", o));
    json rec{{"s", m.s}, {"estimate", m.value}, {"se", m.std_error}, {"n", m.n},
             {"truncation_diagnostic", m.truncation_diagnostic}, {"divergent", m.divergent},
             {"horizons", m.horizons}, {"sweep", m.sweep}};
    rec["kappa_alpha_s"] = m.kappa_alpha_s ? json(*m.kappa_alpha_s) : json(nullptr);
    out.add(rec);
    emit(o, out.str());
    return m.divergent ? kNumeric : kPass;
}

int cmd_entrance_law(const Options& o) {
    const MapSpec spec = load(o);
    const double theta = resolve_theta(spec, o);
    const auto xs = sample_entrance_law(spec, o.alpha, theta, o.t, o.n, o.seed, o.workers);
    std::string csv = "t,x,weight\n";
    char row[128];
    for (const auto& e : xs) {
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g\n", e.t, e.x, e.weight);
        csv += row;
    }
    emit(o, stamp_csv(run_config("entrance-law", o), csv));
    return kPass;
}

int cmd_extension(const Options& o) {
    const MapSpec spec = load(o);
    ExtensionConfig c;
    c.sampling = icfg(o);
    const ExtensionPath p = build_extension(spec, o.alpha, resolve_mode(spec, o), o.t, o.epsilon, c);
    emit(o, stamp_csv(run_config("extension", o), extension_to_csv(p)));
    return kPass;
}

int cmd_sojourn(const Options& o) {
    const MapSpec spec = load(o);
    SojournConfig c;
    c.sampling = icfg(o);
    const SojournReport r = sojourn_constants(spec, o.alpha, resolve_mode(spec, o), c);
    JsonLines out(run_config("sojourn", o));
    const bool in_ci = r.slope_lo <= r.expected_slope && r.expected_slope <= r.slope_hi;
    const double z = z_score(r.residual.value, r.residual.se, 0.0);
    out.add({{"gamma", r.gamma}, {"slope", r.slope}, {"slope_ci", {r.slope_lo, r.slope_hi}},
             {"expected_slope", r.expected_slope}, {"c_plus", estimate(r.c[0])}, {"c_minus", estimate(r.c[1])},
             {"residual", estimate(r.residual)}, {"residual_z", z}, {"infinite_variance", r.infinite_variance},
             {"bin_edges", r.bin_edges}, {"density_plus", r.density[0]}, {"density_minus", r.density[1]}});
    emit(o, out.str());
    return in_ci && z < 3.0 ? kPass : kStatistical;
}

int cmd_verify(const Options& o) {
    if (!o.spec_file.empty()) load_spec_file(o.spec_file);
    AcceptanceOptions a;
    a.seed = o.seed;
    a.workers = o.workers;
    a.quick = o.quick;
    a.budget = o.budget;
    const auto results = run_acceptance(a, [](const CriterionResult& r) {
        std::fprintf(stderr, "%s\n", format_result_line(r).c_str());
    });
    RunConfig c;
    c.seed = a.seed;
    c.set("command", "verify").set("budget", a.budget).set("quick", a.quick ? "true" : "false");
    emit(o, results_json(results, c));
    return all_passed(results) ? kPass : kStatistical;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    if (const char* env = std::getenv("MAPLK_SEED")) {
        try {
            o.seed = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "configuration error: MAPLK_SEED must be an unsigned integer\n";
            return kConfig;
        }
    }

    CLI::App app{"Markov additive processes, Lamperti-Kiu transforms and recurrent extensions"};
    app.require_subcommand(1);
    const auto common = [&](CLI::App* s) {
        s->add_option("--family", o.family, "reference, drift_only, stable, dual_stable, conditioned_stable, spectrally_negative");
        s->add_option("--spec-file", o.spec_file, "MapSpec text file (overrides --family)");
        s->add_option("--alpha", o.alpha, "self-similarity index");
        s->add_option("--rho", o.rho, "positivity parameter of the stable families");
        s->add_option("--drift", o.drift, "drift magnitude of drift_only");
        s->add_option("--seed", o.seed, "master seed (default MAPLK_SEED or 1)");
        s->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        s->add_option("--out", o.out, "output file (stdout when omitted)");
    };
    CLI::App* cramer = app.add_subcommand("cramer", "Cramér number and extension verdict");
    CLI::App* grid = app.add_subcommand("kappa-grid", "kappa and Perron vector on a grid (CSV)");
    grid->add_option("--points", o.points, "grid points")->check(CLI::PositiveNumber);
    CLI::App* sim = app.add_subcommand("simulate-map", "one MAP path on [0, t] (CSV)");
    sim->add_option("--t", o.t, "horizon");
    sim->add_option("--phase", o.phase, "start phase");
    CLI::App* ef = app.add_subcommand("exp-functional", "E[I^s] with horizon-doubling diagnostics");
    ef->add_option("--s", o.s, "moment order");
    ef->add_option("--n", o.n, "paths");
    ef->add_option("--phase", o.phase, "start phase");
    CLI::App* el = app.add_subcommand("entrance-law", "samples of the normalized entrance law at t (CSV)");
    el->add_option("--theta", o.theta, "Cramér number (computed when omitted)");
    el->add_option("--t", o.t, "time");
    el->add_option("--n", o.n, "samples");
    CLI::App* ext = app.add_subcommand("extension", "glued excursions longer than epsilon up to time t (CSV)");
    CLI::App* soj = app.add_subcommand("sojourn", "sojourn density power law and constants");
    for (CLI::App* s : {ext, soj}) {
        s->add_option("--mode", o.mode, "continuous or jump")->check(CLI::IsMember({"continuous", "jump"}));
        s->add_option("--theta", o.theta, "Cramér number (computed when omitted)");
        s->add_option("--beta", o.beta, "jump-in index");
        s->add_option("--n", o.n, "samples");
    }
    ext->add_option("--t", o.t, "total time");
    ext->add_option("--epsilon", o.epsilon, "minimal excursion length");
    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_flag("--quick", o.quick, "analytic criteria only");
    verify->add_option("--budget", o.budget, "Monte Carlo sample-size multiplier")->check(CLI::PositiveNumber);
    for (CLI::App* s : {cramer, grid, sim, ef, el, ext, soj, verify}) common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfig;
    }

    try {
        if (*cramer) return cmd_cramer(o);
        if (*grid) return cmd_kappa_grid(o);
        if (*sim) return cmd_simulate_map(o);
        if (*ef) return cmd_exp_functional(o);
        if (*el) return cmd_entrance_law(o);
        if (*ext) return cmd_extension(o);
        if (*soj) return cmd_sojourn(o);
        if (*verify) return cmd_verify(o);
    } catch (const SchemaError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainViolation& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kNumeric;
    } catch (const AnalyticOnlyComponent& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kConfig;
}
