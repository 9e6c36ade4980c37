#include "maplk/map_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "maplk/errors.hpp"
#include "maplk/map_core.hpp"
#include "maplk/parallel.hpp"

namespace maplk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t last_at_or_before(const std::vector<PathEvent>& ev, double t) {
    auto it = std::upper_bound(ev.begin(), ev.end(), t, [](double v, const PathEvent& e) { return v < e.time; });
    if (it == ev.begin()) throw Error("MapPath: time before path start");
    return static_cast<std::size_t>(it - ev.begin()) - 1;
}

Phase draw_phase(const Vec2& weights, double u) { return u < weights[0] ? Phase::plus : Phase::minus; }

}  // namespace

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::start: return "start";
        case EventKind::subgrid: return "subgrid";
        case EventKind::phase_switch: return "switch";
        case EventKind::levy_jump: return "jump";
        case EventKind::kill: return "kill";
        case EventKind::horizon: return "horizon";
        case EventKind::absorbed: return "absorbed";
    }
    return "?";
}

double MapPath::xi_at(double t) const {
    if (!alive_at(t)) throw NotFinite("xi_at: path is killed at this time");
    const std::size_t k = last_at_or_before(events, t);
    const PathEvent& e = events[k];
    if (e.time == t || k + 1 == events.size()) return e.xi_after;
    const PathEvent& n = events[k + 1];
    const double w = (t - e.time) / (n.time - e.time);
    return e.xi_after + w * (n.xi_before - e.xi_after);
}

Phase MapPath::phase_at(double t) const { return events[last_at_or_before(events, t)].phase_after; }

Phase MapPath::phase_before(double t) const {
    auto it = std::lower_bound(events.begin(), events.end(), t,
                               [](const PathEvent& e, double v) { return e.time < v; });
    if (it == events.begin()) return events.front().phase_after;
    return std::prev(it)->phase_after;
}

void SimConfig::validate() const {
    if (!(horizon > 0.0)) throw Error("SimConfig: horizon must be positive");
    if (!(substep > 0.0) || substep > horizon) throw Error("SimConfig: need 0 < substep <= horizon");
    if (n_paths == 0) throw Error("SimConfig: n_paths must be positive");
}

// =============================================================================
// Walker
// =============================================================================

MapWalker::MapWalker(const MapSpec& spec, RandomStream& rng, double xi0, Phase phase0, double substep)
    : spec_(spec), rng_(rng), substep_(substep), xi_(xi0), phase_(phase0) {
    if (!spec.simulatable())
        throw AnalyticOnlyComponent("simulation needs sampleable components and transitional laws");
    if (!(substep > 0.0)) throw Error("MapWalker: substep must be positive");
    draw_clock();
}

void MapWalker::draw_clock() {
    const LevyComponent& c = spec_.component(phase_);
    const double rate = spec_.rates.rate_out(phase_) + c.jump_rate + c.killing_rate;
    pending_ = rate > 0.0 ? t_ + rng_.exponential(rate) : kInf;
}

bool MapWalker::quiescent() const {
    return alive_ && pending_ == kInf && spec_.component(phase_).gaussian_variance == 0.0;
}

Segment MapWalker::step(double t_stop) {
    if (!alive_) throw Error("MapWalker: stepping a killed path");
    const LevyComponent& c = spec_.component(phase_);
    const double node = c.gaussian_variance > 0.0 ? t_ + substep_ : kInf;
    const double t1 = std::min({pending_, node, t_stop});
    if (t1 == kInf) throw HorizonExhausted("MapWalker: no event and no stop ahead");

    const double dt = t1 - t_;
    double xi1 = xi_ + c.drift * dt;
    if (c.gaussian_variance > 0.0 && dt > 0.0) xi1 += std::sqrt(c.gaussian_variance * dt) * rng_.normal();

    Segment seg{t_, t1, xi_, xi1, phase_, EventKind::subgrid, xi1, phase_};
    t_ = t1;
    xi_ = xi1;
    if (t1 == pending_) {
        const double q = spec_.rates.rate_out(phase_);
        const double u = rng_.uniform() * (q + c.jump_rate + c.killing_rate);
        if (u < q) {
            seg.kind = EventKind::phase_switch;
            xi_ += spec_.switch_jump(phase_).sample(rng_);
            phase_ = other(phase_);
        } else if (u < q + c.jump_rate) {
            seg.kind = EventKind::levy_jump;
            xi_ += c.jump_law->sample(rng_);
        } else {
            seg.kind = EventKind::kill;
            alive_ = false;
        }
        seg.xi_after = xi_;
        seg.phase_after = phase_;
        if (alive_) draw_clock();
    } else if (t1 == t_stop) {
        seg.kind = EventKind::horizon;
    }
    return seg;
}

// =============================================================================
// Paths
// =============================================================================

std::uint64_t path_stream(std::uint64_t base, std::size_t k, int idx) {
    return base + 2 * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(idx);
}

MapPath simulate_map(const MapSpec& spec, const SimConfig& cfg, double x, Phase start,
                     const std::vector<double>& checkpoints) {
    cfg.validate();
    RandomStream rng(cfg.seed, streams::kPath);
    MapWalker w(spec, rng, x, start, cfg.substep);

    std::vector<double> stops;
    for (double c : checkpoints)
        if (c > 0.0 && c < cfg.horizon) stops.push_back(c);
    std::sort(stops.begin(), stops.end());
    stops.push_back(cfg.horizon);

    MapPath path;
    path.horizon = cfg.horizon;
    path.substep = cfg.substep;
    path.events.push_back({0.0, EventKind::start, start, x, x});
    std::size_t next_stop = 0;
    while (w.alive()) {
        while (next_stop < stops.size() && stops[next_stop] <= w.time()) ++next_stop;
        if (next_stop == stops.size()) break;
        const Segment s = w.step(stops[next_stop]);
        EventKind kind = s.kind;
        if (kind == EventKind::horizon && s.t1 < cfg.horizon) kind = EventKind::subgrid;
        path.events.push_back({s.t1, kind, s.phase_after, s.xi1, s.xi_after});
        if (kind == EventKind::kill) path.killed_at = s.t1;
    }
    return path;
}

std::string path_to_csv(const MapPath& path) {
    std::string out = "time,phase,xi,kind\n";
    char buf[160];
    for (const auto& e : path.events) {
        if (e.kind == EventKind::kill) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,-inf,kill\n", e.time, static_cast<int>(e.phase_after));
            out += buf;
            continue;
        }
        if (e.xi_before != e.xi_after) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,pre\n", e.time, static_cast<int>(e.phase_after),
                          e.xi_before);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%s\n", e.time, static_cast<int>(e.phase_after), e.xi_after,
                      to_string(e.kind).c_str());
        out += buf;
    }
    return out;
}

// =============================================================================
// Statistical checks
// =============================================================================

Estimate variance_estimate(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    if (xs.size() < 2) throw Error("variance_estimate: need at least two samples");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    return {m2 * n / (n - 1.0), std::sqrt(std::max(0.0, m4 - m2 * m2) / n), xs.size()};
}

MatrixEstimate empirical_matrix_exponent(const MapSpec& spec, double z, double t, const SimConfig& cfg) {
    cfg.validate();
    if (!spec.domain.contains(z)) throw DomainViolation(z, spec.domain.lo, spec.domain.hi, "empirical_matrix_exponent");
    if (t < 0.0) throw Error("empirical_matrix_exponent: t must be non-negative");
    const std::size_t n = cfg.n_paths;
    MatrixEstimate out{Mat2{}, Mat2{}, n};
    if (t == 0.0) {
        out.value = Mat2::identity();
        return out;
    }
    for (int i = 0; i < 2; ++i) {
        std::vector<double> vals(n);
        std::vector<int> end_phase(n);
        parallel_for(n, cfg.workers, [&](std::size_t k) {
            RandomStream rng(cfg.seed, path_stream(streams::kPath, k, i));
            MapWalker w(spec, rng, 0.0, phase_at(i), cfg.substep);
            while (w.alive() && w.time() < t) w.step(t);
            if (!w.alive()) {
                end_phase[k] = -1;
                vals[k] = 0.0;
            } else {
                end_phase[k] = index_of(w.phase());
                vals[k] = std::exp(z * w.xi());
            }
        });
        for (int j = 0; j < 2; ++j) {
            std::vector<double> col(n);
            for (std::size_t k = 0; k < n; ++k) col[k] = end_phase[k] == j ? vals[k] : 0.0;
            const Estimate e = mean_estimate(col);
            out.value(i, j) = e.value;
            out.se(i, j) = e.se;
        }
    }
    return out;
}

std::vector<Estimate> wald_martingale_check(const MapSpec& spec, double gamma, const std::vector<double>& t_list,
                                            const SimConfig& cfg) {
    cfg.validate();
    const PerronPair pp = perron_pair(spec, gamma);
    const Vec2 start = limiting_distribution(spec.rates);
    std::vector<double> ts(t_list);
    std::sort(ts.begin(), ts.end());
    const std::size_t n = cfg.n_paths, m = ts.size();
    std::vector<double> vals(n * m, 0.0);
    parallel_for(n, cfg.workers, [&](std::size_t k) {
        RandomStream aux(cfg.seed, streams::kStart + k);
        const Phase p0 = draw_phase(start, aux.uniform());
        RandomStream rng(cfg.seed, path_stream(streams::kPath, k));
        MapWalker w(spec, rng, 0.0, p0, cfg.substep);
        for (std::size_t j = 0; j < m; ++j) {
            while (w.alive() && w.time() < ts[j]) w.step(ts[j]);
            if (!w.alive()) break;
            vals[k * m + j] = std::exp(gamma * w.xi() - pp.kappa * ts[j]) * pp.v[index_of(w.phase())] /
                              pp.v[index_of(p0)];
        }
    });
    std::vector<Estimate> out;
    for (double t : t_list) {
        const std::size_t j = static_cast<std::size_t>(std::find(ts.begin(), ts.end(), t) - ts.begin());
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = vals[k * m + j];
        out.push_back(mean_estimate(col));
    }
    return out;
}

double ReversalPoint::max_z() const {
    return std::max({z_score(mean_original, mean_dual), z_score(var_original, var_dual),
                     z_score(plus_original, plus_dual)});
}

std::vector<ReversalPoint> time_reversal_check(const MapSpec& spec, double t, const std::vector<double>& s_grid,
                                               const SimConfig& cfg) {
    cfg.validate();
    if (spec.killed()) throw Error("time_reversal_check: spec must be unkilled");
    const MapSpec dual = dual_spec(spec);
    const Vec2 pi = stationary_distribution(spec.rates);
    const std::size_t n = cfg.n_paths, m = s_grid.size();
    for (double s : s_grid)
        if (s < 0.0 || s > t) throw Error("time_reversal_check: s must lie in [0, t]");

    std::vector<double> orig(n * m), dual_v(n * m);
    std::vector<int> orig_ph(n * m), dual_ph(n * m);
    parallel_for(n, cfg.workers, [&](std::size_t k) {
        SimConfig c = cfg;
        c.horizon = t;
        c.seed = derive_seed(cfg.seed, 2 * k);
        RandomStream aux(cfg.seed, streams::kStart + k);
        std::vector<double> cps;
        for (double s : s_grid) cps.push_back(t - s);
        const MapPath p = simulate_map(spec, c, 0.0, draw_phase(pi, aux.uniform()), cps);
        const double end = p.xi_at(t);
        for (std::size_t j = 0; j < m; ++j) {
            orig[k * m + j] = p.xi_at(t - s_grid[j]) - end;
            orig_ph[k * m + j] = s_grid[j] == t ? index_of(p.phase_at(0.0)) : index_of(p.phase_before(t - s_grid[j]));
        }
        c.seed = derive_seed(cfg.seed, 2 * k + 1);
        const MapPath d = simulate_map(dual, c, 0.0, draw_phase(pi, aux.uniform()), s_grid);
        for (std::size_t j = 0; j < m; ++j) {
            dual_v[k * m + j] = d.xi_at(s_grid[j]);
            dual_ph[k * m + j] = index_of(d.phase_at(s_grid[j]));
        }
    });

    std::vector<ReversalPoint> out;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> a(n), b(n), pa(n), pb(n);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = orig[k * m + j];
            b[k] = dual_v[k * m + j];
            pa[k] = orig_ph[k * m + j] == 0 ? 1.0 : 0.0;
            pb[k] = dual_ph[k * m + j] == 0 ? 1.0 : 0.0;
        }
        ReversalPoint r;
        r.s = s_grid[j];
        r.mean_original = mean_estimate(a);
        r.mean_dual = mean_estimate(b);
        r.var_original = variance_estimate(a);
        r.var_dual = variance_estimate(b);
        r.plus_original = mean_estimate(pa);
        r.plus_dual = mean_estimate(pb);
        // the laws have atoms (paths without events); snap them onto a common grid
        for (auto* v : {&a, &b})
            for (double& x : *v) x = std::round(x * 1e12) / 1e12;
        r.ks = ks_two_sample(a, b);
        out.push_back(r);
    }
    return out;
}

}  // namespace maplk
