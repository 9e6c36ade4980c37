#include "maplk/exp_functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maplk/errors.hpp"
#include "maplk/map_core.hpp"
#include "maplk/parallel.hpp"

namespace maplk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double segment_integral(double alpha, double xi0, double slope, double ds) {
    if (ds == 0.0) return 0.0;
    const double base = std::exp(alpha * xi0);
    const double c = alpha * slope;
    if (ds == kInf) {
        if (c < 0.0) return base / -c;
        return kInf;
    }
    const double x = c * ds;
    if (x == 0.0) return base * ds;
    return base * ds * (std::expm1(x) / x);
}

double segment_invert(double alpha, double xi0, double slope, double r) {
    if (r <= 0.0) return 0.0;
    const double rel = r * std::exp(-alpha * xi0);
    const double c = alpha * slope;
    if (c == 0.0) return rel;
    const double arg = c * rel;
    if (arg <= -1.0) return kInf;
    return std::log1p(arg) / c;
}

TailBound TailBound::for_spec(const MapSpec& spec, double alpha) {
    TailBound b;
    b.alpha = alpha;
    if (!spec.domain.contains(alpha)) return b;
    if (!(kappa(spec, alpha) < 0.0)) return b;
    const Mat2 f = evaluate_F(spec, alpha).m;
    const Mat2 neg = -1.0 * f;
    const double det = neg.det();
    const Vec2 m{(neg(1, 1) - neg(0, 1)) / det, (neg(0, 0) - neg(1, 0)) / det};
    if (!(m[0] > 0.0 && m[1] > 0.0)) return b;
    b.finite_mean = true;
    b.mean_tail = m;
    b.bound = std::max(m[0], m[1]);
    return b;
}

WalkResult walk_clock(const MapSpec& spec, double alpha, RandomStream& rng, double xi0, Phase start,
                      const TailRule& rule, const TailBound& bound, const SegmentVisitor& visitor, double substep) {
    if (!(alpha > 0.0)) throw Error("walk_clock: alpha must be positive");
    MapWalker w(spec, rng, xi0, start, substep);
    double a = 0.0;
    std::size_t count = 0;
    while (true) {
        if (w.quiescent()) {
            const double d = spec.component(w.phase()).drift;
            ClockSegment cs{w.time(), kInf, w.xi(), d, w.phase(), a, segment_integral(alpha, w.xi(), d, kInf)};
            if (visitor && !visitor(cs)) return {a, 0.0, WalkEnd::visitor, w.time(), w.xi(), w.phase()};
            if (cs.da == kInf) throw NotFinite("walk_clock: deterministic non-decreasing xi, integral diverges");
            return {a + cs.da, 0.0, WalkEnd::closed_form, kInf, -kInf, w.phase()};
        }
        if (w.time() > rule.max_time || ++count > rule.max_segments)
            throw HorizonExhausted("walk_clock: budget exhausted before the tail rule was met");
        const Segment s = w.step(kInf);
        const double ds = s.t1 - s.t0;
        const double slope = ds > 0.0 ? (s.xi1 - s.xi0) / ds : 0.0;
        const ClockSegment cs{s.t0, ds, s.xi0, slope, s.phase, a, segment_integral(alpha, s.xi0, slope, ds)};
        a += cs.da;
        if (visitor && !visitor(cs)) return {a, 0.0, WalkEnd::visitor, w.time(), s.xi1, s.phase};
        if (s.kind == EventKind::kill) return {a, 0.0, WalkEnd::kill, s.t1, -kInf, s.phase};
        const double level = std::exp(alpha * w.xi());
        if (level * bound.bound <= rule.tol * a) {
            const double tail = bound.finite_mean ? level * bound.mean_tail[index_of(w.phase())] : 0.0;
            return {a, tail, WalkEnd::tail, w.time(), w.xi(), w.phase()};
        }
    }
}

void require_finite_I(const MapSpec& spec, const char* where) {
    if (spec.killed()) return;
    double slope;
    try {
        slope = kappa_prime(spec, 0.0);
    } catch (const DomainViolation&) {
        return;
    }
    if (!(slope < 0.0))
        throw NotFinite(std::string(where) + ": kappa'(0) >= 0 and no killing, I is infinite");
}

double simulate_I(const MapSpec& spec, double alpha, double tol, std::uint64_t seed, Phase start) {
    require_finite_I(spec, "simulate_I");
    RandomStream rng(seed, streams::kPath);
    TailRule rule;
    rule.tol = tol;
    return walk_clock(spec, alpha, rng, 0.0, start, rule, TailBound::for_spec(spec, alpha)).total();
}

std::vector<double> sample_I(const MapSpec& spec, double alpha, Phase start, const IConfig& cfg) {
    require_finite_I(spec, "sample_I");
    const TailBound bound = TailBound::for_spec(spec, alpha);
    std::vector<double> out(cfg.n);
    parallel_for(cfg.n, cfg.workers, [&](std::size_t k) {
        RandomStream rng(cfg.seed, path_stream(streams::kPath, k, index_of(start)));
        out[k] = walk_clock(spec, alpha, rng, 0.0, start, cfg.tail, bound, {}, cfg.substep).total();
    });
    return out;
}

Estimate power_moment(const std::vector<double>& xs, double p) {
    std::vector<double> y(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) y[k] = p == 0.0 ? 1.0 : std::pow(xs[k], p);
    return mean_estimate(y);
}

MomentEstimate moment_I(const MapSpec& spec, double alpha, double s, Phase start, const MomentConfig& cfg) {
    if (!(cfg.base_horizon > 0.0) || cfg.doublings < 1) throw Error("moment_I: need base_horizon > 0, doublings >= 1");
    MomentEstimate out;
    out.s = s;
    if (spec.domain.contains(alpha * s)) out.kappa_alpha_s = kappa(spec, alpha * s);
    for (int k = 0; k <= cfg.doublings; ++k) out.horizons.push_back(cfg.base_horizon * std::ldexp(1.0, k));
    const std::size_t nh = out.horizons.size(), n = cfg.sampling.n;
    const double h_max = out.horizons.back();
    const TailBound bound = TailBound::for_spec(spec, alpha);

    std::vector<double> partial(n * nh);
    parallel_for(n, cfg.sampling.workers, [&](std::size_t k) {
        RandomStream rng(cfg.sampling.seed, path_stream(streams::kPath, k, index_of(start)));
        double* row = &partial[k * nh];
        std::size_t next = 0;
        const auto visitor = [&](const ClockSegment& c) {
            while (next < nh && out.horizons[next] <= c.s0 + c.ds) {
                row[next] = c.a0 + segment_integral(alpha, c.xi0, c.slope, out.horizons[next] - c.s0);
                ++next;
            }
            return next < nh && c.s0 + c.ds < h_max;
        };
        const WalkResult r = walk_clock(spec, alpha, rng, 0.0, start, cfg.sampling.tail, bound, visitor,
                                        cfg.sampling.substep);
        for (; next < nh; ++next) row[next] = r.total();
    });

    std::vector<double> col(n);
    std::vector<Estimate> est;
    for (std::size_t j = 0; j < nh; ++j) {
        for (std::size_t k = 0; k < n; ++k) col[k] = partial[k * nh + j];
        est.push_back(power_moment(col, s));
        out.sweep.push_back(est.back().value);
    }
    out.value = est.back().value;
    out.std_error = est.back().se;
    out.n = n;
    out.truncation_diagnostic = std::fabs(out.sweep[nh - 1] - out.sweep[nh - 2]) / out.sweep[nh - 2];
    bool all_drift = true;
    for (std::size_t j = 1; j < nh; ++j)
        if (!(out.sweep[j] > out.sweep[j - 1] * (1.0 + cfg.drift_threshold))) all_drift = false;
    out.divergent = all_drift;
    return out;
}

MapSpec tilted_dual_spec(const MapSpec& spec, double theta) { return dual_spec(esscher_tilt(spec, theta)); }

std::array<MomentEstimate, 2> tilted_dual_moment(const MapSpec& spec, double alpha, double theta,
                                                 const IConfig& cfg) {
    if (!(theta > 0.0 && theta < alpha))
        throw NoCramerNumber("tilted_dual_moment: theta must lie in (0, alpha)");
    const MapSpec sharp = tilted_dual_spec(spec, theta);
    const double p = theta / alpha - 1.0;
    std::array<MomentEstimate, 2> out;
    for (int i = 0; i < 2; ++i) {
        IConfig c = cfg;
        c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        const std::vector<double> xs = sample_I(sharp, alpha, phase_at(i), c);
        const Estimate e = power_moment(xs, p);
        out[static_cast<std::size_t>(i)].s = p;
        out[static_cast<std::size_t>(i)].value = e.value;
        out[static_cast<std::size_t>(i)].std_error = e.se;
        out[static_cast<std::size_t>(i)].n = e.n;
    }
    return out;
}

}  // namespace maplk
