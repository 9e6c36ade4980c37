#include "maplk/lamperti_kiu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maplk/errors.hpp"
#include "maplk/map_core.hpp"
#include "maplk/parallel.hpp"

namespace maplk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// beyond this discount exponent the remaining occupation is below e^{-50}/q
constexpr double kDiscountCutoff = 50.0;

}  // namespace

// =============================================================================
// Clock
// =============================================================================

ClockTable build_clock(const MapPath& path, double alpha) {
    if (!(alpha > 0.0)) throw Error("build_clock: alpha must be positive");
    ClockTable c;
    c.alpha = alpha;
    c.s.push_back(path.events.front().time);
    c.a.push_back(0.0);
    for (std::size_t k = 0; k + 1 < path.events.size(); ++k) {
        const PathEvent& e = path.events[k];
        const PathEvent& n = path.events[k + 1];
        const double ds = n.time - e.time;
        const double slope = ds > 0.0 ? (n.xi_before - e.xi_after) / ds : 0.0;
        c.xi0.push_back(e.xi_after);
        c.slope.push_back(slope);
        c.phase.push_back(e.phase_after);
        c.s.push_back(n.time);
        c.a.push_back(c.a.back() + segment_integral(alpha, e.xi_after, slope, ds));
        if (n.kind == EventKind::kill) {
            c.killed = true;
            break;
        }
    }
    return c;
}

double ClockTable::at(double u) const {
    if (u <= s.front()) return 0.0;
    if (u >= s.back()) return a.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), u) - s.begin()) - 1;
    return a[k] + segment_integral(alpha, xi0[k], slope[k], u - s[k]);
}

double invert_clock(const ClockTable& table, double t) {
    if (t < 0.0) throw Error("invert_clock: t must be non-negative");
    if (t >= table.total()) throw HorizonExhausted("invert_clock: t beyond the accumulated clock");
    const auto k = static_cast<std::size_t>(std::upper_bound(table.a.begin(), table.a.end(), t) - table.a.begin()) - 1;
    const double u = segment_invert(table.alpha, table.xi0[k], table.slope[k], t - table.a[k]);
    return std::min(table.s[k] + u, table.s[k + 1]);
}

RssmpPath map_to_rssmp(double x, const MapPath& path, double alpha, const std::vector<double>& t_grid,
                       const MapSpec* spec, double tol) {
    if (x == 0.0) throw Error("map_to_rssmp: start must be nonzero");
    const ClockTable table = build_clock(path, alpha);
    const double scale = std::pow(std::fabs(x), alpha);
    RssmpPath out;
    out.start = x;
    out.alpha = alpha;
    out.killed = table.killed;
    if (table.killed) {
        out.t0 = scale * table.total();
    } else if (spec) {
        const TailBound b = TailBound::for_spec(*spec, alpha);
        const double level = std::exp(alpha * path.final_xi());
        if (level * b.bound <= tol * table.total()) {
            const double tail = b.finite_mean ? level * b.mean_tail[index_of(path.final_phase())] : 0.0;
            out.t0 = scale * (table.total() + tail);
        }
    }
    out.truncated = !out.t0.has_value();
    for (double t : t_grid) {
        const double r = t / scale;
        if (r >= table.total()) {
            if (out.truncated) throw HorizonExhausted("map_to_rssmp: grid time beyond the simulated clock");
            continue;
        }
        const double s = invert_clock(table, r);
        const auto k = std::min(static_cast<std::size_t>(std::upper_bound(table.s.begin(), table.s.end(), s) -
                                                         table.s.begin()) - 1,
                                table.xi0.size() - 1);
        const double xi = table.xi0[k] + table.slope[k] * (s - table.s[k]);
        out.t.push_back(t);
        out.x.push_back(sign_of(table.phase[k]) * std::fabs(x) * std::exp(xi));
    }
    return out;
}

std::vector<double> hitting_time_T0(double x, const MapSpec& spec, double alpha, const IConfig& cfg) {
    if (x == 0.0) throw Error("hitting_time_T0: start must be nonzero");
    try {
        require_finite_I(spec, "hitting_time_T0");
    } catch (const NotFinite& e) {
        throw NotAbsorbed(e.what());
    }
    std::vector<double> out = sample_I(spec, alpha, phase_of(x), cfg);
    const double scale = std::pow(std::fabs(x), alpha);
    for (double& v : out) v *= scale;
    return out;
}

// =============================================================================
// Semigroup checks
// =============================================================================

std::optional<double> rssmp_value_at(const MapSpec& spec, double alpha, RandomStream& rng, double x, double t,
                                     const TailRule& rule, const TailBound& bound, double substep) {
    const double scale = std::pow(std::fabs(x), alpha);
    const double target = t / scale;
    if (t == 0.0) return x;
    std::optional<double> value;
    walk_clock(spec, alpha, rng, 0.0, phase_of(x), rule, bound,
               [&](const ClockSegment& c) {
                   if (c.a0 + c.da < target) return true;
                   const double u = segment_invert(alpha, c.xi0, c.slope, target - c.a0);
                   value = sign_of(c.phase) * std::fabs(x) * std::exp(c.xi_at(std::min(u, c.ds)));
                   return false;
               },
               substep);
    return value;
}

std::vector<InvariantPoint> invariant_function_check(const MapSpec& spec, double alpha, double theta,
                                                     const Vec2& v_theta,
                                                     const std::vector<std::pair<double, double>>& x_t,
                                                     const IConfig& cfg) {
    const TailBound bound = TailBound::for_spec(spec, alpha);
    const auto h = [&](double y) { return std::pow(std::fabs(y), theta) * v_theta[index_of(phase_of(y))]; };
    std::vector<InvariantPoint> out;
    for (std::size_t p = 0; p < x_t.size(); ++p) {
        const auto [x, t] = x_t[p];
        const std::uint64_t seed = derive_seed(cfg.seed, p);
        std::vector<double> vals(cfg.n);
        parallel_for(cfg.n, cfg.workers, [&](std::size_t k) {
            RandomStream rng(seed, path_stream(streams::kPath, k));
            const auto y = rssmp_value_at(spec, alpha, rng, x, t, cfg.tail, bound, cfg.substep);
            vals[k] = y ? h(*y) : 0.0;
        });
        out.push_back({x, t, h(x), mean_estimate(vals)});
    }
    return out;
}

double discounted_occupation(const MapSpec& spec, double alpha, double q, double x, const IntervalIndicator& g,
                             RandomStream& rng, const TailRule& rule, const TailBound& bound, double substep) {
    const double scale = std::pow(std::fabs(x), alpha);
    const Phase side = phase_of(g.lo);
    const double l1 = std::log(std::min(std::fabs(g.lo), std::fabs(g.hi)) / std::fabs(x));
    const double l2 = std::log(std::max(std::fabs(g.lo), std::fabs(g.hi)) / std::fabs(x));
    double total = 0.0;
    const auto clock_at = [&](const ClockSegment& c, double u) {
        return c.a0 + segment_integral(alpha, c.xi0, c.slope, u);
    };
    walk_clock(spec, alpha, rng, 0.0, phase_of(x), rule, bound,
               [&](const ClockSegment& c) {
                   if (c.phase == side) {
                       double u1, u2;
                       if (c.slope == 0.0) {
                           u1 = 0.0;
                           u2 = (c.xi0 >= l1 && c.xi0 <= l2) ? c.ds : 0.0;
                       } else {
                           u1 = (l1 - c.xi0) / c.slope;
                           u2 = (l2 - c.xi0) / c.slope;
                           if (u1 > u2) std::swap(u1, u2);
                           u1 = std::max(u1, 0.0);
                           u2 = std::min(u2, c.ds);
                       }
                       if (u2 > u1) {
                           const double a1 = clock_at(c, u1), a2 = clock_at(c, u2);
                           if (q > 0.0)
                               total += std::exp(-q * scale * a1) * -std::expm1(-q * scale * (a2 - a1)) / q;
                           else
                               total += scale * (a2 - a1);
                       }
                   }
                   return !(q > 0.0 && q * scale * (c.a0 + c.da) > kDiscountCutoff);
               },
               substep);
    return total;
}

DualityReport resolvent_duality_check(const MapSpec& spec, double alpha, double q, const IntervalIndicator& f,
                                      const IntervalIndicator& g, const IConfig& cfg) {
    for (const auto* ind : {&f, &g})
        if (!(ind->lo < ind->hi) || (ind->lo <= 0.0 && ind->hi >= 0.0))
            throw Error("resolvent_duality_check: supports must be intervals avoiding 0");
    if (q < 0.0) throw Error("resolvent_duality_check: q must be non-negative");
    const MapSpec dual = dual_spec(spec);
    const Vec2 pi = stationary_distribution(spec.rates);

    const auto side = [&](const MapSpec& s, const IntervalIndicator& from, const IntervalIndicator& to,
                          std::uint64_t seed) {
        const TailBound bound = TailBound::for_spec(s, alpha);
        std::vector<double> vals(cfg.n);
        parallel_for(cfg.n, cfg.workers, [&](std::size_t k) {
            RandomStream aux(seed, streams::kStart + k);
            const double x = from.lo + from.length() * aux.uniform();
            const double w = from.length() * std::pow(std::fabs(x), alpha - 1.0) * pi[index_of(phase_of(x))];
            RandomStream rng(seed, path_stream(streams::kPath, k));
            vals[k] = w * discounted_occupation(s, alpha, q, x, to, rng, cfg.tail, bound, cfg.substep);
        });
        return mean_estimate(vals);
    };
    return {side(spec, f, g, derive_seed(cfg.seed, 0)), side(dual, g, f, derive_seed(cfg.seed, 1))};
}

}  // namespace maplk
