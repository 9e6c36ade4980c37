#include "maplk/recurrent_extension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "maplk/errors.hpp"
#include "maplk/map_core.hpp"
#include "maplk/parallel.hpp"
#include "maplk/special.hpp"

namespace maplk {

namespace {

void require_theta(double alpha, double theta) {
    if (!(theta > 0.0 && theta < alpha))
        throw NoCramerNumber("continuous extension needs a Cramér number theta in (0, alpha)");
}

IConfig reseeded(const IConfig& cfg, std::uint64_t tag, std::size_t n) {
    IConfig c = cfg;
    c.seed = derive_seed(cfg.seed, tag);
    c.n = n;
    return c;
}

std::array<Estimate, 2> phase_moments(const MapSpec& spec, double alpha, double p, const IConfig& cfg,
                                      std::uint64_t tag) {
    std::array<Estimate, 2> out;
    for (int i = 0; i < 2; ++i) {
        const auto xs = sample_I(spec, alpha, phase_at(i), reseeded(cfg, tag + static_cast<std::uint64_t>(i), cfg.n));
        out[static_cast<std::size_t>(i)] = power_moment(xs, p);
    }
    return out;
}

Estimate weighted_sum(const std::array<Estimate, 2>& m, const Vec2& w) {
    return {w[0] * m[0].value + w[1] * m[1].value, std::hypot(w[0] * m[0].se, w[1] * m[1].se), m[0].n + m[1].n};
}

void require_negative_kappa(const MapSpec& spec, double beta) {
    if (!(kappa(spec, beta) < 0.0))
        throw KappaNonNegative("jump extension needs kappa(beta) < 0");
}

// two-sided exponential on the real line: rate `left` below 0, `right` above
struct TwoSidedProposal {
    double left, right;
    double norm() const { return 1.0 / (1.0 / left + 1.0 / right); }
    double draw(RandomStream& rng) const {
        const double p_left = (1.0 / left) / (1.0 / left + 1.0 / right);
        if (rng.uniform() < p_left) return std::log(rng.uniform()) / left;
        return -std::log(rng.uniform()) / right;
    }
    double density(double u) const { return norm() * (u < 0.0 ? std::exp(left * u) : std::exp(-right * u)); }
};

}  // namespace

// =============================================================================
// Entrance law
// =============================================================================

Vec2 duality_weights(const MapSpec& spec, double theta) {
    const Vec2 v = perron_pair(spec, theta).v;
    const Vec2 sharp = stationary_distribution(esscher_tilt(spec, theta).rates);
    const Vec2 w{sharp[0] / v[0], sharp[1] / v[1]};
    return {w[0] / (w[0] + w[1]), w[1] / (w[0] + w[1])};
}

EntranceConstant entrance_constant(const MapSpec& spec, double alpha, double theta, const IConfig& cfg) {
    require_theta(alpha, theta);
    EntranceConstant out;
    out.gamma = theta / alpha;
    out.v = perron_pair(spec, theta).v;
    out.pi = stationary_distribution(spec.rates);
    out.weight = duality_weights(spec, theta);
    out.sharp = tilted_dual_moment(spec, alpha, theta, cfg);
    const double g = special::gamma(1.0 - out.gamma);
    const Vec2& w = out.weight;
    out.c.value = g * (w[0] * out.sharp[0].value + w[1] * out.sharp[1].value);
    out.c.se = g * std::hypot(w[0] * out.sharp[0].std_error, w[1] * out.sharp[1].std_error);
    out.c.n = out.sharp[0].n + out.sharp[1].n;
    out.ill_conditioned = out.gamma > 0.95;
    return out;
}

EntrancePool build_entrance_pool(const MapSpec& spec, double alpha, double theta, std::size_t per_phase,
                                 const IConfig& cfg) {
    require_theta(alpha, theta);
    if (per_phase == 0) throw Error("build_entrance_pool: empty pool");
    const MapSpec sharp = tilted_dual_spec(spec, theta);
    const Vec2 w = duality_weights(spec, theta);
    EntrancePool pool;
    pool.alpha = alpha;
    pool.theta = theta;
    pool.gamma = theta / alpha;
    for (int i = 0; i < 2; ++i) {
        const auto xs = sample_I(sharp, alpha, phase_at(i), reseeded(cfg, static_cast<std::uint64_t>(i), per_phase));
        for (double x : xs) {
            pool.I.push_back(x);
            pool.phase.push_back(phase_at(i));
            pool.weight.push_back(w[static_cast<std::size_t>(i)] * std::pow(x, pool.gamma - 1.0) /
                                  static_cast<double>(per_phase));
        }
    }
    const double total = std::accumulate(pool.weight.begin(), pool.weight.end(), 0.0);
    double sq = 0.0;
    for (std::size_t k = 0; k < pool.weight.size(); ++k) {
        pool.weight[k] /= total;
        sq += pool.weight[k] * pool.weight[k];
        pool.phase_mass[static_cast<std::size_t>(index_of(pool.phase[k]))] += pool.weight[k];
    }
    pool.ess = 1.0 / sq;
    if (pool.ess < 0.1 * static_cast<double>(pool.weight.size()))
        throw PilotPoolTooSmall("entrance pool: effective sample size below 10% of the pool");
    return pool;
}

double entrance_position(const EntrancePool& pool, std::size_t k, double t) {
    return sign_of(pool.phase[k]) * std::pow(t / pool.I[k], 1.0 / pool.alpha);
}

std::vector<std::size_t> resample_pool(const EntrancePool& pool, std::size_t n, RandomStream& rng) {
    std::vector<double> cum(pool.weight.size());
    std::partial_sum(pool.weight.begin(), pool.weight.end(), cum.begin());
    std::vector<std::size_t> out(n);
    for (auto& k : out) {
        const double u = rng.uniform() * cum.back();
        k = std::min(static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()),
                     cum.size() - 1);
    }
    return out;
}

std::vector<EntranceLawSample> sample_entrance_law(const MapSpec& spec, double alpha, double theta, double t,
                                                   std::size_t n, std::uint64_t seed, int workers) {
    if (!(t > 0.0)) throw Error("sample_entrance_law: t must be positive");
    IConfig cfg;
    cfg.seed = seed;
    cfg.workers = workers;
    const EntrancePool pool = build_entrance_pool(spec, alpha, theta, 5 * n, cfg);
    RandomStream rng(seed, streams::kResample);
    std::vector<EntranceLawSample> out;
    out.reserve(n);
    for (std::size_t k : resample_pool(pool, n, rng))
        out.push_back({t, entrance_position(pool, k, t), 1.0 / static_cast<double>(n)});
    return out;
}

double entrance_mass(double gamma, double t) { return std::pow(t, -gamma) * special::rgamma(1.0 - gamma); }

NormalizationReport excursion_normalization(const MapSpec& spec, double alpha, double theta, const IConfig& cfg) {
    require_theta(alpha, theta);
    const double p = theta / alpha - 1.0;
    const Vec2 w = duality_weights(spec, theta);
    NormalizationReport r;
    r.original = phase_moments(spec, alpha, p, cfg, 10);
    r.sharp = phase_moments(tilted_dual_spec(spec, theta), alpha, p, cfg, 20);
    const Estimate num = weighted_sum(r.original, w), den = weighted_sum(r.sharp, w);
    r.mass.value = num.value / den.value;
    r.mass.se = r.mass.value * std::hypot(num.se / num.value, den.se / den.value);
    r.mass.n = num.n + den.n;
    return r;
}

std::vector<ScalingRow> excursion_scaling_check(const std::vector<EntranceLawSample>& at_t,
                                                const std::vector<EntranceLawSample>& at_ct, double alpha,
                                                double gamma, double c) {
    (void)alpha;
    (void)gamma;
    struct Fn {
        const char* name;
        double (*f)(double);
    };
    static const Fn dict[] = {
        {"one", [](double) { return 1.0; }},
        {"sign", [](double x) { return x > 0.0 ? 1.0 : -1.0; }},
        {"indicator_1_2", [](double x) { return std::fabs(x) >= 1.0 && std::fabs(x) <= 2.0 ? 1.0 : 0.0; }},
        {"positive_below_1", [](double x) { return x > 0.0 && x < 1.0 ? 1.0 : 0.0; }},
        {"min_abs_2", [](double x) { return std::min(std::fabs(x), 2.0); }},
        {"abs_squared_capped", [](double x) { return std::min(x * x, 4.0); }},
    };
    std::vector<ScalingRow> out;
    for (const Fn& fn : dict) {
        std::vector<double> l, r;
        for (const auto& s : at_ct) l.push_back(fn.f(s.x));
        for (const auto& s : at_t) r.push_back(fn.f(c * s.x));
        out.push_back({fn.name, mean_estimate(l), mean_estimate(r)});
    }
    return out;
}

// =============================================================================
// Jump exit
// =============================================================================

JumpInReport jump_in_constants(const MapSpec& spec, double alpha, double beta, double b_plus, double b_minus,
                               const IConfig& cfg) {
    if (!(beta > 0.0 && beta < alpha)) throw Error("jump_in_constants: beta must lie in (0, alpha)");
    if (b_plus < 0.0 || b_minus < 0.0 || b_plus + b_minus == 0.0)
        throw Error("jump_in_constants: need b+, b- >= 0, not both zero");
    require_negative_kappa(spec, beta);
    const double p = beta / alpha;
    JumpInReport r;
    r.target = beta * special::rgamma(1.0 - p);
    r.moments_a = phase_moments(spec, alpha, p, cfg, 30);
    r.moments_b = phase_moments(spec, alpha, p, cfg, 40);
    const Vec2 b0{b_plus, b_minus};
    const Estimate la = weighted_sum(r.moments_a, b0), lb = weighted_sum(r.moments_b, b0);
    const double scale = r.target / la.value;
    r.measure = {beta, scale * b_plus, scale * b_minus};
    r.residual.value = scale * lb.value - r.target;
    r.residual.se = r.target * std::hypot(lb.se, lb.value / la.value * la.se) / la.value;
    r.residual.n = la.n + lb.n;
    return r;
}

JumpIntegralReport jump_integral_check(const MapSpec& spec, double alpha, const JumpInMeasure& eta,
                                       const IConfig& cfg) {
    const double beta = eta.beta, p = beta / alpha;
    require_negative_kappa(spec, beta);
    const Vec2 b{eta.b_plus, eta.b_minus};
    JumpIntegralReport r;
    const Estimate m = weighted_sum(phase_moments(spec, alpha, p, cfg, 50), b);
    const double k = special::gamma(1.0 - p) / beta;
    r.formula = {k * m.value, k * m.se, m.n};

    const TwoSidedProposal prop{alpha - beta, beta};
    r.direct = {0.0, 0.0, 0};
    for (int i = 0; i < 2; ++i) {
        const auto xs = sample_I(spec, alpha, phase_at(i), reseeded(cfg, 60 + static_cast<std::uint64_t>(i), cfg.n));
        RandomStream rng(derive_seed(cfg.seed, 70 + static_cast<std::uint64_t>(i)), streams::kAux);
        std::vector<double> vals(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double u = prop.draw(rng);
            vals[j] = b[static_cast<std::size_t>(i)] * -std::expm1(-std::exp(alpha * u) * xs[j]) *
                      std::exp(-beta * u) / prop.density(u);
        }
        const Estimate e = mean_estimate(vals);
        r.direct.value += e.value;
        r.direct.se = std::hypot(r.direct.se, e.se);
        r.direct.n += e.n;
    }
    return r;
}

// =============================================================================
// Extensions
// =============================================================================

double mode_gamma(const ExtensionMode& mode, double alpha) {
    if (const auto* c = std::get_if<ContinuousMode>(&mode)) return c->theta / alpha;
    return std::get<JumpMode>(mode).eta.beta / alpha;
}

bool ExtensionPath::in_excursion(double t) const {
    auto it = std::upper_bound(excursions.begin(), excursions.end(), t,
                               [](double v, const Excursion& e) { return v < e.start; });
    if (it == excursions.begin()) return false;
    --it;
    return t > it->start && t < it->start + it->length;
}

ExtensionPath build_extension(const MapSpec& spec, double alpha, const ExtensionMode& mode, double T,
                              double epsilon, const ExtensionConfig& cfg) {
    if (!(T > 0.0) || !(epsilon > 0.0)) throw Error("build_extension: need T > 0 and epsilon > 0");
    ExtensionPath path;
    path.epsilon = epsilon;
    path.gamma = mode_gamma(mode, alpha);
    const IConfig& sc = cfg.sampling;
    RandomStream pick(sc.seed, streams::kResample);
    const TailBound bound = TailBound::for_spec(spec, alpha);
    double now = 0.0;

    if (const auto* c = std::get_if<ContinuousMode>(&mode)) {
        path.continuous = true;
        const EntrancePool pool = build_entrance_pool(spec, alpha, c->theta, sc.n, sc);
        const double t0 = epsilon / 100.0;
        std::size_t attempt = 0;
        while (now < T) {
            if (path.excursions.size() >= cfg.max_excursions || attempt > 100 * cfg.max_excursions)
                throw HorizonExhausted("build_extension: excursion budget exhausted");
            const std::size_t k = resample_pool(pool, 1, pick)[0];
            const double x = entrance_position(pool, k, t0);
            RandomStream rng(sc.seed, path_stream(streams::kAux, attempt++));
            const double i = walk_clock(spec, alpha, rng, 0.0, phase_of(x), sc.tail, bound, {}, sc.substep).total();
            const double length = t0 + std::pow(std::fabs(x), alpha) * i;
            if (length <= epsilon) continue;
            path.excursions.push_back({now, length, x, t0});
            now += length;
        }
        path.discarded_mass = static_cast<double>(path.excursions.size()) * epsilon * path.gamma / (1.0 - path.gamma);
    } else {
        path.continuous = false;
        const JumpInMeasure& eta = std::get<JumpMode>(mode).eta;
        require_negative_kappa(spec, eta.beta);
        const double p = eta.beta / alpha;
        // pool of original paths weighted by b_i I^{beta/alpha}
        EntrancePool pool;
        pool.alpha = alpha;
        for (int i = 0; i < 2; ++i) {
            const auto xs = sample_I(spec, alpha, phase_at(i), reseeded(sc, 80 + static_cast<std::uint64_t>(i), sc.n));
            for (double x : xs) {
                pool.I.push_back(x);
                pool.phase.push_back(phase_at(i));
                pool.weight.push_back(eta.b(phase_at(i)) * std::pow(x, p));
            }
        }
        const double total = std::accumulate(pool.weight.begin(), pool.weight.end(), 0.0);
        for (double& w : pool.weight) w /= total;
        while (now < T) {
            if (path.excursions.size() >= cfg.max_excursions)
                throw HorizonExhausted("build_extension: excursion budget exhausted");
            const std::size_t k = resample_pool(pool, 1, pick)[0];
            const double r = std::pow(epsilon / pool.I[k], 1.0 / alpha) * std::pow(pick.uniform(), -1.0 / eta.beta);
            const double x = sign_of(pool.phase[k]) * r;
            const double length = std::pow(r, alpha) * pool.I[k];
            path.excursions.push_back({now, length, x, 0.0});
            now += length;
        }
    }
    path.total_time = now;
    return path;
}

std::string extension_to_csv(const ExtensionPath& path) {
    std::string out = "start,length,entry_x,entry_t\n";
    char buf[128];
    for (const auto& e : path.excursions) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", e.start, e.length, e.entry_x, e.entry_t);
        out += buf;
    }
    return out;
}

// =============================================================================
// Sojourn measure
// =============================================================================

namespace {

struct SojournAccumulator {
    // [group][side][bin]
    std::vector<std::array<std::vector<double>, 2>> mass;
    std::vector<double> denom;
};

// slope shared by both sides, side-specific intercepts
double pooled_slope(const std::array<std::vector<double>, 2>& mass, const std::vector<double>& edges) {
    double sxy = 0.0, sxx = 0.0;
    for (int s = 0; s < 2; ++s) {
        std::vector<double> x, y;
        for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
            const double m = mass[static_cast<std::size_t>(s)][j];
            if (!(m > 0.0)) throw NotFinite("sojourn fit: empty bin");
            x.push_back(0.5 * (std::log(edges[j]) + std::log(edges[j + 1])));
            y.push_back(std::log(m / (edges[j + 1] - edges[j])));
        }
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            sxy += (x[j] - mx) * (y[j] - my);
            sxx += (x[j] - mx) * (x[j] - mx);
        }
    }
    return sxy / sxx;
}

double power_integral(double a, double b, double p) {
    return std::fabs(p + 1.0) < 1e-12 ? std::log(b / a) : (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

}  // namespace

SojournReport sojourn_constants(const MapSpec& spec, double alpha, const ExtensionMode& mode,
                                const SojournConfig& cfg) {
    if (!(cfg.y_lo > 0.0 && cfg.y_hi > cfg.y_lo) || cfg.bins < 2 || cfg.groups < 2)
        throw Error("sojourn_constants: bad bin or group configuration");
    SojournReport rep;
    rep.gamma = mode_gamma(mode, alpha);
    rep.expected_slope = alpha - 1.0 - rep.gamma * alpha;
    const auto nb = static_cast<std::size_t>(cfg.bins);
    for (std::size_t j = 0; j <= nb; ++j)
        rep.bin_edges.push_back(cfg.y_lo * std::pow(cfg.y_hi / cfg.y_lo, static_cast<double>(j) / cfg.bins));
    const auto& edges = rep.bin_edges;
    const IConfig& sc = cfg.sampling;
    const TailBound bound = TailBound::for_spec(spec, alpha);

    const auto cr = cramer_number(spec, alpha);
    const double reach = cr.theta ? *cr.theta : alpha;

    // excursion starts: position, numerator weight, denominator weight; occupation before t0
    std::vector<double> start_x, num_w, den_w, head;
    if (const auto* c = std::get_if<ContinuousMode>(&mode)) {
        const EntrancePool pool = build_entrance_pool(spec, alpha, c->theta, sc.n, sc);
        const double m = entrance_mass(rep.gamma, cfg.t0);
        const double g = 1.0 - rep.gamma;
        head.assign(pool.I.size() * 2 * nb, 0.0);
        for (std::size_t k = 0; k < pool.I.size(); ++k) {
            start_x.push_back(entrance_position(pool, k, cfg.t0));
            num_w.push_back(m * pool.weight[k]);
            den_w.push_back(pool.weight[k]);
            // on [0, t0] the excursion sits at (t/I)^{1/alpha}, with mass t^{-gamma}/Gamma(1-gamma)
            const std::size_t side = static_cast<std::size_t>(index_of(pool.phase[k]));
            for (std::size_t j = 0; j < nb; ++j) {
                const double t1 = std::min(pool.I[k] * std::pow(edges[j], alpha), cfg.t0);
                const double t2 = std::min(pool.I[k] * std::pow(edges[j + 1], alpha), cfg.t0);
                head[k * 2 * nb + side * nb + j] =
                    (std::pow(t2, g) - std::pow(t1, g)) / g * special::rgamma(g) / m;
            }
        }
    } else {
        const JumpInMeasure& eta = std::get<JumpMode>(mode).eta;
        require_negative_kappa(spec, eta.beta);
        // reaching the bins from |x| -> 0 has probability ~ |x|^reach; the second moment is finite
        // only for a left rate below reach - 2 beta
        rep.infinite_variance = !(reach > 2.0 * eta.beta);
        const double left = rep.infinite_variance ? 0.5 * (reach - eta.beta) : 0.5 * (reach - 2.0 * eta.beta);
        const TwoSidedProposal prop{left, 0.5 * eta.beta};
        const double centre = 0.5 * (std::log(cfg.y_lo) + std::log(cfg.y_hi));
        RandomStream rng(derive_seed(sc.seed, 90), streams::kAux);
        for (std::size_t k = 0; k < 2 * sc.n; ++k) {
            const Phase side = phase_at(static_cast<int>(k % 2));
            const double u = prop.draw(rng);
            start_x.push_back(sign_of(side) * std::exp(centre + u));
            num_w.push_back(eta.b(side) * std::exp(-eta.beta * (centre + u)) / prop.density(u));
            den_w.push_back(0.5);
        }
    }

    const std::size_t n = start_x.size();
    std::vector<double> occ = head.empty() ? std::vector<double>(n * 2 * nb, 0.0) : head;
    const std::vector<double> log_edges = [&] {
        std::vector<double> l;
        for (double e : edges) l.push_back(std::log(e));
        return l;
    }();
    // A walk ends once it lies below the bins and the chance of climbing back, about
    // (|X| / y_lo)^min(reach, alpha), is under the tail tolerance.
    TailRule rule = sc.tail;
    const double log_tol = std::log(rule.tol);
    const double exit_rate = std::min(reach, alpha);
    rule.tol = 0.0;
    parallel_for(n, sc.workers, [&](std::size_t k) {
        const double x = start_x[k];
        const double ax = std::fabs(x), scale = std::pow(ax, alpha), lx = std::log(ax);
        double* row = &occ[k * 2 * nb];
        RandomStream rng(derive_seed(sc.seed, 91), path_stream(streams::kPath, k));
        walk_clock(spec, alpha, rng, 0.0, phase_of(x), rule, bound,
                   [&](const ClockSegment& c) {
                       const double end = lx + c.xi_at(c.ds);
                       const bool done = end < log_edges.front() && exit_rate * (end - log_edges.front()) <= log_tol;
                       const double lo_xi = c.slope >= 0.0 ? c.xi0 : c.xi_at(c.ds);
                       const double hi_xi = c.slope >= 0.0 ? c.xi_at(c.ds) : c.xi0;
                       if (hi_xi + lx < log_edges.front() || lo_xi + lx > log_edges.back()) return !done;
                       const std::size_t side = static_cast<std::size_t>(index_of(c.phase));
                       for (std::size_t j = 0; j < nb; ++j) {
                           const double l1 = log_edges[j] - lx, l2 = log_edges[j + 1] - lx;
                           double u1, u2;
                           if (c.slope == 0.0) {
                               if (c.xi0 < l1 || c.xi0 >= l2) continue;
                               u1 = 0.0;
                               u2 = c.ds;
                           } else {
                               u1 = (l1 - c.xi0) / c.slope;
                               u2 = (l2 - c.xi0) / c.slope;
                               if (u1 > u2) std::swap(u1, u2);
                               u1 = std::max(u1, 0.0);
                               u2 = std::min(u2, c.ds);
                               if (!(u2 > u1)) continue;
                           }
                           const double da = segment_integral(alpha, c.xi_at(u1), c.slope, u2 - u1);
                           row[side * nb + j] += scale * da;
                       }
                       return !done;
                   },
                   sc.substep);
    });

    const auto g_count = static_cast<std::size_t>(cfg.groups);
    std::vector<std::array<std::vector<double>, 2>> gmass(g_count, {std::vector<double>(nb, 0.0), std::vector<double>(nb, 0.0)});
    std::vector<double> gden(g_count, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t g = k % g_count;
        gden[g] += den_w[k];
        for (std::size_t s = 0; s < 2; ++s)
            for (std::size_t j = 0; j < nb; ++j) gmass[g][s][j] += num_w[k] * occ[k * 2 * nb + s * nb + j];
    }

    const double p = rep.expected_slope;
    std::vector<double> ref(nb);
    for (std::size_t j = 0; j < nb; ++j) ref[j] = power_integral(edges[j], edges[j + 1], p);
    const double ref_sum = std::accumulate(ref.begin(), ref.end(), 0.0);
    rep.moments = phase_moments(spec, alpha, rep.gamma - 1.0, sc, 100);
    const double target = alpha * special::rgamma(1.0 - rep.gamma);

    struct Fit {
        double slope;
        std::array<double, 2> c;
        double combo;
        std::array<std::vector<double>, 2> mass;
    };
    const auto fit = [&](std::size_t skip) {
        Fit f;
        f.mass = {std::vector<double>(nb, 0.0), std::vector<double>(nb, 0.0)};
        double den = 0.0;
        for (std::size_t g = 0; g < g_count; ++g) {
            if (g == skip) continue;
            den += gden[g];
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t j = 0; j < nb; ++j) f.mass[s][j] += gmass[g][s][j];
        }
        for (auto& side : f.mass)
            for (double& m : side) m /= den;
        f.slope = pooled_slope(f.mass, edges);
        for (std::size_t s = 0; s < 2; ++s)
            f.c[s] = std::accumulate(f.mass[s].begin(), f.mass[s].end(), 0.0) / ref_sum;
        f.combo = f.c[0] * rep.moments[0].value + f.c[1] * rep.moments[1].value;
        return f;
    };

    const Fit full = fit(g_count);
    std::vector<Fit> jk;
    for (std::size_t g = 0; g < g_count; ++g) jk.push_back(fit(g));
    const auto jk_se = [&](auto get) {
        double mean = 0.0;
        for (const auto& f : jk) mean += get(f);
        mean /= static_cast<double>(g_count);
        double ss = 0.0;
        for (const auto& f : jk) ss += (get(f) - mean) * (get(f) - mean);
        return std::sqrt(ss * static_cast<double>(g_count - 1) / static_cast<double>(g_count));
    };
    const double t = student_t_quantile(0.975, static_cast<double>(g_count - 1));
    const double slope_se = jk_se([](const Fit& f) { return f.slope; });
    rep.slope = full.slope;
    rep.slope_lo = full.slope - t * slope_se;
    rep.slope_hi = full.slope + t * slope_se;
    for (std::size_t s = 0; s < 2; ++s) {
        rep.c[s] = {full.c[s], jk_se([s](const Fit& f) { return f.c[s]; }), n};
        rep.density[s].resize(nb);
        for (std::size_t j = 0; j < nb; ++j) rep.density[s][j] = full.mass[s][j] / (edges[j + 1] - edges[j]);
    }
    const double combo_se = jk_se([](const Fit& f) { return f.combo; });
    rep.residual.value = full.combo - target;
    rep.residual.se = std::sqrt(combo_se * combo_se + std::pow(full.c[0] * rep.moments[0].se, 2) +
                                std::pow(full.c[1] * rep.moments[1].se, 2));
    rep.residual.n = n;
    return rep;
}

}  // namespace maplk
