#pragma once

#include <optional>
#include <vector>

#include "maplk/exp_functional.hpp"
#include "maplk/map_sim.hpp"
#include "maplk/map_spec.hpp"
#include "maplk/stats.hpp"

namespace maplk {

/// A(s) = ∫_0^s e^{alpha xi(u)} du over a simulated MapPath, piecewise exact
/// for the linear pieces of the event skeleton.
struct ClockTable {
    double alpha = 0.0;
    std::vector<double> s;       // breakpoints
    std::vector<double> a;       // A(s_k)
    std::vector<double> xi0;     // xi at the start of piece k
    std::vector<double> slope;   // slope of piece k
    std::vector<Phase> phase;    // phase on piece k
    bool killed = false;

    double total() const { return a.back(); }
    /// A(u) for u within the path horizon.
    double at(double u) const;
};

ClockTable build_clock(const MapPath& path, double alpha);

/// tau(t) = inf{s : A(s) >= t}; throws HorizonExhausted for t >= A(horizon).
double invert_clock(const ClockTable& table, double t);

struct RssmpPath {
    std::vector<double> t;
    std::vector<double> x;
    /// T0 when resolved; nullopt when the horizon ended before absorption (truncated).
    std::optional<double> t0;
    bool truncated = false;
    bool killed = false;
    double start = 0.0;
    double alpha = 0.0;
};

/// X_t = x e^{xi(tau(|x|^{-alpha} t))} J(tau(|x|^{-alpha} t)) on the grid points before T0.
/// With a spec the tail rule (tol) decides absorption at the horizon; without, only killing does.
RssmpPath map_to_rssmp(double x, const MapPath& path, double alpha, const std::vector<double>& t_grid,
                       const MapSpec* spec = nullptr, double tol = 1e-6);

/// Samples of T0 under P_x, i.e. |x|^alpha I.
std::vector<double> hitting_time_T0(double x, const MapSpec& spec, double alpha, const IConfig& cfg);

/// Value of the rssMp at time t from x: nullopt once absorbed or killed.
std::optional<double> rssmp_value_at(const MapSpec& spec, double alpha, RandomStream& rng, double x, double t,
                                     const TailRule& rule, const TailBound& bound, double substep = 1e-3);

struct InvariantPoint {
    double x, t;
    double h;
    Estimate estimate;
    double z() const { return z_score(estimate.value, estimate.se, h); }
};

/// E_x[h(X_t); t < T0] against h(x) = |x|^theta v_[x].
std::vector<InvariantPoint> invariant_function_check(const MapSpec& spec, double alpha, double theta,
                                                     const Vec2& v_theta,
                                                     const std::vector<std::pair<double, double>>& x_t,
                                                     const IConfig& cfg);

/// Indicator of the interval [lo, hi], which must not contain 0.
struct IntervalIndicator {
    double lo, hi;
    double length() const { return hi - lo; }
};

struct DualityReport {
    Estimate lhs;  // ∫ f V^q g dmu
    Estimate rhs;  // ∫ g V̂^q f dmu
    double z() const { return z_score(lhs, rhs); }
};

/// Weak duality of the q-resolvents with respect to mu(dx) = |x|^{alpha-1} pi_[x] dx.
DualityReport resolvent_duality_check(const MapSpec& spec, double alpha, double q, const IntervalIndicator& f,
                                      const IntervalIndicator& g, const IConfig& cfg);

/// E_x ∫_0^{T0} e^{-qt} g(X_t) dt along one path, exact per linear piece.
double discounted_occupation(const MapSpec& spec, double alpha, double q, double x, const IntervalIndicator& g,
                             RandomStream& rng, const TailRule& rule, const TailBound& bound,
                             double substep = 1e-3);

}  // namespace maplk
