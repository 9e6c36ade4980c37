#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "maplk/map_sim.hpp"
#include "maplk/map_spec.hpp"
#include "maplk/rng.hpp"
#include "maplk/stats.hpp"

namespace maplk {

// =============================================================================
// Linear-segment clock primitives
// =============================================================================

/// ∫_0^ds exp(alpha (xi0 + slope u)) du, ds may be infinite.
double segment_integral(double alpha, double xi0, double slope, double ds);
/// Inverse of segment_integral in ds for a target r in [0, total).
double segment_invert(double alpha, double xi0, double slope, double r);

/// Piece of the MAP path in MAP time with its clock increment. ds and da may be infinite.
struct ClockSegment {
    double s0, ds;
    double xi0, slope;
    Phase phase;
    double a0, da;
    double xi_at(double u) const { return xi0 + slope * u; }
};

// =============================================================================
// Tail rule
// =============================================================================

struct TailRule {
    double tol = 1e-6;
    double max_time = 1e6;
    std::size_t max_segments = 100'000'000;
};

/// E_{0,i}[∫_0^∞ e^{alpha xi}] = ((-F(alpha))^{-1} 1)_i when kappa(alpha) < 0.
struct TailBound {
    double alpha = 0.0;
    bool finite_mean = false;
    Vec2 mean_tail{1.0, 1.0};
    double bound = 1.0;
    static TailBound for_spec(const MapSpec& spec, double alpha);
};

enum class WalkEnd { tail, kill, closed_form, visitor };

struct WalkResult {
    double clock;      // ∫ e^{alpha xi} accumulated over the walked segments
    double tail_mean;  // expected remainder added at a tail stop (0 otherwise)
    WalkEnd end;
    double time;
    double xi;
    Phase phase;
    double total() const { return clock + tail_mean; }
};

using SegmentVisitor = std::function<bool(const ClockSegment&)>;

/// Walks the MAP from (xi0, start), feeding every linear piece to the visitor, until the
/// residual tail is below tol relative, the path is killed, xi becomes deterministic, or the
/// visitor returns false. Throws HorizonExhausted on budget overrun and NotFinite when xi
/// becomes deterministic with a divergent integral.
WalkResult walk_clock(const MapSpec& spec, double alpha, RandomStream& rng, double xi0, Phase start,
                      const TailRule& rule, const TailBound& bound, const SegmentVisitor& visitor = {},
                      double substep = 1e-3);

// =============================================================================
// Exponential functional
// =============================================================================

/// Throws NotFinite unless the spec is killed or kappa'(0) < 0.
void require_finite_I(const MapSpec& spec, const char* where);

/// One sample of I = ∫_0^∞ e^{alpha xi(t)} dt started from (0, start).
double simulate_I(const MapSpec& spec, double alpha, double tol, std::uint64_t seed, Phase start = Phase::plus);

struct IConfig {
    std::size_t n = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    TailRule tail;
    double substep = 1e-3;
};

/// n independent samples of I from phase `start`; path k uses path_stream(kPath, k, index_of(start)).
std::vector<double> sample_I(const MapSpec& spec, double alpha, Phase start, const IConfig& cfg);

/// Mean of x^p with its SE.
Estimate power_moment(const std::vector<double>& xs, double p);

struct MomentEstimate {
    double s = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    /// |m(H_K) - m(H_{K-1})| / m(H_{K-1}) for the last horizon doubling.
    double truncation_diagnostic = 0.0;
    bool divergent = false;
    std::optional<double> kappa_alpha_s;
    std::vector<double> horizons;
    std::vector<double> sweep;
};

struct MomentConfig {
    IConfig sampling;
    double base_horizon = 25.0;
    int doublings = 4;
    double drift_threshold = 0.01;
};

/// E_{0,start}[I^s] from integrals truncated at base_horizon * 2^k, k = 0..doublings.
MomentEstimate moment_I(const MapSpec& spec, double alpha, double s, Phase start, const MomentConfig& cfg);

/// Ê♯_{0,i}[I^{theta/alpha - 1}] under dual_spec(esscher_tilt(spec, theta)), i = +1, -1.
std::array<MomentEstimate, 2> tilted_dual_moment(const MapSpec& spec, double alpha, double theta,
                                                 const IConfig& cfg);

/// The MAP whose exponential functional enters the entrance law: dual of the theta-tilt.
MapSpec tilted_dual_spec(const MapSpec& spec, double theta);

}  // namespace maplk
