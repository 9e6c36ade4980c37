#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "maplk/exp_functional.hpp"
#include "maplk/map_spec.hpp"
#include "maplk/stats.hpp"

namespace maplk {

// =============================================================================
// Continuous exit: entrance law
// =============================================================================

/// Phase weights of the duality measure |x|^{alpha-1-theta} w_[x] dx between the minimal
/// process and the tilted dual: w_i ∝ pi♯_i / v_i, pi♯ the stationary law of the tilted chain
/// (the left null vector of F(theta)). Normalized to sum 1, so w_i = v_i pi_i whenever
/// G_{1,-1}(theta) = G_{-1,1}(theta).
Vec2 duality_weights(const MapSpec& spec, double theta);

struct EntranceConstant {
    Estimate c;                          // C_{alpha,theta}
    std::array<MomentEstimate, 2> sharp; // Ê♯_{0,i}[I^{gamma-1}]
    Vec2 v, pi;
    Vec2 weight;                         // duality_weights
    double gamma;
    /// theta/alpha > 0.95: Gamma(1 - gamma) is near its pole.
    bool ill_conditioned;
};

EntranceConstant entrance_constant(const MapSpec& spec, double alpha, double theta, const IConfig& cfg);

/// Tilted-dual exponential functionals with their self-normalized weights
/// w_i I^{gamma-1} / n_i.
struct EntrancePool {
    double alpha = 0.0, theta = 0.0, gamma = 0.0;
    std::vector<double> I;
    std::vector<Phase> phase;
    std::vector<double> weight;  // sums to 1
    double ess = 0.0;
    Vec2 phase_mass{};           // total weight per phase
};

/// per_phase samples from each phase; throws PilotPoolTooSmall when ESS < 10% of the pool.
EntrancePool build_entrance_pool(const MapSpec& spec, double alpha, double theta, std::size_t per_phase,
                                 const IConfig& cfg);

struct EntranceLawSample {
    double t;
    double x;
    double weight;
};

/// Position at time t of a point drawn from pool element k.
double entrance_position(const EntrancePool& pool, std::size_t k, double t);

/// n draws from the normalized entrance law n(X_t in ., t < T0) / n(t < T0),
/// resampled from a pilot pool of 5n samples per phase.
std::vector<EntranceLawSample> sample_entrance_law(const MapSpec& spec, double alpha, double theta, double t,
                                                   std::size_t n, std::uint64_t seed, int workers = 1);

/// Multinomial resampling of n pool indices.
std::vector<std::size_t> resample_pool(const EntrancePool& pool, std::size_t n, RandomStream& rng);

/// n(t < T0) = t^{-gamma} / Gamma(1 - gamma) under the normalization n(1 - e^{-T0}) = 1.
double entrance_mass(double gamma, double t);

/// n(1 - e^{-T0}) = sum w_i E_{0,i}[I^{gamma-1}] / sum w_i Ê♯_{0,i}[I^{gamma-1}],
/// the numerator under the original MAP; equals 1.
struct NormalizationReport {
    Estimate mass;
    std::array<Estimate, 2> original;
    std::array<Estimate, 2> sharp;
};

NormalizationReport excursion_normalization(const MapSpec& spec, double alpha, double theta, const IConfig& cfg);

struct ScalingRow {
    std::string name;
    Estimate lhs;  // E_{c^alpha t}[f(X)]
    Estimate rhs;  // E_t[f(cX)]
    double z() const { return z_score(lhs, rhs); }
};

/// Self-similarity of the entrance law between samples at t (small) and c^alpha t (large).
std::vector<ScalingRow> excursion_scaling_check(const std::vector<EntranceLawSample>& at_t,
                                                const std::vector<EntranceLawSample>& at_ct, double alpha,
                                                double gamma, double c);

// =============================================================================
// Jump exit
// =============================================================================

/// eta(dx) = b^{[x]} |x|^{-(1+beta)} dx; no other shape is representable.
struct JumpInMeasure {
    double beta = 0.0;
    double b_plus = 0.0;
    double b_minus = 0.0;
    double b(Phase p) const { return p == Phase::plus ? b_plus : b_minus; }
};

struct JumpInReport {
    JumpInMeasure measure;              // rescaled on batch A
    double target;                      // beta / Gamma(1 - beta/alpha)
    std::array<Estimate, 2> moments_a;  // E_{0,i}[I^{beta/alpha}], batch A
    std::array<Estimate, 2> moments_b;  // independent batch B
    Estimate residual;                  // on batch B, SE combining both batches
};

/// Rescales (b+, b-) so that b+ E_1[I^{beta/alpha}] + b- E_-1[I^{beta/alpha}] = beta / Gamma(1 - beta/alpha).
/// Throws KappaNonNegative when kappa(beta) >= 0.
JumpInReport jump_in_constants(const MapSpec& spec, double alpha, double beta, double b_plus, double b_minus,
                               const IConfig& cfg);

struct JumpIntegralReport {
    Estimate formula;  // Gamma(1 - beta/alpha)/beta (b+ E_1[I^{beta/alpha}] + b- E_-1[I^{beta/alpha}])
    Estimate direct;   // ∫ E_x[1 - e^{-T0}] eta(dx) by importance sampling of log|x|
};

JumpIntegralReport jump_integral_check(const MapSpec& spec, double alpha, const JumpInMeasure& eta,
                                       const IConfig& cfg);

// =============================================================================
// Excursions
// =============================================================================

struct ContinuousMode {
    double theta;
};
struct JumpMode {
    JumpInMeasure eta;
};
using ExtensionMode = std::variant<ContinuousMode, JumpMode>;

double mode_gamma(const ExtensionMode& mode, double alpha);

struct Excursion {
    double start;     // glue time
    double length;    // T0 of the excursion
    double entry_x;   // X_{t0} (continuous) or X_{0+} (jump)
    double entry_t;   // t0 (continuous) or 0 (jump)
};

struct ExtensionPath {
    std::vector<Excursion> excursions;
    double epsilon = 0.0;
    double total_time = 0.0;
    /// Expected total length of the discarded excursions shorter than epsilon.
    double discarded_mass = 0.0;
    double gamma = 0.0;
    bool continuous = true;
    /// 0 outside excursions; within one, the entry point (detailed paths are regenerated on demand).
    bool in_excursion(double t) const;
};

struct ExtensionConfig {
    IConfig sampling;
    std::size_t max_excursions = 1'000'000;
};

/// Glues i.i.d. excursions of length > epsilon until total time T.
ExtensionPath build_extension(const MapSpec& spec, double alpha, const ExtensionMode& mode, double T,
                              double epsilon, const ExtensionConfig& cfg);

std::string extension_to_csv(const ExtensionPath& path);

struct SojournReport {
    double gamma;
    double expected_slope;       // alpha - 1 - gamma alpha
    double slope;
    double slope_lo, slope_hi;   // 95% jackknife CI
    std::array<Estimate, 2> c;   // C^1, C^-1
    std::array<Estimate, 2> moments;  // E_{0,i}[I^{-(1-gamma)}]
    Estimate residual;           // C^1 E_1 + C^-1 E_-1 - alpha / Gamma(1 - gamma)
    std::vector<double> bin_edges;
    std::array<std::vector<double>, 2> density;
    /// Jump mode with 2 beta >= reach exponent: the importance weights have infinite variance
    /// and the jackknife SE is not reliable.
    bool infinite_variance = false;
};

struct SojournConfig {
    IConfig sampling;
    double y_lo = 1.0;
    double y_hi = 16.0;
    int bins = 8;
    int groups = 20;
    /// Continuous mode: occupation before t0 comes from the entrance law, after t0 from simulated paths.
    double t0 = 1.0;
};

SojournReport sojourn_constants(const MapSpec& spec, double alpha, const ExtensionMode& mode,
                                const SojournConfig& cfg);

}  // namespace maplk
