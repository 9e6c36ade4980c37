#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maplk/map_spec.hpp"
#include "maplk/rng.hpp"
#include "maplk/stats.hpp"

namespace maplk {

enum class EventKind { start, subgrid, phase_switch, levy_jump, kill, horizon, absorbed };

std::string to_string(EventKind k);

/// One node of the event skeleton. Between consecutive nodes xi moves
/// linearly from the earlier node's xi_after to the later node's xi_before.
struct PathEvent {
    double time;
    EventKind kind;
    Phase phase_after;
    double xi_before;
    double xi_after;
};

struct MapPath {
    std::vector<PathEvent> events;
    std::optional<double> killed_at;
    double horizon = 0.0;
    double substep = 0.0;

    bool alive_at(double t) const { return !killed_at || t < *killed_at; }
    /// Right-continuous value. Throws NotFinite after the kill time.
    double xi_at(double t) const;
    Phase phase_at(double t) const;
    /// Phase just before t, J(t-).
    Phase phase_before(double t) const;
    Phase final_phase() const { return events.back().phase_after; }
    double final_xi() const { return events.back().xi_after; }
};

struct SimConfig {
    double horizon = 1.0;
    double substep = 1e-3;
    std::uint64_t seed = 1;
    std::size_t n_paths = 10000;
    int workers = 1;
    void validate() const;
};

/// A linear piece of the path ending at an event or a stop.
struct Segment {
    double t0, t1;
    double xi0, xi1;
    Phase phase;
    EventKind kind;
    double xi_after;
    Phase phase_after;
};

/// Event-by-event simulator. Poisson clocks are drawn once per phase visit and
/// survive stops, so stopping at extra times never changes the path law.
class MapWalker {
public:
    MapWalker(const MapSpec& spec, RandomStream& rng, double xi0, Phase phase0, double substep = 1e-3);

    /// Advance to the next event, Gaussian sub-grid node or t_stop, whichever comes first.
    /// A stop at t_stop is reported with kind `horizon`.
    Segment step(double t_stop);
    /// True when no event can ever occur again and xi moves deterministically.
    bool quiescent() const;

    double time() const { return t_; }
    double xi() const { return xi_; }
    Phase phase() const { return phase_; }
    bool alive() const { return alive_; }

private:
    void draw_clock();

    const MapSpec& spec_;
    RandomStream& rng_;
    double substep_;
    double t_ = 0.0;
    double xi_;
    Phase phase_;
    bool alive_ = true;
    double pending_ = 0.0;
};

/// Simulates on [0, horizon]. Stops exactly at each checkpoint (recorded as sub-grid nodes).
MapPath simulate_map(const MapSpec& spec, const SimConfig& cfg, double x, Phase start,
                     const std::vector<double>& checkpoints = {});

/// Stream ids for path k started in phase idx.
std::uint64_t path_stream(std::uint64_t base, std::size_t k, int idx = 0);

struct MatrixEstimate {
    Mat2 value;
    Mat2 se;
    std::size_t n;
};

/// MC estimate of E_{0,i}[e^{z xi(t)}; J(t) = j, t < kill] with n_paths paths per start phase.
MatrixEstimate empirical_matrix_exponent(const MapSpec& spec, double z, double t, const SimConfig& cfg);

/// E[e^{gamma xi(t) - kappa(gamma) t} v_J(t) / v_J(0)] per t, start phase drawn from the limiting law.
std::vector<Estimate> wald_martingale_check(const MapSpec& spec, double gamma, const std::vector<double>& t_list,
                                            const SimConfig& cfg);

struct ReversalPoint {
    double s;
    KsResult ks;
    Estimate mean_original, mean_dual;
    Estimate var_original, var_dual;
    Estimate plus_original, plus_dual;  // P(J = +1)
    double max_z() const;
};

/// Compares xi(t - s) - xi(t) under P_pi with xi_hat(s) under the dual from pi.
std::vector<ReversalPoint> time_reversal_check(const MapSpec& spec, double t, const std::vector<double>& s_grid,
                                               const SimConfig& cfg);

/// Sample variance with the SE of its estimator, sqrt((m4 - s^4) / n).
Estimate variance_estimate(const std::vector<double>& xs);

/// CSV rows "time,phase,xi" with xi_before and xi_after rows at jumps.
std::string path_to_csv(const MapPath& path);

}  // namespace maplk
