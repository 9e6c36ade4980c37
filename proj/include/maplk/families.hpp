#pragma once

#include <utility>

#include "maplk/map_core.hpp"
#include "maplk/map_spec.hpp"

namespace maplk {

struct StableParams {
    double alpha;
    double rho;
    double rho_hat() const { return 1.0 - rho; }
    void validate() const;
};

/// Matrix exponent of the Lamperti-Kiu MAP of a stable process, z in (-1, alpha).
Mat2 stable_F(const StableParams& p, double z);
/// det stable_F(z) = Gamma(alpha - z) Gamma(1 + z) / (Gamma(-z) Gamma(1 - alpha + z)).
double stable_det(const StableParams& p, double z);

/// Matrix exponent of the MAP-dual stable process, alpha in (0,1), z in (-alpha, 1).
Mat2 dual_stable_F(const StableParams& p, double z);
Vec2 dual_stable_pi(const StableParams& p);
/// Stable process conditioned to be continuously absorbed at 0: rho and rho_hat swapped.
Mat2 conditioned_stable_F(const StableParams& p, double z);

/// (psi_1^dagger(z), psi_-1(z)) for the spectrally negative stable process, z in [0, alpha).
std::pair<double, double> spectrally_negative_exponents(double alpha, double z);

/// MapSpec factories. Components carry analytic exponents only.
MapSpec stable_spec(const StableParams& p);
MapSpec dual_stable_spec(const StableParams& p);
MapSpec conditioned_stable_spec(const StableParams& p);
MapSpec spectrally_negative_spec(double alpha);

/// Compound-Poisson reference MAP: drifts 0.1 / -0.2, unit-rate jumps of +0.5 / -0.5,
/// unit switching rates, U_{1,-1} = -0.3, U_{-1,1} = 0.
MapSpec reference_map();

/// Both phases drift at -d with no jumps; symmetric switching at rate q.
MapSpec drift_only_map(double d, double q = 1.0);

}  // namespace maplk
