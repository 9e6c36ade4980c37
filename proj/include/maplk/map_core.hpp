#pragma once

#include <optional>
#include <string>
#include <vector>

#include "maplk/map_spec.hpp"

namespace maplk {

struct MatrixExponentValue {
    Mat2 m;
    double arg;
};

struct PerronPair {
    double kappa;
    Vec2 v;
    double arg;
};

struct KappaSample {
    double z;
    double kappa;
};

struct CramerResult {
    std::optional<double> theta;
    std::optional<Vec2> v_theta;
    /// kappa touches 0 from above without changing sign (defective root).
    bool touching = false;
    /// Root found, but its eigenvector is not strictly positive.
    bool eigenvector_signed = false;
    /// Root of kappa located in [alpha, z_hi) when none lies in (0, alpha).
    std::optional<double> root_beyond_alpha;
    int sign_changes = 0;
    std::vector<KappaSample> profile;
};

/// pi Q = 0, pi_1 + pi_-1 = 1. Throws ReducibleChain for a zero off-diagonal rate.
Vec2 stationary_distribution(const TransitionRateMatrix& rates);

/// Point mass on the absorbing phase for reducible chains, pi otherwise.
Vec2 limiting_distribution(const TransitionRateMatrix& rates);

MatrixExponentValue evaluate_F(const MapSpec& spec, double z);

/// Leading eigenvalue of a 2x2 matrix with real spectrum.
double leading_eigenvalue(const Mat2& m);

PerronPair perron_pair(const MapSpec& spec, double z);
double kappa(const MapSpec& spec, double z);
/// dkappa/dz by central differences (one-sided at a closed domain end).
double kappa_prime(const MapSpec& spec, double z);

MapSpec dual_spec(const MapSpec& spec);
MapSpec esscher_tilt(const MapSpec& spec, double gamma);

CramerResult cramer_number(const MapSpec& spec, double alpha);

enum class EigenCertificate { lambda_lt_one, lambda_le_one, hypotheses_violated };

struct EigenBoundReport {
    EigenCertificate certificate;
    double trace;
    double det_i_minus_a;
    double lambda_max;
};

/// 2x2 eigenvalue lemma: tr A <= 2 and det(I - A) >= 0 imply lambda_max <= 1.
EigenBoundReport leading_eigen_bound(const Mat2& a);

/// e^{At}: closed-form spectral formula, scaled Taylor series near coalescence.
Mat2 matrix_exp(const Mat2& a, double t);

std::string to_string(EigenCertificate c);

}  // namespace maplk
