#include "maplk/families.hpp"

#include <cmath>
#include <numbers>

#include "maplk/errors.hpp"
#include "maplk/special.hpp"

namespace maplk {

using special::gamma;
using special::sin_pi;

namespace {

// Gamma(a - z) Gamma(1 + z) / pi
double stable_g(double alpha, double z) {
    return gamma(alpha - z) * gamma(1.0 + z) / std::numbers::pi;
}

// entries of the stable matrix exponent written with sin(pi x) in place of
// the reciprocal Gamma pairs: 1 / (Gamma(x) Gamma(1 - x)) = sin(pi x) / pi
Mat2 stable_like(double alpha, double rho, double z) {
    const double ar = alpha * rho, arh = alpha * (1.0 - rho);
    const double g = stable_g(alpha, z);
    return Mat2::of(-g * sin_pi(arh - z), g * sin_pi(arh), g * sin_pi(ar), -g * sin_pi(ar - z));
}

MapSpec spec_from_exponent(std::function<Mat2(double)> f, Interval domain, const std::string& name) {
    const Mat2 f0 = f(0.0);
    const double q_pm = f0(0, 1), q_mp = f0(1, 0);
    MapSpec s;
    s.rates = {q_pm, q_mp, false};
    s.plus = LevyComponent::analytic([f, q_pm](double z) { return f(z)(0, 0) + q_pm; }, domain);
    s.minus = LevyComponent::analytic([f, q_mp](double z) { return f(z)(1, 1) + q_mp; }, domain);
    s.u_pm = JumpLaw::analytic([f, q_pm](double z) { return f(z)(0, 1) / q_pm; }, domain, name + " U(1,-1)");
    s.u_mp = JumpLaw::analytic([f, q_mp](double z) { return f(z)(1, 0) / q_mp; }, domain, name + " U(-1,1)");
    s.domain = domain;
    return s;
}

}  // namespace

void StableParams::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw Error("stable family: alpha must lie in (0, 2)");
    if (!(rho > 0.0 && rho < 1.0)) throw Error("stable family: rho must lie in (0, 1)");
    if (alpha * rho > 1.0 || alpha * rho_hat() > 1.0)
        throw Error("stable family: need alpha rho <= 1 and alpha rho_hat <= 1");
}

Mat2 stable_F(const StableParams& p, double z) { return stable_like(p.alpha, p.rho, z); }

double stable_det(const StableParams& p, double z) {
    if (z == std::floor(z)) throw PoleHit("stable_det: integer argument " + std::to_string(z));
    const double g = stable_g(p.alpha, z);
    return -g * g * sin_pi(p.alpha - z) * sin_pi(z);
}

Mat2 dual_stable_F(const StableParams& p, double z) { return conditioned_stable_F({p.alpha, 1.0 - p.rho}, z); }

Vec2 dual_stable_pi(const StableParams& p) {
    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    const double a = 1.0 / sin_pi(p.alpha * p.rho_hat());
    const double b = 1.0 / sin_pi(p.alpha * p.rho);
    return {a / (a + b), b / (a + b)};
}

Mat2 conditioned_stable_F(const StableParams& p, double z) {
    // dual matrix with rho and rho_hat interchanged
    const double ar = p.alpha * p.rho, arh = p.alpha * p.rho_hat();
    const double g = stable_g(p.alpha, -z);
    return Mat2::of(-g * sin_pi(ar + z), g * sin_pi(ar), g * sin_pi(arh), -g * sin_pi(arh + z));
}

std::pair<double, double> spectrally_negative_exponents(double alpha, double z) {
    if (z == alpha) throw PoleHit("spectrally_negative_exponents: pole at z = alpha");
    const double g = stable_g(alpha, z);
    return {g * sin_pi(z - alpha + 1.0), g * sin_pi(z - alpha)};
}

MapSpec stable_spec(const StableParams& p) {
    p.validate();
    return spec_from_exponent([p](double z) { return stable_F(p, z); }, Interval{-1.0, p.alpha}, "stable");
}

MapSpec dual_stable_spec(const StableParams& p) {
    p.validate();
    if (!(p.alpha < 1.0)) throw Error("dual_stable family: alpha must lie in (0, 1)");
    return spec_from_exponent([p](double z) { return dual_stable_F(p, z); }, Interval{-p.alpha, 1.0},
                              "dual_stable");
}

MapSpec conditioned_stable_spec(const StableParams& p) {
    p.validate();
    if (!(p.alpha < 1.0)) throw Error("conditioned_stable family: alpha must lie in (0, 1)");
    return spec_from_exponent([p](double z) { return conditioned_stable_F(p, z); }, Interval{-p.alpha, 1.0},
                              "conditioned_stable");
}

MapSpec spectrally_negative_spec(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw Error("spectrally_negative family: alpha must lie in (1, 2)");
    const Interval dom{0.0, alpha, true, false};
    const double q_plus = -spectrally_negative_exponents(alpha, 0.0).first;
    MapSpec s;
    s.rates = {q_plus, 0.0, true};
    s.plus = LevyComponent::analytic(
        [alpha, q_plus](double z) { return spectrally_negative_exponents(alpha, z).first + q_plus; }, dom);
    s.minus = LevyComponent::analytic([alpha](double z) { return spectrally_negative_exponents(alpha, z).second; },
                                      dom);
    s.u_pm = JumpLaw::deterministic(0.0);
    s.u_mp = JumpLaw::deterministic(0.0);
    s.domain = dom;
    return s;
}

MapSpec reference_map() {
    MapSpec s;
    s.plus.drift = 0.1;
    s.plus.jump_rate = 1.0;
    s.plus.jump_law = JumpLaw::deterministic(0.5);
    s.minus.drift = -0.2;
    s.minus.jump_rate = 1.0;
    s.minus.jump_law = JumpLaw::deterministic(-0.5);
    s.u_pm = JumpLaw::deterministic(-0.3);
    s.u_mp = JumpLaw::deterministic(0.0);
    s.rates = {1.0, 1.0, false};
    return s;
}

MapSpec drift_only_map(double d, double q) {
    MapSpec s;
    s.plus.drift = -d;
    s.minus.drift = -d;
    s.rates = {q, q, false};
    return s;
}

}  // namespace maplk
