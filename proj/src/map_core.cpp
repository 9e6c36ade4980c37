#include "maplk/map_core.hpp"

#include <algorithm>
#include <cmath>

#include "maplk/errors.hpp"
#include "maplk/special.hpp"

namespace maplk {

namespace {

constexpr int kScanPoints = 256;

double disc_of(const Mat2& m) {
    const double h = 0.5 * (m(0, 0) - m(1, 1));
    return h * h + m(0, 1) * m(1, 0);
}

// eigenvalues (larger first) of a real-spectrum 2x2 matrix, computed without cancellation
std::pair<double, double> real_eigenvalues(const Mat2& m) {
    if (m(0, 1) == 0.0 || m(1, 0) == 0.0) {
        return {std::max(m(0, 0), m(1, 1)), std::min(m(0, 0), m(1, 1))};
    }
    double d2 = disc_of(m);
    const double scale = std::max({std::fabs(m(0, 0)), std::fabs(m(1, 1)), std::fabs(m(0, 1)), std::fabs(m(1, 0))});
    if (d2 < 0.0) {
        if (d2 > -1e-14 * scale * scale) d2 = 0.0;
        else throw ComplexSpectrum("2x2 matrix has complex eigenvalues");
    }
    const double half_tr = 0.5 * m.trace();
    const double delta = std::sqrt(d2);
    const double det = m.det();
    double l1, l2;
    if (half_tr >= 0.0) {
        l1 = half_tr + delta;
        l2 = l1 != 0.0 ? det / l1 : 0.0;
    } else {
        l2 = half_tr - delta;
        l1 = det / l2;
    }
    return {l1, l2};
}

}  // namespace

Vec2 stationary_distribution(const TransitionRateMatrix& rates) {
    if (rates.q_pm < 0.0 || rates.q_mp < 0.0) throw Error("negative transition rate");
    if (rates.q_pm == 0.0) throw ReducibleChain(1);
    if (rates.q_mp == 0.0) throw ReducibleChain(-1);
    const double s = rates.q_pm + rates.q_mp;
    return {rates.q_mp / s, rates.q_pm / s};
}

Vec2 limiting_distribution(const TransitionRateMatrix& rates) {
    if (rates.q_pm == 0.0 && rates.q_mp > 0.0) return {1.0, 0.0};
    if (rates.q_mp == 0.0 && rates.q_pm > 0.0) return {0.0, 1.0};
    return stationary_distribution(rates);
}

MatrixExponentValue evaluate_F(const MapSpec& spec, double z) {
    if (!spec.domain.contains(z)) throw DomainViolation(z, spec.domain.lo, spec.domain.hi, "evaluate_F");
    auto psi = [z](const LevyComponent& c) {
        if (z == 0.0 && !c.is_analytic()) return -c.killing_rate;
        return c.psi(z);
    };
    auto g = [z](const JumpLaw& u) { return z == 0.0 ? 1.0 : u.mgf(z); };
    const double q_pm = spec.rates.q_pm, q_mp = spec.rates.q_mp;
    Mat2 m;
    m(0, 0) = psi(spec.plus) - q_pm;
    m(1, 1) = psi(spec.minus) - q_mp;
    m(0, 1) = q_pm > 0.0 ? q_pm * g(spec.u_pm) : 0.0;
    m(1, 0) = q_mp > 0.0 ? q_mp * g(spec.u_mp) : 0.0;
    return {m, z};
}

double leading_eigenvalue(const Mat2& m) { return real_eigenvalues(m).first; }

PerronPair perron_pair(const MapSpec& spec, double z) {
    const Mat2 f = evaluate_F(spec, z).m;
    const double k = leading_eigenvalue(f);
    const Vec2 c1{f(0, 1), k - f(0, 0)};
    const Vec2 c2{k - f(1, 1), f(1, 0)};
    Vec2 v = std::hypot(c1[0], c1[1]) >= std::hypot(c2[0], c2[1]) ? c1 : c2;
    if (v[0] == 0.0 && v[1] == 0.0) v = {1.0, 1.0};  // F = k I
    if (v[0] <= 0.0 && v[1] <= 0.0) v = {-v[0], -v[1]};
    const Vec2 pi = limiting_distribution(spec.rates);
    const double norm = pi[0] * v[0] + pi[1] * v[1];
    if (!(v[0] > 0.0) || !(v[1] > 0.0) || !(norm > 0.0))
        throw NoPerronVector("no strictly positive eigenvector at z = " + std::to_string(z));
    return {k, {v[0] / norm, v[1] / norm}, z};
}

double kappa(const MapSpec& spec, double z) { return leading_eigenvalue(evaluate_F(spec, z).m); }

double kappa_prime(const MapSpec& spec, double z) {
    const double h = 1e-5 * std::max(1.0, std::fabs(z));
    if (spec.domain.contains(z - h) && spec.domain.contains(z + h))
        return (kappa(spec, z + h) - kappa(spec, z - h)) / (2.0 * h);
    if (spec.domain.contains(z + 2 * h))
        return (-3.0 * kappa(spec, z) + 4.0 * kappa(spec, z + h) - kappa(spec, z + 2 * h)) / (2.0 * h);
    return (3.0 * kappa(spec, z) - 4.0 * kappa(spec, z - h) + kappa(spec, z - 2 * h)) / (2.0 * h);
}

MapSpec dual_spec(const MapSpec& spec) {
    const Vec2 pi = stationary_distribution(spec.rates);
    MapSpec d;
    d.plus = spec.plus.reflected();
    d.minus = spec.minus.reflected();
    d.rates.q_pm = pi[1] / pi[0] * spec.rates.q_mp;
    d.rates.q_mp = pi[0] / pi[1] * spec.rates.q_pm;
    d.u_pm = spec.u_mp.negated();
    d.u_mp = spec.u_pm.negated();
    d.domain = spec.domain.reflected();
    return d;
}

MapSpec esscher_tilt(const MapSpec& spec, double gamma) {
    if (gamma == 0.0) return spec;
    if (!spec.domain.contains(gamma))
        throw DomainViolation(gamma, spec.domain.lo, spec.domain.hi, "esscher_tilt");
    const PerronPair pp = perron_pair(spec, gamma);
    MapSpec t;
    t.plus = spec.plus.tilted(gamma);
    t.minus = spec.minus.tilted(gamma);
    t.rates = spec.rates;
    t.u_pm = spec.u_pm;
    t.u_mp = spec.u_mp;
    if (spec.rates.q_pm > 0.0) {
        t.rates.q_pm = spec.rates.q_pm * spec.u_pm.mgf(gamma) * pp.v[1] / pp.v[0];
        t.u_pm = spec.u_pm.tilted(gamma);
    }
    if (spec.rates.q_mp > 0.0) {
        t.rates.q_mp = spec.rates.q_mp * spec.u_mp.mgf(gamma) * pp.v[0] / pp.v[1];
        t.u_mp = spec.u_mp.tilted(gamma);
    }
    t.domain = spec.domain.shifted(-gamma);
    if (t.domain.empty()) throw DomainViolation(gamma, spec.domain.lo, spec.domain.hi, "tilted domain is empty");
    return t;
}

CramerResult cramer_number(const MapSpec& spec, double alpha) {
    if (!(alpha > 0.0)) throw Error("cramer_number: alpha must be positive");
    const double hi = std::min(alpha, spec.domain.hi);
    if (!(hi > 0.0) || spec.domain.lo >= hi)
        throw DomainViolation(hi, spec.domain.lo, spec.domain.hi, "kappa not evaluable on (0, alpha)");

    auto try_kappa = [&](double z) -> std::optional<double> {
        try {
            const double k = kappa(spec, z);
            if (std::isfinite(k)) return k;
        } catch (const DomainViolation&) {
        } catch (const PoleHit&) {
        } catch (const ComplexSpectrum&) {
        }
        return std::nullopt;
    };

    std::vector<KappaSample> scan;
    if (spec.domain.contains(0.0)) {
        if (auto k = try_kappa(0.0); k && *k < 0.0) scan.push_back({0.0, *k});
    }
    for (int i = 1; i < kScanPoints; ++i) {
        const double z = hi * i / kScanPoints;
        if (auto k = try_kappa(z)) scan.push_back({z, *k});
    }
    if (hi < alpha && spec.domain.contains(hi)) {
        if (auto k = try_kappa(hi)) scan.push_back({hi, *k});
    }
    if (scan.empty()) throw DomainViolation(hi, spec.domain.lo, spec.domain.hi, "kappa not evaluable on (0, alpha)");

    CramerResult res;
    for (std::size_t i = 0; i < 9; ++i) res.profile.push_back(scan[i * (scan.size() - 1) / 8]);

    std::optional<std::size_t> up;
    for (std::size_t i = 1; i < scan.size(); ++i) {
        const bool a = scan[i - 1].kappa < 0.0, b = scan[i].kappa < 0.0;
        if (a != b) ++res.sign_changes;
        if (a && !b && !up) up = i;
    }

    auto attach_vector = [&](double theta) {
        try {
            res.v_theta = perron_pair(spec, theta).v;
        } catch (const NoPerronVector&) {
            res.eigenvector_signed = true;
        }
    };

    auto k_of = [&](double z) { return kappa(spec, z); };
    if (up) {
        const auto r = special::brent_root(k_of, scan[*up - 1].z, scan[*up].z, 1e-14);
        res.theta = r.root;
        attach_vector(r.root);
        return res;
    }

    // no crossing: look for a touching zero at the scan minimum
    std::size_t kmin = 0;
    for (std::size_t i = 1; i < scan.size(); ++i)
        if (scan[i].kappa < scan[kmin].kappa) kmin = i;
    if (scan[kmin].kappa >= 0.0) {
        const double a = scan[kmin > 0 ? kmin - 1 : 0].z;
        const double b = scan[std::min(kmin + 1, scan.size() - 1)].z;
        if (b > a) {
            double kmax = 0.0;
            for (const auto& s : scan) kmax = std::max(kmax, std::fabs(s.kappa));
            const auto m = special::golden_min(k_of, a, b, 1e-15);
            if (std::fabs(m.value) < 1e-10 * std::max(1.0, kmax)) {
                res.theta = m.argmin;
                res.touching = true;
                attach_vector(m.argmin);
                return res;
            }
        }
        return res;
    }

    // kappa < 0 up to alpha: report a root beyond alpha, if the domain allows one
    if (scan.back().kappa < 0.0 && spec.domain.hi > alpha) {
        const double top = std::isfinite(spec.domain.hi) ? spec.domain.hi : alpha + 10.0;
        double prev_z = scan.back().z, prev_k = scan.back().kappa;
        for (int i = 1; i < kScanPoints; ++i) {
            const double z = alpha + (top - alpha) * i / kScanPoints;
            auto k = try_kappa(z);
            if (!k) continue;
            if (*k >= 0.0) {
                res.root_beyond_alpha = special::brent_root(k_of, prev_z, z, 1e-14).root;
                break;
            }
            prev_z = z;
            prev_k = *k;
        }
        (void)prev_k;
    }
    return res;
}

EigenBoundReport leading_eigen_bound(const Mat2& a) {
    if (disc_of(a) < 0.0) throw ComplexSpectrum("leading_eigen_bound: complex eigenvalues");
    EigenBoundReport r;
    r.trace = a.trace();
    r.det_i_minus_a = (1.0 - a(0, 0)) * (1.0 - a(1, 1)) - a(0, 1) * a(1, 0);
    r.lambda_max = real_eigenvalues(a).first;
    if (r.trace <= 2.0 && r.det_i_minus_a > 0.0) r.certificate = EigenCertificate::lambda_lt_one;
    else if (r.trace <= 2.0 && r.det_i_minus_a == 0.0) r.certificate = EigenCertificate::lambda_le_one;
    else r.certificate = EigenCertificate::hypotheses_violated;
    return r;
}

Mat2 matrix_exp(const Mat2& a, double t) {
    const Mat2 b = t * a;
    double norm = 0.0;
    for (int i = 0; i < 2; ++i) norm = std::max(norm, std::fabs(b(i, 0)) + std::fabs(b(i, 1)));
    if (norm == 0.0) return Mat2::identity();

    const double d2 = disc_of(b);
    const double gap = 2.0 * std::sqrt(std::fabs(d2));
    if (gap >= 1e-6 * norm) {
        if (d2 > 0.0) {
            const auto [l1, l2] = real_eigenvalues(b);
            const double e1 = std::exp(l1), e2 = std::exp(l2);
            const double g = l1 - l2;
            Mat2 r;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double id = i == j ? 1.0 : 0.0;
                    r(i, j) = (e1 * (b(i, j) - l2 * id) - e2 * (b(i, j) - l1 * id)) / g;
                }
            return r;
        }
        // complex pair m +- i w
        const double m = 0.5 * b.trace();
        const double w = std::sqrt(-d2);
        const double em = std::exp(m);
        const double c = std::cos(w), s = std::sin(w) / w;
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r(i, j) = em * ((i == j ? c : 0.0) + s * (b(i, j) - (i == j ? m : 0.0)));
        return r;
    }

    // near-coalescent spectrum: scaling and squaring with a 20-term Taylor series
    int squarings = 0;
    double scaled = norm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++squarings;
    }
    const Mat2 c = std::ldexp(1.0, -squarings) * b;
    Mat2 sum = Mat2::identity(), term = Mat2::identity();
    for (int k = 1; k <= 20; ++k) {
        term = (1.0 / k) * (term * c);
        sum = sum + term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

std::string to_string(EigenCertificate c) {
    switch (c) {
        case EigenCertificate::lambda_lt_one: return "lambda_max < 1";
        case EigenCertificate::lambda_le_one: return "lambda_max <= 1";
        case EigenCertificate::hypotheses_violated: return "hypotheses violated";
    }
    return "";
}

}  // namespace maplk
