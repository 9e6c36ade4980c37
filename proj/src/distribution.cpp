#include "maplk/distribution.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "maplk/errors.hpp"

namespace maplk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// (e^x - 1)/x, continuous at 0
double exprel(double x) {
    if (std::fabs(x) < 1e-8) return 1.0 + 0.5 * x;
    return std::expm1(x) / x;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

bool Interval::covers(const Interval& o) const {
    const bool lo_ok = lo < o.lo || (lo == o.lo && (lo_closed || !o.lo_closed));
    const bool hi_ok = hi > o.hi || (hi == o.hi && (hi_closed || !o.hi_closed));
    return lo_ok && hi_ok;
}

Interval Interval::intersect(const Interval& o) const {
    Interval r = *this;
    if (o.lo > lo || (o.lo == lo && !o.lo_closed)) {
        r.lo = o.lo;
        r.lo_closed = o.lo_closed && (o.lo > lo || lo_closed);
    }
    if (o.hi < hi || (o.hi == hi && !o.hi_closed)) {
        r.hi = o.hi;
        r.hi_closed = o.hi_closed && (o.hi < hi || hi_closed);
    }
    return r;
}

JumpLaw::JumpLaw(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const laws::Normal& n) {
                       if (!(n.sd >= 0.0)) throw Error("normal law: negative sd");
                   },
                   [](const laws::Deterministic&) {},
                   [](const laws::TwoSidedExponential& t) {
                       if (!(t.p >= 0.0 && t.p <= 1.0) || !(t.eta_up > 0.0) || !(t.eta_down > 0.0))
                           throw Error("two_sided_exponential law: need p in [0,1] and positive rates");
                   },
                   [](const laws::TiltedUniform& u) {
                       if (!(u.a < u.b)) throw Error("uniform law: need a < b");
                   },
                   [](const laws::Analytic& a) {
                       if (!a.mgf) throw Error("analytic law: missing mgf");
                   }},
               v_);
}

JumpLaw JumpLaw::analytic(std::function<double(double)> mgf, Interval domain, std::string name) {
    return laws::Analytic{std::move(mgf), domain, std::move(name)};
}

Interval JumpLaw::mgf_domain() const {
    return std::visit(overloaded{
                          [](const laws::Normal&) { return Interval{}; },
                          [](const laws::Deterministic&) { return Interval{}; },
                          [](const laws::TwoSidedExponential& t) {
                              Interval d;
                              if (t.p > 0.0) d.hi = t.eta_up;
                              if (t.p < 1.0) d.lo = -t.eta_down;
                              return d;
                          },
                          [](const laws::TiltedUniform&) { return Interval{}; },
                          [](const laws::Analytic& a) { return a.domain; }},
                      v_);
}

double JumpLaw::mgf(double z) const {
    const Interval dom = mgf_domain();
    if (!dom.contains(z)) throw DomainViolation(z, dom.lo, dom.hi, "jump law mgf");
    return std::visit(overloaded{
                          [z](const laws::Normal& n) { return std::exp(n.mean * z + 0.5 * n.sd * n.sd * z * z); },
                          [z](const laws::Deterministic& d) { return std::exp(z * d.value); },
                          [z](const laws::TwoSidedExponential& t) {
                              double m = 0.0;
                              if (t.p > 0.0) m += t.p * t.eta_up / (t.eta_up - z);
                              if (t.p < 1.0) m += (1.0 - t.p) * t.eta_down / (t.eta_down + z);
                              return m;
                          },
                          [z](const laws::TiltedUniform& u) {
                              const double w = u.b - u.a;
                              return std::exp(z * u.a) * exprel((z + u.lambda) * w) / exprel(u.lambda * w);
                          },
                          [z](const laws::Analytic& a) { return a.mgf(z); }},
                      v_);
}

double JumpLaw::sample(RandomStream& rng) const {
    return std::visit(overloaded{
                          [&](const laws::Normal& n) { return n.mean + n.sd * rng.normal(); },
                          [](const laws::Deterministic& d) { return d.value; },
                          [&](const laws::TwoSidedExponential& t) {
                              const double u = rng.uniform();
                              const double e = rng.exponential(1.0);
                              return u < t.p ? e / t.eta_up : -e / t.eta_down;
                          },
                          [&](const laws::TiltedUniform& u) {
                              const double w = u.b - u.a;
                              const double r = rng.uniform();
                              if (std::fabs(u.lambda * w) < 1e-12) return u.a + r * w;
                              return u.a + std::log1p(r * std::expm1(u.lambda * w)) / u.lambda;
                          },
                          [](const laws::Analytic& a) -> double {
                              throw AnalyticOnlyComponent("jump law '" + a.name + "' has no sampler");
                          }},
                      v_);
}

double JumpLaw::mean() const {
    return std::visit(overloaded{
                          [](const laws::Normal& n) { return n.mean; },
                          [](const laws::Deterministic& d) { return d.value; },
                          [](const laws::TwoSidedExponential& t) {
                              return t.p / t.eta_up - (1.0 - t.p) / t.eta_down;
                          },
                          [](const laws::TiltedUniform& u) {
                              const double w = u.b - u.a;
                              const double x = u.lambda * w;
                              if (std::fabs(x) < 1e-6) return u.a + w * (0.5 + x / 12.0);
                              return u.a + w * (1.0 / (-std::expm1(-x)) - 1.0 / x);
                          },
                          [](const laws::Analytic& a) {
                              // central difference of the mgf at 0
                              const double h = 1e-6;
                              if (a.domain.contains(h) && a.domain.contains(-h))
                                  return (a.mgf(h) - a.mgf(-h)) / (2.0 * h);
                              return (a.mgf(h) - 1.0) / h;
                          }},
                      v_);
}

JumpLaw JumpLaw::negated() const {
    return std::visit(overloaded{
                          [](const laws::Normal& n) -> JumpLaw { return laws::Normal{-n.mean, n.sd}; },
                          [](const laws::Deterministic& d) -> JumpLaw { return laws::Deterministic{-d.value}; },
                          [](const laws::TwoSidedExponential& t) -> JumpLaw {
                              return laws::TwoSidedExponential{1.0 - t.p, t.eta_down, t.eta_up};
                          },
                          [](const laws::TiltedUniform& u) -> JumpLaw {
                              return laws::TiltedUniform{-u.b, -u.a, -u.lambda};
                          },
                          [](const laws::Analytic& a) -> JumpLaw {
                              auto f = a.mgf;
                              return laws::Analytic{[f](double z) { return f(-z); }, a.domain.reflected(),
                                                    "negated " + a.name};
                          }},
                      v_);
}

JumpLaw JumpLaw::tilted(double gamma) const {
    if (gamma == 0.0) return *this;
    const Interval dom = mgf_domain();
    if (!dom.contains(gamma)) throw DomainViolation(gamma, dom.lo, dom.hi, "tilt outside mgf domain");
    return std::visit(overloaded{
                          [gamma](const laws::Normal& n) -> JumpLaw {
                              return laws::Normal{n.mean + n.sd * n.sd * gamma, n.sd};
                          },
                          [](const laws::Deterministic& d) -> JumpLaw { return d; },
                          [gamma](const laws::TwoSidedExponential& t) -> JumpLaw {
                              const double wu = t.p > 0.0 ? t.p * t.eta_up / (t.eta_up - gamma) : 0.0;
                              const double wd =
                                  t.p < 1.0 ? (1.0 - t.p) * t.eta_down / (t.eta_down + gamma) : 0.0;
                              return laws::TwoSidedExponential{wu / (wu + wd), t.eta_up - gamma,
                                                               t.eta_down + gamma};
                          },
                          [gamma](const laws::TiltedUniform& u) -> JumpLaw {
                              return laws::TiltedUniform{u.a, u.b, u.lambda + gamma};
                          },
                          [gamma](const laws::Analytic& a) -> JumpLaw {
                              auto f = a.mgf;
                              const double norm = f(gamma);
                              return laws::Analytic{[f, gamma, norm](double z) { return f(z + gamma) / norm; },
                                                    a.domain.shifted(-gamma), "tilted " + a.name};
                          }},
                      v_);
}

std::string JumpLaw::to_string() const {
    return std::visit(overloaded{
                          [](const laws::Normal& n) { return "normal(" + fmt(n.mean) + ", " + fmt(n.sd) + ")"; },
                          [](const laws::Deterministic& d) { return "deterministic(" + fmt(d.value) + ")"; },
                          [](const laws::TwoSidedExponential& t) {
                              return "two_sided_exponential(" + fmt(t.p) + ", " + fmt(t.eta_up) + ", " +
                                     fmt(t.eta_down) + ")";
                          },
                          [](const laws::TiltedUniform& u) {
                              if (u.lambda == 0.0) return "uniform(" + fmt(u.a) + ", " + fmt(u.b) + ")";
                              return "tilted_uniform(" + fmt(u.a) + ", " + fmt(u.b) + ", " + fmt(u.lambda) + ")";
                          },
                          [](const laws::Analytic& a) { return "analytic(" + a.name + ")"; }},
                      v_);
}

JumpLaw JumpLaw::parse(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw SchemaError(0, "malformed law '" + text + "', expected name(args)");
    std::string name = text.substr(0, open);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.erase(0, 1);
    for (std::size_t k = close + 1; k < text.size(); ++k)
        if (!std::isspace(static_cast<unsigned char>(text[k])))
            throw SchemaError(0, "trailing characters after law '" + text + "'");

    std::vector<double> args;
    std::stringstream ss(text.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw SchemaError(0, "non-numeric argument '" + item + "' in law '" + text + "'");
        }
        for (std::size_t k = used; k < item.size(); ++k)
            if (!std::isspace(static_cast<unsigned char>(item[k])))
                throw SchemaError(0, "non-numeric argument '" + item + "' in law '" + text + "'");
        args.push_back(v);
    }
    auto need = [&](std::size_t k) {
        if (args.size() != k)
            throw SchemaError(0, "law '" + name + "' takes " + std::to_string(k) + " arguments, got " +
                                     std::to_string(args.size()));
    };
    try {
        if (name == "normal") {
            need(2);
            return normal(args[0], args[1]);
        }
        if (name == "deterministic") {
            need(1);
            return deterministic(args[0]);
        }
        if (name == "two_sided_exponential") {
            need(3);
            return two_sided_exponential(args[0], args[1], args[2]);
        }
        if (name == "uniform") {
            need(2);
            return uniform(args[0], args[1]);
        }
        if (name == "tilted_uniform") {
            need(3);
            return laws::TiltedUniform{args[0], args[1], args[2]};
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(0, e.what());
    }
    throw SchemaError(0, "unknown law '" + name + "'");
}

}  // namespace maplk
