#pragma once

#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "maplk/rng.hpp"

namespace maplk {

/// Open interval (lo, hi); either end may be infinite. A closed end is
/// allowed where a formula stays finite at the boundary.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double z) const {
        return (lo_closed ? z >= lo : z > lo) && (hi_closed ? z <= hi : z < hi);
    }
    bool contains_closure(double z) const { return z >= lo && z <= hi; }
    /// True when every point of `other` lies in *this.
    bool covers(const Interval& other) const;
    Interval shifted(double by) const { return {lo + by, hi + by, lo_closed, hi_closed}; }
    Interval reflected() const { return {-hi, -lo, hi_closed, lo_closed}; }
    Interval intersect(const Interval& other) const;
    bool empty() const { return !(lo < hi || (lo == hi && lo_closed && hi_closed)); }
};

namespace laws {

struct Normal {
    double mean;
    double sd;
};

struct Deterministic {
    double value;
};

/// Up-jump with probability p, Exp(eta_up) sized; otherwise down-jump of Exp(eta_down) size.
struct TwoSidedExponential {
    double p;
    double eta_up;
    double eta_down;
};

/// Density proportional to e^{lambda u} on [a, b]; lambda = 0 is the uniform law.
struct TiltedUniform {
    double a;
    double b;
    double lambda = 0.0;
};

/// Known only through its moment-generating function.
struct Analytic {
    std::function<double(double)> mgf;
    Interval domain;
    std::string name;
};

}  // namespace laws

/// A real-valued jump law with evaluable MGF.
class JumpLaw {
public:
    using Variant = std::variant<laws::Normal, laws::Deterministic, laws::TwoSidedExponential,
                                 laws::TiltedUniform, laws::Analytic>;

    JumpLaw() : v_(laws::Deterministic{0.0}) {}
    JumpLaw(Variant v);  // NOLINT(google-explicit-constructor)
    template <class Law, class = std::enable_if_t<std::is_constructible_v<Variant, Law>>>
    JumpLaw(Law law) : JumpLaw(Variant(std::move(law))) {}  // NOLINT(google-explicit-constructor)

    static JumpLaw normal(double mean, double sd) { return laws::Normal{mean, sd}; }
    static JumpLaw deterministic(double value) { return laws::Deterministic{value}; }
    static JumpLaw two_sided_exponential(double p, double eta_up, double eta_down) {
        return laws::TwoSidedExponential{p, eta_up, eta_down};
    }
    static JumpLaw uniform(double a, double b) { return laws::TiltedUniform{a, b, 0.0}; }
    static JumpLaw analytic(std::function<double(double)> mgf, Interval domain, std::string name);

    double mgf(double z) const;
    Interval mgf_domain() const;
    bool sampleable() const { return !std::holds_alternative<laws::Analytic>(v_); }
    double sample(RandomStream& rng) const;
    double mean() const;

    /// Law of -U.
    JumpLaw negated() const;
    /// Law with density proportional to e^{gamma u} times the original one.
    JumpLaw tilted(double gamma) const;

    const Variant& variant() const { return v_; }
    std::string to_string() const;
    /// Inverse of to_string for the sampleable laws; throws SchemaError(0, ...).
    static JumpLaw parse(const std::string& text);

private:
    Variant v_;
};

}  // namespace maplk
