#pragma once

#include <functional>

namespace maplk::special {

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

/// Gamma function: Lanczos (g = 7, 9 terms) on x >= 1/2, reflection below.
/// Throws PoleHit at the non-positive integers.
double gamma(double x);

/// 1/Gamma(x); zero at the non-positive integers instead of throwing.
double rgamma(double x);

struct RootResult {
    double root;
    double residual;
    double bracket_width;
    int iterations;
};

/// Brent's method on a sign-changing bracket [a, b]. Stops when the bracket is
/// narrower than `xtol` or the residual is exactly zero.
RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double xtol = 1e-12, int max_iter = 200);

struct MinResult {
    double argmin;
    double value;
};

/// Golden-section search for a unimodal function on [a, b].
MinResult golden_min(const std::function<double(double)>& f, double a, double b,
                     double xtol = 1e-13, int max_iter = 300);

}  // namespace maplk::special
