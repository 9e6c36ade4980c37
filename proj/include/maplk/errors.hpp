#pragma once

#include <stdexcept>
#include <string>

namespace maplk {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside a declared domain (MGF domain, f_domain, parameter range).
class DomainViolation : public Error {
public:
    DomainViolation(double z, double lo, double hi, const std::string& what);
    double z() const noexcept { return z_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double z_, lo_, hi_;
};

/// A two-state chain with a zero off-diagonal rate.
class ReducibleChain : public Error {
public:
    explicit ReducibleChain(int absorbing_phase);
    int absorbing_phase() const noexcept { return absorbing_phase_; }

private:
    int absorbing_phase_;
};

class NoPerronVector : public Error {
public:
    using Error::Error;
};

class ComplexSpectrum : public Error {
public:
    using Error::Error;
};

/// Gamma-function pole hit by a closed-form evaluation.
class PoleHit : public Error {
public:
    using Error::Error;
};

/// Simulation requested for a component known only through its Laplace exponent.
class AnalyticOnlyComponent : public Error {
public:
    using Error::Error;
};

/// Clock or simulation budget ran out before the requested quantity was resolved.
class HorizonExhausted : public Error {
public:
    using Error::Error;
};

class NotAbsorbed : public Error {
public:
    using Error::Error;
};

class NotFinite : public Error {
public:
    using Error::Error;
};

class NoCramerNumber : public Error {
public:
    using Error::Error;
};

class PilotPoolTooSmall : public Error {
public:
    using Error::Error;
};

class KappaNonNegative : public Error {
public:
    using Error::Error;
};

/// Malformed spec document or configuration; carries the offending line (0 if unknown).
class SchemaError : public Error {
public:
    SchemaError(int line, const std::string& what);
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace maplk
