#include "maplk/errors.hpp"

#include <sstream>

namespace maplk {

namespace {

std::string domain_message(double z, double lo, double hi, const std::string& what) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": z = " << z << " outside (" << lo << ", " << hi << ")";
    return os.str();
}

}  // namespace

DomainViolation::DomainViolation(double z, double lo, double hi, const std::string& what)
    : Error(domain_message(z, lo, hi, what)), z_(z), lo_(lo), hi_(hi) {}

ReducibleChain::ReducibleChain(int absorbing_phase)
    : Error("reducible chain: phase " + std::to_string(absorbing_phase) + " is absorbing"),
      absorbing_phase_(absorbing_phase) {}

SchemaError::SchemaError(int line, const std::string& what)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

}  // namespace maplk
