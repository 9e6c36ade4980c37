#pragma once

#include <string>

#include "maplk/map_spec.hpp"

namespace maplk {

/// Text form of a MapSpec: one `key = value` per line, `#` starts a comment.
///
///   domain               = (-inf, inf)        brackets mark closed ends
///   rates.plus_minus     = 1                  required
///   rates.minus_plus     = 1                  required
///   rates.reducible      = false
///   plus.drift           = 0.1                same keys for minus.*
///   plus.gaussian_variance = 0
///   plus.jump_rate       = 1
///   plus.jump_law        = deterministic(0.5)
///   plus.killing_rate    = 0
///   transition.plus_minus = deterministic(-0.3)
///   transition.minus_plus = deterministic(0)
///
/// Laws: normal(mean, sd), deterministic(c), two_sided_exponential(p, eta_up, eta_down),
/// uniform(a, b), tilted_uniform(a, b, lambda). Errors are SchemaError with the line number.
MapSpec parse_spec(const std::string& text);
MapSpec load_spec_file(const std::string& path);
/// Inverse of parse_spec for specs without analytic parts.
std::string format_spec(const MapSpec& spec);

std::string format_interval(const Interval& d);
Interval parse_interval(const std::string& text);

}  // namespace maplk
