#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "maplk/stats.hpp"

namespace maplk {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Canonical key=value list describing one run; keys are kept sorted.
struct RunConfig {
    std::map<std::string, std::string> entries;
    std::uint64_t seed = 0;

    RunConfig& set(const std::string& key, const std::string& value);
    RunConfig& set(const std::string& key, double value);
    std::string canonical() const;
    /// 16 hex digits of fnv1a(canonical()).
    std::string digest() const;
};

/// Shortest round-trip decimal, locale independent.
std::string format_double(double x);

nlohmann::ordered_json estimate_json(const Estimate& e, std::uint64_t seed);

/// One JSON object per line; every line carries the digest and seed.
class JsonLines {
public:
    explicit JsonLines(const RunConfig& config);
    void add(nlohmann::ordered_json record);
    const std::string& str() const { return out_; }

private:
    std::string digest_;
    std::uint64_t seed_;
    std::string out_;
};

/// Prefixes CSV text with a "# config_digest=... seed=..." comment line.
std::string stamp_csv(const RunConfig& config, const std::string& csv);

void write_text(const std::string& path, const std::string& text);

}  // namespace maplk
