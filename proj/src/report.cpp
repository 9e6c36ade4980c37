#include "maplk/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "maplk/errors.hpp"

namespace maplk {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

RunConfig& RunConfig::set(const std::string& key, const std::string& value) {
    entries[key] = value;
    return *this;
}

RunConfig& RunConfig::set(const std::string& key, double value) { return set(key, format_double(value)); }

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
    out += "seed=" + std::to_string(seed) + "\n";
    return out;
}

std::string RunConfig::digest() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

nlohmann::ordered_json estimate_json(const Estimate& e, std::uint64_t seed) {
    return {{"estimate", e.value}, {"se", e.se}, {"n", e.n}, {"seed", seed}};
}

JsonLines::JsonLines(const RunConfig& config) : digest_(config.digest()), seed_(config.seed) {}

void JsonLines::add(nlohmann::ordered_json record) {
    nlohmann::ordered_json line;
    line["config_digest"] = digest_;
    line["seed"] = seed_;
    for (auto it = record.begin(); it != record.end(); ++it) line[it.key()] = it.value();
    out_ += line.dump() + "\n";
}

std::string stamp_csv(const RunConfig& config, const std::string& csv) {
    return "# config_digest=" + config.digest() + " seed=" + std::to_string(config.seed) + "\n" + csv;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw Error("failed writing " + path);
}

}  // namespace maplk
