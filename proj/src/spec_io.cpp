#include "maplk/spec_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "maplk/errors.hpp"

namespace maplk {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_number(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "+inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw SchemaError(line, "expected a number, got '" + s + "'");
    }
    if (used != s.size()) throw SchemaError(line, "expected a number, got '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s, int line) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw SchemaError(line, "expected true or false, got '" + s + "'");
}

Interval parse_interval_at(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (s.size() < 5) throw SchemaError(line, "malformed interval '" + s + "'");
    const char open = s.front(), close = s.back();
    if ((open != '(' && open != '[') || (close != ')' && close != ']'))
        throw SchemaError(line, "interval must look like (lo, hi) or [lo, hi), got '" + s + "'");
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw SchemaError(line, "interval needs a comma: '" + s + "'");
    Interval d;
    d.lo = parse_number(s.substr(1, comma - 1), line);
    d.hi = parse_number(s.substr(comma + 1, s.size() - comma - 2), line);
    d.lo_closed = open == '[';
    d.hi_closed = close == ']';
    if (!(d.lo <= d.hi)) throw SchemaError(line, "interval with lo > hi: '" + s + "'");
    return d;
}

JumpLaw parse_law_at(const std::string& s, int line) {
    try {
        return JumpLaw::parse(s);
    } catch (const SchemaError& e) {
        throw SchemaError(line, e.what());
    }
}

}  // namespace

Interval parse_interval(const std::string& text) { return parse_interval_at(text, 0); }

std::string format_interval(const Interval& d) {
    return std::string(d.lo_closed ? "[" : "(") + fmt(d.lo) + ", " + fmt(d.hi) + (d.hi_closed ? "]" : ")");
}

MapSpec parse_spec(const std::string& text) {
    static const std::set<std::string> component_keys = {"drift", "gaussian_variance", "jump_rate", "jump_law",
                                                         "killing_rate"};
    MapSpec spec;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw SchemaError(line, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (value.empty()) throw SchemaError(line, "empty value for '" + key + "'");
        if (seen.count(key)) throw SchemaError(line, "duplicate key '" + key + "' (first on line " +
                                                         std::to_string(seen[key]) + ")");
        seen[key] = line;

        if (key == "domain") {
            spec.domain = parse_interval_at(value, line);
        } else if (key == "rates.plus_minus") {
            spec.rates.q_pm = parse_number(value, line);
        } else if (key == "rates.minus_plus") {
            spec.rates.q_mp = parse_number(value, line);
        } else if (key == "rates.reducible") {
            spec.rates.reducible = parse_bool(value, line);
        } else if (key == "transition.plus_minus") {
            spec.u_pm = parse_law_at(value, line);
        } else if (key == "transition.minus_plus") {
            spec.u_mp = parse_law_at(value, line);
        } else {
            const auto dot = key.find('.');
            const std::string head = dot == std::string::npos ? key : key.substr(0, dot);
            const std::string field = dot == std::string::npos ? "" : key.substr(dot + 1);
            if ((head != "plus" && head != "minus") || !component_keys.count(field))
                throw SchemaError(line, "unknown key '" + key + "'");
            LevyComponent& c = head == "plus" ? spec.plus : spec.minus;
            if (field == "jump_law") c.jump_law = parse_law_at(value, line);
            else if (field == "drift") c.drift = parse_number(value, line);
            else if (field == "gaussian_variance") c.gaussian_variance = parse_number(value, line);
            else if (field == "jump_rate") c.jump_rate = parse_number(value, line);
            else c.killing_rate = parse_number(value, line);
        }
    }
    for (const char* required : {"rates.plus_minus", "rates.minus_plus"})
        if (!seen.count(required)) throw SchemaError(0, std::string("missing required key '") + required + "'");
    try {
        spec.validate();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(0, std::string("invalid spec: ") + e.what());
    }
    return spec;
}

MapSpec load_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError(0, "cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spec(ss.str());
}

std::string format_spec(const MapSpec& spec) {
    if (spec.plus.is_analytic() || spec.minus.is_analytic())
        throw Error("format_spec: analytic components have no text form");
    std::ostringstream out;
    out << "domain = " << format_interval(spec.domain) << "\n";
    out << "rates.plus_minus = " << fmt(spec.rates.q_pm) << "\n";
    out << "rates.minus_plus = " << fmt(spec.rates.q_mp) << "\n";
    if (spec.rates.reducible) out << "rates.reducible = true\n";
    auto component = [&](const char* name, const LevyComponent& c) {
        out << name << ".drift = " << fmt(c.drift) << "\n";
        out << name << ".gaussian_variance = " << fmt(c.gaussian_variance) << "\n";
        out << name << ".jump_rate = " << fmt(c.jump_rate) << "\n";
        if (c.jump_law) out << name << ".jump_law = " << c.jump_law->to_string() << "\n";
        out << name << ".killing_rate = " << fmt(c.killing_rate) << "\n";
    };
    component("plus", spec.plus);
    component("minus", spec.minus);
    out << "transition.plus_minus = " << spec.u_pm.to_string() << "\n";
    out << "transition.minus_plus = " << spec.u_mp.to_string() << "\n";
    return out.str();
}

}  // namespace maplk
