#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maplk/report.hpp"

namespace maplk {

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    int workers = 1;
    /// Analytic criteria only.
    bool quick = false;
    /// Multiplies every Monte Carlo sample size.
    double budget = 1.0;
    /// Criterion 15 reruns the suite; disabled inside those reruns.
    bool determinism = true;
};

enum class Verdict { pass, fail, skip };

std::string to_string(Verdict v);

struct CriterionResult {
    int id = 0;
    std::string name;
    Verdict verdict = Verdict::fail;
    std::string detail;
    nlohmann::ordered_json data;
    double seconds = 0.0;
};

using ResultSink = std::function<void(const CriterionResult&)>;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, const ResultSink& sink = {});

/// "PASS  criterion  5  moment_identity    max z 1.84 (3.1 s)"
std::string format_result_line(const CriterionResult& r);

/// JSON lines without timings; identical across worker counts for a fixed seed.
std::string results_json(const std::vector<CriterionResult>& results, const RunConfig& config);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace maplk
