#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace disaster {

// One compared quantity.  Empty optionals are quantities that do not apply.
struct Delta {
    std::string name;
    std::optional<double> analytic;
    std::optional<double> oracle;
    std::optional<double> mc_estimate;
    std::optional<double> mc_stderr;
    double tolerance = 0.0;
    std::string rule;  // how tolerance is applied, e.g. "abs", "rel", "3 sigma"
    bool pass = true;
    bool gating = true;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = true;
    double seconds = 0.0;
    std::vector<Delta> deltas;
};

struct SuiteOptions {
    std::uint64_t seed = 20240101;
    unsigned threads = 0;
};

// Names accepted by run_suite.
std::vector<std::string> suite_names();
// "acceptance" runs the numbered criteria 1..11; other suites group checks by model.
std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& opts);
CriterionResult run_criterion(int id, const SuiteOptions& opts);

}  // namespace disaster
