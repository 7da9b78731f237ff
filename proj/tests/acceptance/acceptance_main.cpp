// Runs the numbered acceptance criteria; one PASS/FAIL line each, then the
// individual comparisons.  Exit status is the number of failed criteria.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "disaster/verify.hpp"

namespace {

std::string cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    disaster::SuiteOptions opts;
    if (const char* s = std::getenv("DISASTER_SEED")) opts.seed = std::strtoull(s, nullptr, 10);
    bool verbose = argc > 1 && std::string(argv[1]) == "-v";
    int failed = 0;
    for (int id = 1; id <= 11; ++id) {
        auto r = disaster::run_criterion(id, opts);
        failed += r.pass ? 0 : 1;
        std::printf("%s  criterion %2d  %-52s %7.2fs\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
        for (auto& d : r.deltas) {
            if (!verbose && d.pass && d.gating) continue;
            std::printf("      %s%s %s  analytic=%s oracle=%s mc=%s se=%s tol=%g (%s)\n", d.pass ? "ok  " : "BAD ",
                        d.gating ? "" : " [info]", d.name.c_str(), cell(d.analytic).c_str(), cell(d.oracle).c_str(),
                        cell(d.mc_estimate).c_str(), cell(d.mc_stderr).c_str(), d.tolerance, d.rule.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%d of 11 criteria failed\n", failed);
    return failed;
}
