#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "o2hlab/bounds.hpp"

namespace o2hlab {

struct ExperimentConfig {
    std::string suite;
    int population = 0;  // 0 = suite default
    std::uint64_t seed = 1;
    std::optional<int> l, m, n, r;
    std::vector<int> q;
    std::string e = "both";  // "1" | "half" | "both"
    std::string out_dir = ".";
    bool explain = false;

    void validate() const;  // throws std::invalid_argument on bad knobs
};

struct SuiteResult {
    std::string suite;
    int total = 0;
    int passed = 0;
    double min_slack = 0.0;
    double wall_time_s = 0.0;
    std::vector<AdvantageReport> rows;
    std::string csv_path, summary_path;
};

// Runs one suite (or every suite for "all"), writes <suite>.csv and
// <suite>.summary.json under out_dir, and returns the results in seed order.
std::vector<SuiteResult> run_suite(const ExperimentConfig& config, std::ostream& log);

// Exit status contract: 0 all checks pass, 1 a check failed, 2 bad usage.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::vector<std::string> known_suites();

}  // namespace o2hlab
