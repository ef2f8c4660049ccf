#pragma once

#include <string>
#include <vector>

namespace kacld::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

struct Options {
    int threads = 0;
    std::vector<int> only; // empty = all criteria
};

/// Runs the acceptance criteria and returns one result per criterion.
std::vector<CriterionResult> run_all(const Options& options = {});

bool all_passed(const std::vector<CriterionResult>& results);

std::string to_json_string(const std::vector<CriterionResult>& results);

/// One "criterion N: PASS/FAIL" line per result.
std::string to_report(const std::vector<CriterionResult>& results);

} // namespace kacld::verify
