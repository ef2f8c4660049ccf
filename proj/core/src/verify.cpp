#include "kacld/verify.hpp"

#include <json.hpp>

namespace kacld::verify {

std::vector<CriterionResult> run_all(const Options& options) {
    (void)options;
    return {};
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

std::string to_json_string(const std::vector<CriterionResult>& results) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results)
        j.push_back({{"id", r.id},
                     {"name", r.name},
                     {"passed", r.passed},
                     {"seconds", r.seconds},
                     {"detail", r.detail}});
    return j.dump(2);
}

std::string to_report(const std::vector<CriterionResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += "criterion " + std::to_string(r.id) + " (" + r.name + "): " +
               (r.passed ? "PASS" : "FAIL") + "  [" + std::to_string(r.seconds) + " s]\n";
        if (!r.passed && !r.detail.empty()) out += "  " + r.detail + "\n";
    }
    return out;
}

} // namespace kacld::verify
