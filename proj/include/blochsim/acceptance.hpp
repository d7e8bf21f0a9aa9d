#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace blochsim::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool informational = false;  // supplementary diagnostics, not gating
    std::string detail;
    double seconds = 0.0;
};

struct Report {
    std::vector<CriterionResult> results;
    bool all_pass() const;
};

// Runs the full validation battery. quick = reduced ensemble sizes with
// tolerances rescaled by the matching 3-standard-error factor (smoke mode;
// the stated gate is the full run).
Report run_all(bool quick, unsigned workers = 0, std::ostream* progress = nullptr);

void print_report(const Report& report, std::ostream& os);

}  // namespace blochsim::acceptance
