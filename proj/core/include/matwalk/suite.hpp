#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "matwalk/matroid.hpp"

namespace matwalk {

// one fixed test instance; expected_bases is re-derived by enumeration
// whenever the instance is loaded, so a stale constant cannot pass silently
struct SuiteInstance {
    std::string name;
    std::string matroid_json;
    std::int64_t expected_bases = 0;
    std::string note;  // closed form behind the expected count
};

const std::vector<SuiteInstance>& acceptance_suite();

// parse the instance and verify expected_bases by enumeration
Matroid load_instance(const SuiteInstance& inst);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

// runs the ten acceptance checks, streaming one line per criterion to log
std::vector<CriterionResult> run_acceptance_suite(std::ostream& log, int workers = 1);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace matwalk
