#pragma once
// acceptance.hpp — end-to-end verification suite. Each check exercises one
// shipped guarantee of the pipeline with tolerances pinned in the
// implementation; the CLI `verify` command and the acceptance test binary
// both run through this entry point so there is a single source of truth.

#include <string>
#include <vector>

namespace netham {

struct CheckResult {
    std::string id;      // stable check name, e.g. "transformer-congruence"
    bool pass = false;
    std::string detail;  // measured quantity vs. pinned tolerance
};

struct AcceptanceOptions {
    std::string fixture_dir;       // directory holding the netlist fixtures
    unsigned seed = 1;             // base seed of the randomized checks
    double omega_max = 0;          // > 0 overrides the sum-rule cutoff
};

// All known suite names ("all" runs every check).
std::vector<std::string> acceptance_suites();

// Runs one suite; throws std::invalid_argument on an unknown suite name.
std::vector<CheckResult> run_acceptance(const std::string& suite,
                                        const AcceptanceOptions& opt);

// One "PASS"/"FAIL" line per check.
std::string format_results(const std::vector<CheckResult>& results);

}  // namespace netham
