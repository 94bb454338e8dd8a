#pragma once

// Named verification suites behind the command-line driver.  Each suite
// bundles the checks of one layer (invariant-form identities, quadrature
// normalization, surface holonomy, the discrete bi-complex, the action
// identities, brane curvatures, ...) into a deterministic, seeded run that
// produces one numeric defect and one pinned tolerance per check.
//
// The `resolution` knob means: sample count for pointwise suites, mesh
// refinement level for quadrature suites, and cover size for the discrete
// model; 0 picks the per-suite default.  `tolerance_scale` multiplies every
// tolerance (exact checks stay exact), so marginal hardware can still run
// the full battery meaningfully.

#include <string>
#include <vector>

#include "gerbecalc/common.hpp"

namespace gerbecalc {

struct RunConfig {
    std::string command;
    unsigned seed = 7;
    int level = 1;               // pairing level k
    int resolution = 0;          // 0 = suite default
    double tolerance_scale = 1.0;
};

struct CheckResult {
    std::string name;
    double defect = 0.0;
    double tolerance = 0.0;  // scaled; exact checks carry 0
    bool pass = false;
    double seconds = 0.0;
};

struct SuiteReport {
    RunConfig config;
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// All suite names in canonical order.
const std::vector<std::string>& suite_names();

// Runs the suite named by cfg.command; throws Error for unknown names.
SuiteReport run_suite(const RunConfig& cfg);

// Stable machine-readable report (schema gerbecalc-report/1).
std::string report_json(const SuiteReport& report);

}  // namespace gerbecalc
