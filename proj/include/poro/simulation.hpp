#pragma once

#include "poro/diagnostics.hpp"
#include "poro/stepper.hpp"

#include <string>
#include <vector>

namespace poro {

struct RunConfig {
    double dt = 1e-2;
    int n_steps = 1;
    int snapshot_every = 1;  // 0 keeps only the initial and final states
    DiagnosticsOptions diagnostics;
};

struct RunResult {
    std::vector<State> snapshots;
    std::vector<StepReport> reports;
    DiagnosticsSeries diagnostics;
    bool complete = true;
    std::string failure;  // set when a later step failed
    State final_state;
};

/// Sequential backward-Euler run. A failure in the first step throws; later
/// failures return the partial series flagged incomplete.
RunResult run(Solver& solver, const State& initial, const RunConfig& cfg);

}  // namespace poro
