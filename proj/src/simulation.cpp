#include "poro/simulation.hpp"

#include "poro/errors.hpp"

namespace poro {

RunResult run(Solver& solver, const State& initial, const RunConfig& cfg) {
    if (cfg.n_steps < 1) throw ValidationError("run: n_steps must be >= 1");
    if (!(cfg.dt > 0.0)) throw ValidationError("run: dt must be > 0");
    RunResult out;
    DiagnosticsTracker tracker(solver, cfg.dt, cfg.diagnostics);
    tracker.start(initial);
    out.snapshots.push_back(initial);

    State cur = initial;
    for (int n = 1; n <= cfg.n_steps; ++n) {
        StepReport rep;
        try {
            State next = solver.picard_solve(cur, cfg.dt, &rep);
            // keep the time grid exact rather than accumulated
            next.t = initial.t + n * cfg.dt;
            cur = std::move(next);
        } catch (const SolverError& e) {
            if (n == 1) throw;
            out.complete = false;
            out.failure = "step " + std::to_string(n) + ": " + e.what();
            break;
        }
        out.reports.push_back(rep);
        tracker.step(cur, rep);
        const bool keep = cfg.snapshot_every > 0 ? (n % cfg.snapshot_every == 0) : false;
        if (keep || n == cfg.n_steps) out.snapshots.push_back(cur);
    }
    out.final_state = cur;
    out.diagnostics = tracker.rows();
    return out;
}

}  // namespace poro
