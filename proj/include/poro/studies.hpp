#pragma once

#include "poro/config.hpp"
#include "poro/constants.hpp"
#include "poro/diagnostics.hpp"
#include "poro/simulation.hpp"
#include "poro/stepper.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace poro {

struct ScenarioRun {
    std::shared_ptr<Solver> solver;
    RunResult result;
};

/// Builds mesh, solver and initial state from the config and runs it.
ScenarioRun run_scenario(const ScenarioConfig& cfg);

/// Writes diagnostics.csv, manifest.json and (if enabled) VTK snapshots.
void write_run_outputs(const ScenarioConfig& cfg, const ScenarioRun& run, const std::filesystem::path& dir,
                       const std::string& command);

/// Least-squares slope of log(err) against log(x).
double observed_order(const std::vector<double>& x, const std::vector<double>& err);

struct MmsRow {
    int n = 0;
    double h = 0.0;
    double dt = 0.0;
    int steps = 0;
    double err_u_h1 = 0.0;
    double err_u_l2 = 0.0;
    double err_p_l2 = 0.0;
    double norm_u_h1 = 0.0;  // of the exact field, for relative errors
    double norm_p_l2 = 0.0;
    int max_picard = 0;
};

struct MmsTable {
    std::string case_id;
    std::string study;  // spatial or temporal
    std::vector<MmsRow> rows;
    double order_u_h1 = 0.0;
    double order_u_l2 = 0.0;
    double order_p_l2 = 0.0;
    bool monotone = true;
    double fd_residual = 0.0;
};

/// One manufactured run on centered_square(n) with the given step.
MmsRow mms_single(const ScenarioConfig& base, const std::string& case_id, double amplitude, int n, double dt, int steps);
MmsTable mms_spatial(const ScenarioConfig& base);
MmsTable mms_temporal(const ScenarioConfig& base);
std::string mms_table_csv(const MmsTable& t);
std::string mms_table_text(const MmsTable& t);

struct SweepEntry {
    double c0 = 0.0;
    bool ok = false;
    std::string failure;
    BiotResidual biot;
    State final_state;
};

struct SweepReport {
    std::vector<SweepEntry> runs;
    std::vector<double> du_h1;    // between consecutive successful runs
    std::vector<double> deta_l2;
    bool cauchy_decreasing = true;
    bool biot_decreasing = true;
};

/// Runs the scenario once per c0 (in parallel when asked); failures are
/// recorded and the sweep continues.
SweepReport sweep_c0(const ScenarioConfig& base, const std::vector<double>& c0s, bool parallel = true);
std::string sweep_csv(const SweepReport& r);
std::string sweep_json(const ScenarioConfig& base, const SweepReport& r);

}  // namespace poro
