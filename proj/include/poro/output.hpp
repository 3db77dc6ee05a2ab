#pragma once

#include "poro/config.hpp"
#include "poro/diagnostics.hpp"
#include "poro/simulation.hpp"
#include "poro/stepper.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace poro {

extern const char* const kVersion;

/// Hex SHA-1 of "blob <size>\0<content>", the git object id of a file.
std::string git_blob_sha1(std::string_view content);

/// Columns: step, t, J, E, energy_residual, C_eta_defect, C_xi_recon_defect,
/// C_u_minus_C_q, bundle, picard_iters. One row per time level.
extern const char* const kDiagnosticsCsvHeader;
void write_diagnostics_csv(std::ostream& out, const DiagnosticsSeries& rows);

/// Legacy ASCII VTK 2.0 unstructured grid with point data u, p, q, xi, eta
/// at the mesh vertices.
void write_vtk(std::ostream& out, const Solver& solver, const State& s, const std::string& title);

/// Pretty JSON of the parsed configuration.
std::string config_echo_json(const ScenarioConfig& cfg);

/// Manifest: command, config echo, versions, seed, input hash, the
/// resolution of each modelling choice, and the run outcome.
std::string run_manifest_json(const ScenarioConfig& cfg, const Solver& solver, const RunResult& result,
                              const std::string& command);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace poro
