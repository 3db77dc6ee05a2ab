#pragma once

#include "poro/constants.hpp"
#include "poro/diagnostics.hpp"
#include "poro/mesh.hpp"
#include "poro/model.hpp"
#include "poro/stepper.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace poro {

struct MeshSpec {
    std::string generator = "centered_square";  // centered_square, unit_square, or empty with a file
    int n = 8;
    int refine = 0;
    std::string file;
};

struct MmsStudyConfig {
    std::string case_id = "trig";
    double amplitude = 1e-3;
    std::vector<int> levels{2, 4, 8, 16};
    double dt_factor = 0.5;       // spatial study: dt = dt_factor * h^2
    double spatial_T = 0.1;
    int temporal_n = 16;
    std::vector<double> temporal_dts{0.2, 0.1, 0.05};
    double temporal_T = 1.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    MeshSpec mesh;
    MaterialParams material;
    std::string loads = "standard";
    double load_amplitude = 1.0;
    std::string initial = "zero";
    double initial_amplitude = 1.0;
    double dt = 1e-2;
    int n_steps = 50;
    PicardConfig picard;
    DiagnosticsOptions diagnostics;
    int output_every = 10;  // VTK cadence in steps; the CSV always has every step
    bool write_vtk = true;
    std::uint64_t seed = 0;
    std::vector<double> sweep_c0{1e-1, 1e-2, 1e-3, 1e-4};
    MmsStudyConfig mms;
    ConstantsConfig constants;

    std::string source;  // path or label of the parsed text
    std::string text;    // raw text, hashed into the manifest
};

/// The acceptance scenario: centered square, n = 8, unit moduli, c0 = 0.1,
/// gravity (0, -0.1), standard loads at the given amplitude, dt = 0.01, 50 steps.
ScenarioConfig standard_scenario(double amplitude = 0.01);

/// Throws ParseError (with line) on syntax or type errors and ConfigError on
/// unknown keys, unknown registry ids or out-of-range values.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

std::shared_ptr<const Mesh> build_mesh(const MeshSpec& spec);

}  // namespace poro
