#pragma once

#include <cstdint>
#include <string>

namespace poro {

/// Regime bounds for sampled displacement fields: L2 norm of grad u in
/// [M, N], pointwise Frobenius norm in [M', N'], hard cap delta.
struct RegimeBounds {
    double grad_lower = 1e-12;
    double grad_upper = 1.0;
    double frob_lower = 1e-12;
    double frob_upper = 1.0;
    double delta = 0.01;

    void validate() const;
};

struct ConstantsConfig {
    RegimeBounds bounds;
    int n_samples = 1000;
    std::uint64_t seed = 1;
    double mu = 1.0;
    double lambda = 1.0;
    bool linear_only = false;  // N_nl forced to zero
    int mesh_n = 4;            // centered square, crossed
    int modes = 3;             // max trigonometric wavenumber
};

struct EmpiricalConstants {
    double C1_growth = 0.0;
    double C2_coercivity = 0.0;
    double C3_lipschitz = 0.0;
    double C4_monotonicity = 0.0;
    double korn_c1 = 0.0;
    double korn_c2 = 0.0;
    bool outside_monotone_regime = false;
    int samples_used = 0;
    int samples_discarded = 0;
    double fraction_within_bounds = 0.0;
};

/// Per-sample seed so that every sample is reproducible in isolation.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

/// Sampled estimates of the growth, coercivity, Lipschitz and monotonicity
/// constants of the reformulated stress over random RM-orthogonal fields.
EmpiricalConstants estimate_constants(const ConstantsConfig& cfg);

/// JSON report with constants, regime bounds, sample count and seed.
std::string constants_report_json(const ConstantsConfig& cfg, const EmpiricalConstants& c);

}  // namespace poro
