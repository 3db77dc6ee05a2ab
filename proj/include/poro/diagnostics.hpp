#pragma once

#include "poro/stepper.hpp"

#include <array>
#include <memory>
#include <vector>

namespace poro {

/// Time rule for the integrals in the discrete energy identity.
enum class EnergyRule { Implicit, Left, Trapezoid };

const char* energy_rule_name(EnergyRule r);
EnergyRule parse_energy_rule(const std::string& s);

struct EnergyReport {
    double J = 0.0;
    double E = 0.0;
    double residual = 0.0;                  // with the configured rule
    std::array<double, 3> residual_by_rule{};  // implicit, left, trapezoid
    double work = 0.0;    // accumulated (N(grad u), eps(u_t))
    double darcy = 0.0;   // accumulated (1/mu_f)(K(grad p - rho_f g), grad p)
    double source = 0.0;  // accumulated (phi, p) + <phi1, p>
};

struct InvariantReport {
    double C_eta = 0.0, C_eta_pred = 0.0, C_xi = 0.0, C_xi_recon = 0.0, C_q = 0.0, C_p = 0.0, C_u = 0.0;
    double eta_defect = 0.0;       // |C_eta - predicted|
    double xi_recon_defect = 0.0;  // |C_xi - reconstruction|
    double link_q_defect = 0.0;    // |C_q - (k1 C_eta - k3 C_xi)|
    double link_p_defect = 0.0;    // |C_p - (k1 C_xi + k2 C_eta)|
    double u_minus_q = 0.0;        // |C_u - C_q|
};

struct EstimateMonitor {
    double strain = 0.0;       // sqrt(C2) |eps(u)|
    double eta = 0.0;          // sqrt(k2) |eta|
    double xi = 0.0;           // sqrt(k3) |xi|
    double grad_p_accum = 0.0; // sqrt(K1/mu_f) |grad p|_{L2(0,t;L2)}
    double bundle = 0.0;       // strain + eta + xi
    double bundle_max = 0.0;
    double deta_dual = 0.0;    // |(eta^n - eta^{n-1})/dt| in the (mass + diffusion) dual norm
    double du_rate = 0.0;      // sqrt(C2) |eps((u^n - u^{n-1})/dt)|
    double dxi_rate = 0.0;     // sqrt(k3) |(xi^n - xi^{n-1})/dt|
    bool blowup = false;
};

struct DiagnosticsRow {
    int step = 0;
    double t = 0.0;
    EnergyReport energy;
    InvariantReport invariants;
    EstimateMonitor monitor;
    double xi_row_residual = 0.0;  // |k3 xi + P(div u) - k1 eta| in L2
    double rm_orthogonality = 0.0; // max_k |(u, r_k)|
    double rm_multiplier_max = 0.0;
    int picard_iterations = 0;
};

struct DiagnosticsOptions {
    EnergyRule rule = EnergyRule::Implicit;
    double c2 = 0.0;              // coercivity constant for the monitors; <= 0 uses mu
    double blowup_factor = 1e3;
};

using DiagnosticsSeries = std::vector<DiagnosticsRow>;

/// Incremental evaluation: feed the initial state, then each accepted step.
class DiagnosticsTracker {
public:
    DiagnosticsTracker(const Solver& solver, double dt, DiagnosticsOptions opts = {});
    ~DiagnosticsTracker();

    void start(const State& s0);
    void step(const State& s, const StepReport& rep);
    const DiagnosticsSeries& rows() const { return rows_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    DiagnosticsSeries rows_;
};

/// Whole-series audits over stored snapshots at uniform spacing dt.
DiagnosticsSeries audit_series(const Solver& solver, const std::vector<State>& snapshots,
                               const std::vector<StepReport>& reports, double dt, DiagnosticsOptions opts = {});
std::vector<EnergyReport> energy_audit(const Solver& solver, const std::vector<State>& snapshots,
                                       const std::vector<StepReport>& reports, double dt,
                                       EnergyRule rule = EnergyRule::Implicit);
std::vector<InvariantReport> invariant_audit(const Solver& solver, const std::vector<State>& snapshots, double dt);
std::vector<EstimateMonitor> estimate_monitor(const Solver& solver, const std::vector<State>& snapshots, double dt,
                                              double c2 = 0.0, double blowup_factor = 1e3);

struct BiotResidual {
    double constraint = 0.0;  // |div u - eta/alpha| tested against all scalar functions
    double pressure = 0.0;    // |p - (xi + lambda q)/alpha|
    double total = 0.0;
};

BiotResidual biot_limit_residual(const Solver& solver, const State& s);

}  // namespace poro
