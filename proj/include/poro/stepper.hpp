#pragma once

#include "poro/assembly.hpp"
#include "poro/block_system.hpp"
#include "poro/csr.hpp"
#include "poro/fe_space.hpp"
#include "poro/model.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace poro {

/// Load data. Every callable also receives the time; loads flagged
/// time-independent are assembled once and the time argument is ignored.
/// Empty callables mean zero.
struct Loads {
    std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> f;
    std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&, int, double)> f1;
    std::function<double(const Eigen::Vector2d&, double)> phi_src;
    std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&, int, double)> phi1;
    bool time_dependent = false;
    double compat_tol = 1e-10;
};

/// Assembled right-hand-side pieces at one time.
struct LoadVectors {
    Eigen::VectorXd F;      // (f, v) + <f1, v>
    Eigen::VectorXd S;      // (phi, psi) + <phi1, psi>
    Eigen::VectorXd gravity;  // (1/mu_f)(K rho_f g, grad psi)
};

struct PicardConfig {
    double tol = 1e-10;
    int maxit = 50;
    double damping = 1.0;
    bool auto_damping = true;  // retry once with damping 0.5 on divergence
    bool nonlinear = true;     // false drops N_nl entirely
    StressPairing pairing = StressPairing::SymmetricGradient;
};

struct State {
    double t = 0.0;
    Eigen::VectorXd u, xi, eta, p, q;
    Eigen::Vector3d rm_multipliers = Eigen::Vector3d::Zero();
};

struct StepReport {
    int iterations = 0;
    std::vector<double> increments;
    double linear_residual = 0.0;
    double wall_seconds = 0.0;
    double damping = 1.0;
    bool restarted = false;
};

/// Operators shared by the stepper and the diagnostics.
struct Operators {
    CsrMatrix mass_u, stiffness, h1_u, div, mass_s, diffusion;
    Eigen::VectorXd gravity;
    std::array<Eigen::VectorXd, 3> rm;
    std::vector<Eigen::VectorXd> rm_rows;  // M_u r_k
    Eigen::Matrix3d rm_gram;               // r_k' M_u r_l
};

extern const std::array<const char*, 3> kRmModeNames;

/// Residuals (f, r) + <f1, r> for the three rigid motions.
std::array<double, 3> compatibility_check(const Loads& loads, const Space& space_u, double t = 0.0);

class Solver {
public:
    Solver(std::shared_ptr<const Mesh> mesh, MaterialParams params, Loads loads, PicardConfig picard = {});

    const Mesh& mesh() const { return *mesh_; }
    const Space& space_u() const { return space_u_; }
    const Space& space_s() const { return space_s_; }
    const Operators& ops() const { return ops_; }
    const MaterialParams& params() const { return params_; }
    const KappaSet& kappas() const { return kappas_; }
    const Loads& loads() const { return loads_; }
    const PicardConfig& picard() const { return picard_; }
    void set_picard(const PicardConfig& cfg) { picard_ = cfg; }
    /// Dropping the rigid-motion multipliers leaves the pure-Neumann
    /// system singular; kept switchable for guardrail tests.
    void set_rm_constraints(bool on) {
        rm_constraints_ = on;
        factors_.clear();
    }

    LoadVectors load_vectors(double t) const;
    std::array<double, 3> compatibility_residuals(double t = 0.0) const;

    /// Projects u0 (RM part removed and remembered) and p0; builds q, eta, xi.
    State initialize(const VectorFn& u0, const ScalarFn& p0, double t0 = 0.0);
    /// RM coefficients removed from the projected u0 by the last initialize().
    const Eigen::Vector3d& removed_rm_component() const { return removed_rm_; }

    /// One monolithic solve with the nonlinear stress lagged at `lag`.
    State linear_step(const State& prev, const Eigen::VectorXd& lag, double dt, double* residual = nullptr);
    /// Fixed-point iteration of the lagged map.
    State picard_solve(const State& prev, double dt, StepReport* report = nullptr);

    /// N_vec(u)_i = (N(grad u), eps(v_i)) under the current nonlinearity setting.
    Eigen::VectorXd stress_vector(const Eigen::VectorXd& u) const;
    double h1_norm(const Eigen::VectorXd& u) const;
    void derive_pq(State& s) const;

private:
    const DirectSolver& factor(double dt);
    Eigen::VectorXd project_scalar(const Eigen::VectorXd& rhs) const;

    std::shared_ptr<const Mesh> mesh_;
    MaterialParams params_;
    KappaSet kappas_;
    Loads loads_;
    PicardConfig picard_;
    Space space_u_, space_s_;
    Operators ops_;
    LoadVectors static_loads_;
    Eigen::Vector3d removed_rm_ = Eigen::Vector3d::Zero();
    bool rm_constraints_ = true;
    std::map<double, std::unique_ptr<DirectSolver>> factors_;
};

}  // namespace poro
