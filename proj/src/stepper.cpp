#include "poro/stepper.hpp"

#include "poro/cg.hpp"
#include "poro/errors.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <sstream>

namespace poro {

const std::array<const char*, 3> kRmModeNames{"translation-x", "translation-y", "rotation"};

namespace {

LoadVectors assemble_loads(const Loads& loads, const Space& su, const Space& ss, double t) {
    LoadVectors lv;
    lv.F = Eigen::VectorXd::Zero(su.num_dofs());
    lv.S = Eigen::VectorXd::Zero(ss.num_dofs());
    if (loads.f) lv.F += assemble_body_load(su, [&](const Eigen::Vector2d& x) { return loads.f(x, t); });
    if (loads.f1) {
        lv.F += assemble_traction(
            su, [&](const Eigen::Vector2d& x, const Eigen::Vector2d& n, int tag) { return loads.f1(x, n, tag, t); });
    }
    if (loads.phi_src) lv.S += assemble_source(ss, [&](const Eigen::Vector2d& x) { return loads.phi_src(x, t); });
    if (loads.phi1) {
        lv.S += assemble_flux(
            ss, [&](const Eigen::Vector2d& x, const Eigen::Vector2d& n, int tag) { return loads.phi1(x, n, tag, t); });
    }
    return lv;
}

CgOptions mass_cg() {
    CgOptions o;
    o.tol = 1e-14;
    return o;
}

}  // namespace

std::array<double, 3> compatibility_check(const Loads& loads, const Space& space_u, double t) {
    const Space scalar(space_u.mesh_ptr(), SpaceKind::ScalarLinear);
    const LoadVectors lv = assemble_loads(loads, space_u, scalar, t);
    const auto rm = rm_basis(space_u);
    return {lv.F.dot(rm[0]), lv.F.dot(rm[1]), lv.F.dot(rm[2])};
}

Solver::Solver(std::shared_ptr<const Mesh> mesh, MaterialParams params, Loads loads, PicardConfig picard)
    : mesh_(std::move(mesh)),
      params_(params),
      loads_(std::move(loads)),
      picard_(picard),
      space_u_(mesh_, SpaceKind::VectorQuadratic),
      space_s_(mesh_, SpaceKind::ScalarLinear) {
    params_.validate();
    kappas_ = kappa_from(params_);
    if (!(picard_.tol > 0.0) || picard_.maxit < 1 || !(picard_.damping > 0.0 && picard_.damping <= 1.0)) {
        throw ValidationError("picard settings: need tol > 0, maxit >= 1, damping in (0, 1]");
    }
    ops_.mass_u = assemble_mass(space_u_);
    ops_.stiffness = assemble_vector_stiffness(space_u_, params_.mu);
    ops_.h1_u = assemble_h1_gram(space_u_);
    ops_.div = assemble_divergence(space_u_, space_s_);
    ops_.mass_s = assemble_mass(space_s_);
    ops_.diffusion = assemble_diffusion(space_s_, params_.K, params_.mu_f);
    ops_.gravity = assemble_gravity_load(space_s_, params_.K, params_.mu_f, params_.rho_f, params_.g_vec);
    ops_.rm = rm_basis(space_u_);
    for (int k = 0; k < 3; ++k) ops_.rm_rows.push_back(ops_.mass_u.multiply(ops_.rm[k]));
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) ops_.rm_gram(k, l) = ops_.rm[k].dot(ops_.rm_rows[l]);
    }
    static_loads_ = assemble_loads(loads_, space_u_, space_s_, 0.0);
    static_loads_.gravity = ops_.gravity;
}

LoadVectors Solver::load_vectors(double t) const {
    if (!loads_.time_dependent) return static_loads_;
    LoadVectors lv = assemble_loads(loads_, space_u_, space_s_, t);
    lv.gravity = ops_.gravity;
    return lv;
}

std::array<double, 3> Solver::compatibility_residuals(double t) const {
    const Eigen::VectorXd F = load_vectors(t).F;
    return {F.dot(ops_.rm[0]), F.dot(ops_.rm[1]), F.dot(ops_.rm[2])};
}

Eigen::VectorXd Solver::project_scalar(const Eigen::VectorXd& rhs) const {
    return solve_cg(ops_.mass_s, rhs, mass_cg()).x;
}

void Solver::derive_pq(State& s) const {
    const auto pq = from_xi_eta<Eigen::VectorXd>(s.xi, s.eta, kappas_);
    s.p = pq.p;
    s.q = pq.q;
}

State Solver::initialize(const VectorFn& u0, const ScalarFn& p0, double t0) {
    const auto res = compatibility_residuals(t0);
    for (int k = 0; k < 3; ++k) {
        if (!(std::abs(res[k]) <= loads_.compat_tol)) {
            std::ostringstream os;
            os << "incompatible loads: (f, r) + <f1, r> = " << res[k] << " for rigid-motion mode " << kRmModeNames[k]
               << " (tolerance " << loads_.compat_tol << ")";
            throw ValidationError(os.str());
        }
    }

    State s;
    s.t = t0;
    const Eigen::VectorXd rhs_u = assemble_body_load(space_u_, u0);
    s.u = solve_cg(ops_.mass_u, rhs_u, mass_cg()).x;
    Eigen::Vector3d proj;
    for (int k = 0; k < 3; ++k) proj[k] = ops_.rm_rows[k].dot(s.u);
    removed_rm_ = ops_.rm_gram.ldlt().solve(proj);
    for (int k = 0; k < 3; ++k) s.u -= removed_rm_[k] * ops_.rm[k];

    const Eigen::VectorXd q0 = project_scalar(ops_.div.multiply(s.u));
    const Eigen::VectorXd pp = project_scalar(assemble_source(space_s_, p0));
    const auto xe = to_xi_eta<Eigen::VectorXd>(pp, q0, params_);
    s.xi = xe.xi;
    s.eta = xe.eta;
    derive_pq(s);
    return s;
}

const DirectSolver& Solver::factor(double dt) {
    if (!(dt > 0.0)) throw ValidationError("time step must be > 0");
    auto it = factors_.find(dt);
    if (it != factors_.end()) return *it->second;
    const int nu = space_u_.num_dofs(), ns = space_s_.num_dofs();
    BlockSystem sys({"u", "xi", "eta"}, {nu, ns, ns});
    const CsrMatrix Bt = ops_.div.transpose();
    sys.add_block(0, 0, ops_.stiffness);
    sys.add_block(0, 1, Bt, -1.0);
    sys.add_block(1, 0, ops_.div, -1.0);
    sys.add_block(1, 1, ops_.mass_s, -kappas_.k3);
    sys.add_block(1, 2, ops_.mass_s, kappas_.k1);
    sys.add_block(2, 1, ops_.diffusion, kappas_.k1);
    sys.add_block(2, 2, ops_.mass_s, 1.0 / dt);
    sys.add_block(2, 2, ops_.diffusion, kappas_.k2);
    sys.declare_kernel(0, {ops_.rm[0], ops_.rm[1], ops_.rm[2]}, "rigid motions: RM multipliers absent");
    if (rm_constraints_) sys.add_constraint_rows(0, ops_.rm_rows);
    auto solver = std::make_unique<DirectSolver>(sys);
    return *factors_.emplace(dt, std::move(solver)).first->second;
}

Eigen::VectorXd Solver::stress_vector(const Eigen::VectorXd& u) const {
    Eigen::VectorXd v = ops_.stiffness.multiply(u);
    if (picard_.nonlinear) v += assemble_stress_load(space_u_, u, params_.mu, params_.lambda, picard_.pairing, true);
    return v;
}

double Solver::h1_norm(const Eigen::VectorXd& u) const { return std::sqrt(std::max(0.0, ops_.h1_u.quadratic_form(u))); }

State Solver::linear_step(const State& prev, const Eigen::VectorXd& lag, double dt, double* residual) {
    const DirectSolver& lu = factor(dt);
    const double t = prev.t + dt;
    const LoadVectors lv = load_vectors(t);
    Eigen::VectorXd ru = lv.F;
    if (picard_.nonlinear) ru -= assemble_stress_load(space_u_, lag, params_.mu, params_.lambda, picard_.pairing, true);
    const Eigen::VectorXd rxi = Eigen::VectorXd::Zero(space_s_.num_dofs());
    const Eigen::VectorXd reta = ops_.mass_s.multiply(prev.eta) / dt + lv.S + lv.gravity;

    double rel = 0.0;
    std::vector<Eigen::VectorXd> x;
    try {
        x = lu.solve({ru, rxi, reta}, &rel);
    } catch (const SolverError& e) {
        std::ostringstream os;
        os << "linear step to t = " << t << " failed: " << e.what();
        throw SolverError(os.str());
    }
    State s;
    s.t = t;
    s.u = x[0];
    s.xi = x[1];
    s.eta = x[2];
    if (x[3].size() == 3) s.rm_multipliers = x[3];
    derive_pq(s);
    if (residual) *residual = rel;
    return s;
}

State Solver::picard_solve(const State& prev, double dt, StepReport* report) {
    const auto start = std::chrono::steady_clock::now();
    StepReport rep;
    double omega = picard_.damping;
    std::vector<double> failed_history;

    for (int attempt = 0; attempt < 2; ++attempt) {
        rep.increments.clear();
        rep.damping = omega;
        Eigen::VectorXd lag = prev.u;
        bool diverged = false;
        std::string why;
        for (int k = 1; k <= picard_.maxit; ++k) {
            double rel = 0.0;
            State s = linear_step(prev, lag, dt, &rel);
            rep.linear_residual = rel;
            rep.iterations = k;
            if (!picard_.nonlinear) {
                rep.increments.push_back(0.0);
                rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (report) *report = rep;
                return s;
            }
            const Eigen::VectorXd u_new = (1.0 - omega) * lag + omega * s.u;
            const double inc = h1_norm(u_new - lag);
            rep.increments.push_back(inc);
            if (std::isfinite(inc) && inc <= picard_.tol * std::max(1.0, h1_norm(u_new))) {
                rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (report) *report = rep;
                return s;
            }
            const auto& h = rep.increments;
            const int n = static_cast<int>(h.size());
            if (!std::isfinite(inc)) {
                diverged = true;
                why = "non-finite increment";
            } else if (inc > 1e8 * std::max(1.0, h.front())) {
                diverged = true;
                why = "increment growth beyond 1e8";
            } else if (n >= 4 && h[n - 1] > h[n - 2] && h[n - 2] > h[n - 3] && h[n - 3] > h[n - 4]) {
                diverged = true;
                why = "three consecutive increment increases";
            }
            if (diverged) break;
            lag = u_new;
        }
        if (diverged && picard_.auto_damping && attempt == 0 && omega > 0.5) {
            failed_history = rep.increments;
            omega = 0.5;
            rep.restarted = true;
            continue;
        }
        std::ostringstream os;
        os << "Picard iteration " << (diverged ? "diverged (" + why + ")" : "did not converge") << " for step to t = "
           << prev.t + dt << " after " << rep.iterations << " iterations with damping " << omega;
        if (rep.restarted) os << " (after restart from damping " << picard_.damping << ")";
        os << "; last increment " << (rep.increments.empty() ? 0.0 : rep.increments.back());
        throw ConvergenceError(os.str(), rep.increments);
    }
    throw ConvergenceError("Picard iteration failed", failed_history);
}

}  // namespace poro
