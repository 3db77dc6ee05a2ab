#include "poro/diagnostics.hpp"

#include "poro/cg.hpp"
#include "poro/errors.hpp"

#include <cmath>

namespace poro {

const char* energy_rule_name(EnergyRule r) {
    switch (r) {
        case EnergyRule::Implicit: return "implicit";
        case EnergyRule::Left: return "left";
        case EnergyRule::Trapezoid: return "trapezoid";
    }
    return "?";
}

EnergyRule parse_energy_rule(const std::string& s) {
    if (s == "implicit") return EnergyRule::Implicit;
    if (s == "left") return EnergyRule::Left;
    if (s == "trapezoid") return EnergyRule::Trapezoid;
    throw ValidationError("unknown energy rule '" + s + "' (implicit, left, trapezoid)");
}

namespace {

CgOptions tight() {
    CgOptions o;
    o.tol = 1e-13;
    return o;
}

// sqrt(r' A^{-1} r) for SPD A.
double dual_norm(const CsrMatrix& A, const Eigen::VectorXd& r) {
    if (r.norm() == 0.0) return 0.0;
    return std::sqrt(std::max(0.0, r.dot(solve_cg(A, r, tight()).x)));
}

double mnorm(const CsrMatrix& M, const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, M.quadratic_form(v))); }

}  // namespace

struct DiagnosticsTracker::Impl {
    const Solver& solver;
    double dt;
    DiagnosticsOptions opts;
    CsrMatrix dual_op;    // mass + diffusion on the scalar space
    CsrMatrix laplacian;  // K = I, mu_f = 1
    Eigen::VectorXd ones_s, x_interp;
    double sqrt_c2 = 1.0;

    // previous level
    State prev;
    Eigen::VectorXd prev_stress;
    LoadVectors prev_loads;
    double J0 = 0.0;
    std::array<double, 3> work{}, darcy{}, source{};  // per rule
    double grad_p_sq = 0.0;
    double eta_pred = 0.0;
    double bundle0 = 0.0, bundle1 = -1.0, bundle_max = 0.0;

    Impl(const Solver& s, double dt_, DiagnosticsOptions o) : solver(s), dt(dt_), opts(o) {
        const Operators& ops = solver.ops();
        dual_op = add(ops.mass_s, ops.diffusion);
        laplacian = assemble_diffusion(solver.space_s(), Eigen::Matrix2d::Identity(), 1.0);
        ones_s = Eigen::VectorXd::Ones(solver.space_s().num_dofs());
        x_interp = interpolate(solver.space_u(), VectorFn([](const Eigen::Vector2d& x) { return x; }));
        const double c2 = opts.c2 > 0.0 ? opts.c2 : solver.params().mu;
        sqrt_c2 = std::sqrt(c2);
    }

    double darcy_term(const Eigen::VectorXd& p, const LoadVectors& lv) const {
        return solver.ops().diffusion.quadratic_form(p) - lv.gravity.dot(p);
    }

    double J(const State& s, const LoadVectors& lv) const {
        const auto& k = solver.kappas();
        const auto& M = solver.ops().mass_s;
        return 0.5 * (k.k2 * M.quadratic_form(s.eta) + k.k3 * M.quadratic_form(s.xi) - 2.0 * lv.F.dot(s.u));
    }

    double E(const State& s, const LoadVectors& lv) const {
        const auto& P = solver.params();
        const auto& M = solver.ops().mass_s;
        return 0.5 * (P.lambda * M.quadratic_form(s.q) + P.c0 * M.quadratic_form(s.p) - 2.0 * lv.F.dot(s.u));
    }

    DiagnosticsRow base_row(const State& s, const LoadVectors& lv) const {
        const Operators& ops = solver.ops();
        const auto& k = solver.kappas();
        const auto& P = solver.params();
        DiagnosticsRow row;
        row.t = s.t;
        row.energy.J = J(s, lv);
        row.energy.E = E(s, lv);

        auto& inv = row.invariants;
        const Eigen::VectorXd m1 = ops.mass_s.multiply(ones_s);
        inv.C_eta = m1.dot(s.eta);
        inv.C_xi = m1.dot(s.xi);
        inv.C_q = m1.dot(s.q);
        inv.C_p = m1.dot(s.p);
        inv.C_u = boundary_normal_flux(solver.space_u(), s.u);
        inv.link_q_defect = std::abs(inv.C_q - (k.k1 * inv.C_eta - k.k3 * inv.C_xi));
        inv.link_p_defect = std::abs(inv.C_p - (k.k1 * inv.C_xi + k.k2 * inv.C_eta));
        inv.u_minus_q = std::abs(inv.C_u - inv.C_q);
        const double stress_trace = solver.picard().nonlinear
                                        ? stress_trace_integral(solver.space_u(), s.u, P.mu, P.lambda)
                                        : x_interp.dot(ops.stiffness.multiply(s.u));
        const double div_int = ones_s.dot(ops.div.multiply(s.u));
        const double d = 2.0;
        inv.C_xi_recon = (stress_trace + div_int - k.k1 * inv.C_eta - lv.F.dot(x_interp)) / (d - k.k3);
        inv.xi_recon_defect = std::abs(inv.C_xi - inv.C_xi_recon);

        const Eigen::VectorXd r =
            k.k3 * ops.mass_s.multiply(s.xi) + ops.div.multiply(s.u) - k.k1 * ops.mass_s.multiply(s.eta);
        row.xi_row_residual = dual_norm(ops.mass_s, r);
        for (int j = 0; j < 3; ++j) {
            row.rm_orthogonality = std::max(row.rm_orthogonality, std::abs(ops.rm_rows[j].dot(s.u)));
        }
        row.rm_multiplier_max = s.rm_multipliers.cwiseAbs().maxCoeff();

        auto& mon = row.monitor;
        mon.strain = sqrt_c2 * std::sqrt(std::max(0.0, ops.stiffness.quadratic_form(s.u) / P.mu));
        mon.eta = std::sqrt(k.k2) * mnorm(ops.mass_s, s.eta);
        mon.xi = std::sqrt(k.k3) * mnorm(ops.mass_s, s.xi);
        mon.bundle = mon.strain + mon.eta + mon.xi;
        return row;
    }

    void finish_monitor(DiagnosticsRow& row, int step) {
        auto& mon = row.monitor;
        if (step == 0) bundle0 = mon.bundle;
        if (step == 1) bundle1 = mon.bundle;
        bundle_max = std::max(bundle_max, mon.bundle);
        mon.bundle_max = bundle_max;
        const double ref = std::max(bundle0, bundle1);
        mon.blowup = !std::isfinite(mon.bundle) || (ref > 0.0 && mon.bundle > opts.blowup_factor * ref);
    }
};

DiagnosticsTracker::DiagnosticsTracker(const Solver& solver, double dt, DiagnosticsOptions opts)
    : impl_(std::make_unique<Impl>(solver, dt, opts)) {
    if (!(dt > 0.0)) throw ValidationError("diagnostics: dt must be > 0");
}

DiagnosticsTracker::~DiagnosticsTracker() = default;

void DiagnosticsTracker::start(const State& s0) {
    Impl& m = *impl_;
    rows_.clear();
    m.prev = s0;
    m.prev_loads = m.solver.load_vectors(s0.t);
    m.prev_stress = m.solver.stress_vector(s0.u);
    m.J0 = m.J(s0, m.prev_loads);
    m.work = m.darcy = m.source = {0.0, 0.0, 0.0};
    m.grad_p_sq = 0.0;
    m.bundle_max = 0.0;
    m.bundle1 = -1.0;

    DiagnosticsRow row = m.base_row(s0, m.prev_loads);
    m.eta_pred = row.invariants.C_eta;
    row.invariants.C_eta_pred = m.eta_pred;
    row.invariants.eta_defect = 0.0;
    row.monitor.grad_p_accum = 0.0;
    m.finish_monitor(row, 0);
    rows_.push_back(row);
}

void DiagnosticsTracker::step(const State& s, const StepReport& rep) {
    Impl& m = *impl_;
    if (rows_.empty()) throw ValidationError("diagnostics: start() must be called first");
    const double dt = m.dt;
    if (std::abs((s.t - m.prev.t) - dt) > 1e-9 * std::max(1.0, std::abs(s.t))) {
        throw ValidationError("diagnostics: mismatched snapshot cadence (expected spacing " + std::to_string(dt) +
                              ", got " + std::to_string(s.t - m.prev.t) + ")");
    }
    const LoadVectors lv = m.solver.load_vectors(s.t);
    const Eigen::VectorXd stress = m.solver.stress_vector(s.u);
    const Eigen::VectorXd du = s.u - m.prev.u;

    // rule 0: new level, rule 1: old level, rule 2: average
    const double w_new = stress.dot(du), w_old = m.prev_stress.dot(du);
    const double d_new = dt * m.darcy_term(s.p, lv), d_old = dt * m.darcy_term(m.prev.p, m.prev_loads);
    const double s_new = dt * lv.S.dot(s.p), s_old = dt * m.prev_loads.S.dot(m.prev.p);
    const std::array<double, 3> w{w_new, w_old, 0.5 * (w_new + w_old)};
    const std::array<double, 3> d{d_new, d_old, 0.5 * (d_new + d_old)};
    const std::array<double, 3> so{s_new, s_old, 0.5 * (s_new + s_old)};
    for (int r = 0; r < 3; ++r) {
        m.work[r] += w[r];
        m.darcy[r] += d[r];
        m.source[r] += so[r];
    }

    DiagnosticsRow row = m.base_row(s, lv);
    row.step = static_cast<int>(rows_.size());
    const int rule = static_cast<int>(m.opts.rule);
    for (int r = 0; r < 3; ++r) {
        row.energy.residual_by_rule[r] = row.energy.J + m.work[r] + m.darcy[r] - m.source[r] - m.J0;
    }
    row.energy.residual = row.energy.residual_by_rule[rule];
    row.energy.work = m.work[rule];
    row.energy.darcy = m.darcy[rule];
    row.energy.source = m.source[rule];

    m.eta_pred += dt * lv.S.sum();
    row.invariants.C_eta_pred = m.eta_pred;
    row.invariants.eta_defect = std::abs(row.invariants.C_eta - m.eta_pred);

    const Operators& ops = m.solver.ops();
    const auto& k = m.solver.kappas();
    auto& mon = row.monitor;
    m.grad_p_sq += dt * m.laplacian.quadratic_form(s.p);
    const double K1 = m.solver.params().permeability_bounds().first;
    mon.grad_p_accum = std::sqrt(K1 / m.solver.params().mu_f * m.grad_p_sq);
    mon.deta_dual = dual_norm(m.dual_op, ops.mass_s.multiply(s.eta - m.prev.eta) / dt);
    mon.du_rate = m.sqrt_c2 * std::sqrt(std::max(0.0, ops.stiffness.quadratic_form(du) / m.solver.params().mu)) / dt;
    mon.dxi_rate = std::sqrt(k.k3) * mnorm(ops.mass_s, s.xi - m.prev.xi) / dt;
    m.finish_monitor(row, row.step);
    row.picard_iterations = rep.iterations;
    rows_.push_back(row);

    m.prev = s;
    m.prev_stress = stress;
    m.prev_loads = lv;
}

DiagnosticsSeries audit_series(const Solver& solver, const std::vector<State>& snapshots,
                               const std::vector<StepReport>& reports, double dt, DiagnosticsOptions opts) {
    if (snapshots.size() < 2) throw ValidationError("diagnostics: need at least two snapshots");
    DiagnosticsTracker tr(solver, dt, opts);
    tr.start(snapshots.front());
    for (std::size_t n = 1; n < snapshots.size(); ++n) {
        tr.step(snapshots[n], n - 1 < reports.size() ? reports[n - 1] : StepReport{});
    }
    return tr.rows();
}

std::vector<EnergyReport> energy_audit(const Solver& solver, const std::vector<State>& snapshots,
                                       const std::vector<StepReport>& reports, double dt, EnergyRule rule) {
    DiagnosticsOptions o;
    o.rule = rule;
    std::vector<EnergyReport> out;
    for (const auto& r : audit_series(solver, snapshots, reports, dt, o)) out.push_back(r.energy);
    return out;
}

std::vector<InvariantReport> invariant_audit(const Solver& solver, const std::vector<State>& snapshots, double dt) {
    std::vector<InvariantReport> out;
    for (const auto& r : audit_series(solver, snapshots, {}, dt)) out.push_back(r.invariants);
    return out;
}

std::vector<EstimateMonitor> estimate_monitor(const Solver& solver, const std::vector<State>& snapshots, double dt,
                                              double c2, double blowup_factor) {
    DiagnosticsOptions o;
    o.c2 = c2;
    o.blowup_factor = blowup_factor;
    std::vector<EstimateMonitor> out;
    for (const auto& r : audit_series(solver, snapshots, {}, dt, o)) out.push_back(r.monitor);
    return out;
}

BiotResidual biot_limit_residual(const Solver& solver, const State& s) {
    const Operators& ops = solver.ops();
    const auto& P = solver.params();
    const KappaSet lim = kappa_limit(P.alpha, P.lambda);
    BiotResidual r;
    // limit constraint (div u, phi) = (1/alpha)(eta, phi), measured in L2 after projection
    const Eigen::VectorXd c = ops.div.multiply(s.u) - lim.k1 * ops.mass_s.multiply(s.eta);
    r.constraint = dual_norm(ops.mass_s, c);
    r.pressure = mnorm(ops.mass_s, s.p - (s.xi + P.lambda * s.q) / P.alpha);
    r.total = std::hypot(r.constraint, r.pressure);
    return r;
}

}  // namespace poro
