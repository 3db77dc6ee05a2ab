#include "poro/assembly.hpp"
#include "poro/errors.hpp"
#include "poro/registry.hpp"
#include "poro/simulation.hpp"
#include "poro/stepper.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace poro;
using Eigen::Vector2d;

namespace {

std::shared_ptr<const Mesh> square(int n) { return std::make_shared<const Mesh>(centered_square_mesh(n)); }

MaterialParams standard_material() {
    MaterialParams m;
    m.g_vec = Vector2d(0, -0.1);
    return m;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("compatibility residuals") {
    auto mesh = square(4);
    const Space u(mesh, SpaceKind::VectorQuadratic);
    auto z = compatibility_check(make_loads("zero", 1), u);
    for (double r : z) CHECK(r == 0.0);
    auto s = compatibility_check(make_loads("standard", 1), u);
    for (double r : s) CHECK(std::abs(r) <= 1e-13);
    auto bad = compatibility_check(make_loads("standard-no-traction", 1), u);
    CHECK(std::abs(bad[0]) <= 1e-13);
    CHECK(bad[1] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(std::abs(bad[2]) <= 1e-13);
}

TEST_CASE("incompatible loads are rejected with the mode named") {
    Solver solver(square(4), standard_material(), make_loads("standard-no-traction", 1));
    const auto d = make_initial("zero", 1);
    CHECK_THROWS_WITH_AS(solver.initialize(d.u0, d.p0), doctest::Contains("translation-y"), ValidationError);
}

TEST_CASE("initial state from dilation data") {
    MaterialParams m;
    m.alpha = 0.8;
    m.lambda = 1.7;
    Solver solver(square(3), m, make_loads("zero", 1));
    const auto d = make_initial("dilation", 1);
    const State s = solver.initialize(d.u0, d.p0);
    CHECK(max_abs(s.q.array() - 2.0) <= 1e-12);
    CHECK(max_abs(s.eta.array() - 2.0 * m.alpha) <= 1e-12);
    CHECK(max_abs(s.xi.array() + 2.0 * m.lambda) <= 1e-12);
    const KappaSet k = solver.kappas();
    CHECK(max_abs(s.p - (k.k1 * s.xi + k.k2 * s.eta)) <= 1e-14);
    CHECK(max_abs(s.q - (k.k1 * s.eta - k.k3 * s.xi)) <= 1e-14);

    const auto z = make_initial("zero", 1);
    const State s0 = solver.initialize(z.u0, z.p0);
    CHECK(s0.u.norm() == 0.0);
    CHECK(s0.eta.norm() == 0.0);
    CHECK(s0.xi.norm() == 0.0);
}

TEST_CASE("rigid initial displacement is projected out and recorded") {
    Solver solver(square(3), MaterialParams{}, make_loads("zero", 1));
    const auto d = make_initial("rigid", 1);
    const State s = solver.initialize(d.u0, d.p0);
    CHECK(max_abs(s.u) <= 1e-12);
    const Eigen::Vector3d rm = solver.removed_rm_component();
    CHECK(rm(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rm(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rm(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero data stays zero") {
    Solver solver(square(3), MaterialParams{}, make_loads("zero", 1));
    const auto d = make_initial("zero", 1);
    const State s0 = solver.initialize(d.u0, d.p0);
    const State s1 = solver.linear_step(s0, s0.u, 0.01);
    CHECK(max_abs(s1.u) == 0.0);
    CHECK(max_abs(s1.eta) == 0.0);
    RunConfig rc;
    rc.dt = 0.01;
    rc.n_steps = 3;
    const RunResult r = run(solver, s0, rc);
    for (const auto& s : r.snapshots) {
        CHECK(max_abs(s.u) == 0.0);
        CHECK(max_abs(s.xi) == 0.0);
    }
    for (const auto& row : r.diagnostics) {
        CHECK(row.energy.J == 0.0);
        CHECK(row.energy.residual == 0.0);
        CHECK(row.monitor.bundle == 0.0);
    }
}

TEST_CASE("linear step agrees with a dense solve in the original variables") {
    auto mesh = square(2);
    MaterialParams m = standard_material();
    m.lambda = 0.7;
    m.alpha = 0.9;
    m.c0 = 0.3;
    m.K << 1.5, 0.2, 0.2, 0.8;
    m.mu_f = 1.3;
    PicardConfig pc;
    pc.nonlinear = false;
    Solver solver(mesh, m, make_loads("standard", 0.5), pc);
    const auto d = make_initial("pressure-bump", 0.3);
    const State s0 = solver.initialize(d.u0, d.p0);
    const double dt = 0.05;
    double res = 0;
    const State s1 = solver.linear_step(s0, Eigen::VectorXd::Zero(s0.u.size()), dt, &res);
    CHECK(res <= 1e-11);

    // Unknowns (u, p, q, multipliers) with q the L2 projection of div u.
    const Space su(mesh, SpaceKind::VectorQuadratic), ss(mesh, SpaceKind::ScalarLinear);
    const Eigen::MatrixXd A = assemble_vector_stiffness(su, m.mu).to_dense();
    const Eigen::MatrixXd B = assemble_divergence(su, ss).to_dense();
    const Eigen::MatrixXd M = assemble_mass(ss).to_dense();
    const Eigen::MatrixXd Mu = assemble_mass(su).to_dense();
    const Eigen::MatrixXd D = assemble_diffusion(ss, m.K, m.mu_f).to_dense();
    const auto rm = rm_basis(su);
    const int nu = su.num_dofs(), ns = ss.num_dofs(), n = nu + 2 * ns + 3;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    K.block(0, 0, nu, nu) = A;
    K.block(0, nu, nu, ns) = -m.alpha * B.transpose();
    K.block(0, nu + ns, nu, ns) = m.lambda * B.transpose();
    K.block(nu, nu, ns, ns) = m.c0 * M / dt + D;
    K.block(nu, nu + ns, ns, ns) = m.alpha * M / dt;
    K.block(nu + ns, 0, ns, nu) = B;
    K.block(nu + ns, nu + ns, ns, ns) = -M;
    for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd row = Mu * rm[k];
        K.block(nu + 2 * ns + k, 0, 1, nu) = row.transpose();
        K.block(0, nu + 2 * ns + k, nu, 1) = row;
    }
    const Loads loads = make_loads("standard", 0.5);
    const Eigen::VectorXd F =
        assemble_body_load(su, [&](const Vector2d& x) { return loads.f(x, 0.0); }) +
        assemble_traction(su, [&](const Vector2d& x, const Vector2d& nn, int tag) { return loads.f1(x, nn, tag, 0.0); });
    const Eigen::VectorXd S = assemble_source(ss, [&](const Vector2d& x) { return loads.phi_src(x, 0.0); });
    const Eigen::VectorXd G = assemble_gravity_load(ss, m.K, m.mu_f, m.rho_f, m.g_vec);
    b.head(nu) = F;
    b.segment(nu, ns) = M * s0.eta / dt + S + G;
    const Eigen::VectorXd x = K.fullPivLu().solve(b);
    CHECK((x.head(nu) - s1.u).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, s1.u.cwiseAbs().maxCoeff()));
    CHECK((x.segment(nu, ns) - s1.p).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, s1.p.cwiseAbs().maxCoeff()));
    CHECK((x.segment(nu + ns, ns) - s1.q).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, s1.q.cwiseAbs().maxCoeff()));

    // Testing the fluid row with the constant function.
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(ns);
    const double lhs = one.dot(M * s1.eta), rhs = one.dot(M * s0.eta) + dt * S.sum();
    CHECK(std::abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("Picard with the nonlinearity off takes one iteration") {
    PicardConfig pc;
    pc.nonlinear = false;
    Solver solver(square(4), standard_material(), make_loads("standard", 1), pc);
    const auto d = make_initial("zero", 1);
    StepReport rep;
    solver.picard_solve(solver.initialize(d.u0, d.p0), 0.01, &rep);
    CHECK(rep.iterations == 1);
    CHECK(rep.increments.size() == 1u);
}

TEST_CASE("Picard contracts geometrically at small amplitude") {
    Solver solver(square(4), standard_material(), make_loads("standard", 0.01));
    const auto d = make_initial("zero", 1);
    const State s0 = solver.initialize(d.u0, d.p0);
    StepReport rep;
    const State s1 = solver.picard_solve(s0, 0.01, &rep);
    CHECK(rep.iterations <= 8);
    for (std::size_t i = 1; i < rep.increments.size(); ++i) CHECK(rep.increments[i] <= 0.5 * rep.increments[i - 1]);
    CHECK(rep.increments.back() <= 1e-10 * std::max(1.0, solver.h1_norm(s1.u)));
    CHECK(max_gradient_norm(solver.space_u(), s1.u) < 0.1);
}

TEST_CASE("Picard divergence at order-one amplitude is reported") {
    Solver solver(square(4), standard_material(), make_loads("standard", 1.0));
    const auto d = make_initial("zero", 1);
    const State s0 = solver.initialize(d.u0, d.p0);
    try {
        solver.picard_solve(s0, 0.01);
        FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
        const auto& h = e.increments();
        REQUIRE(h.size() >= 4u);
        CHECK(h[h.size() - 1] > h[h.size() - 2]);
        CHECK(h[h.size() - 2] > h[h.size() - 3]);
        CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    }
}

TEST_CASE("damping without fallback still converges at small amplitude") {
    PicardConfig pc;
    pc.damping = 0.7;
    pc.auto_damping = false;
    Solver solver(square(3), standard_material(), make_loads("standard", 0.01), pc);
    const auto d = make_initial("zero", 1);
    StepReport rep;
    solver.picard_solve(solver.initialize(d.u0, d.p0), 0.01, &rep);
    CHECK(rep.damping == 0.7);
    CHECK_FALSE(rep.restarted);
    CHECK(rep.iterations > 1);
}

TEST_CASE("step invariants on the small-amplitude standard scenario") {
    Solver solver(square(4), standard_material(), make_loads("standard", 0.01));
    const auto d = make_initial("zero", 1);
    State s = solver.initialize(d.u0, d.p0);
    const Operators& ops = solver.ops();
    const KappaSet k = solver.kappas();
    for (int n = 0; n < 5; ++n) {
        s = solver.picard_solve(s, 0.01);
        for (const auto& r : ops.rm) CHECK(std::abs(r.dot(ops.mass_u * s.u)) <= 1e-10);
        CHECK(s.rm_multipliers.cwiseAbs().maxCoeff() <= 1e-8);
        // Projected constitutive row, measured in L2 of the scalar space.
        const Eigen::VectorXd row = k.k3 * (ops.mass_s * s.xi) + ops.div * s.u - k.k1 * (ops.mass_s * s.eta);
        CHECK(row.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(max_abs(s.p - (k.k1 * s.xi + k.k2 * s.eta)) <= 1e-14 * std::max(1.0, max_abs(s.p)));
        CHECK(max_abs(s.q - (k.k1 * s.eta - k.k3 * s.xi)) <= 1e-14 * std::max(1.0, max_abs(s.q)));
    }
}

TEST_CASE("missing rigid motion constraints give a structured singularity") {
    Solver solver(square(2), standard_material(), make_loads("standard", 0.01));
    solver.set_rm_constraints(false);
    const auto d = make_initial("zero", 1);
    const State s0 = solver.initialize(d.u0, d.p0);
    CHECK_THROWS_WITH_AS(solver.linear_step(s0, s0.u, 0.01), doctest::Contains("RM multipliers absent"),
                         SingularSystemError);
}

TEST_CASE("steady in-space solution is preserved") {
    const MmsCase mc = make_mms_case("linear", 1e-3);
    MaterialParams m = standard_material();
    Solver solver(square(2), m, mc.loads(m));
    State s = solver.initialize(mc.u_at(0), mc.p_at(0));
    const State s0 = s;
    for (int n = 0; n < 3; ++n) {
        s = solver.picard_solve(s, 0.1);
        CHECK(max_abs(s.u - s0.u) <= 1e-10 * max_abs(s0.u));
        CHECK(max_abs(s.eta - s0.eta) <= 1e-10 * max_abs(s0.eta));
        CHECK(max_abs(s.xi - s0.xi) <= 1e-10 * max_abs(s0.xi));
    }
}

TEST_CASE("first step failure throws, later failure returns a partial run") {
    Solver bad(square(3), standard_material(), make_loads("standard", 1.0));
    const auto d = make_initial("zero", 1);
    RunConfig rc;
    rc.dt = 0.01;
    rc.n_steps = 3;
    CHECK_THROWS_AS(run(bad, bad.initialize(d.u0, d.p0), rc), ConvergenceError);

    // Loads jump to order one after the first step.
    Loads jump = make_loads("standard", 1.0);
    auto scale = [](double t) { return t < 0.015 ? 0.01 : 1.0; };
    const Loads base = jump;
    jump.time_dependent = true;
    jump.f = [base, scale](const Vector2d& x, double t) { return (scale(t) * base.f(x, t)).eval(); };
    jump.f1 = [base, scale](const Vector2d& x, const Vector2d& n, int tag, double t) {
        return (scale(t) * base.f1(x, n, tag, t)).eval();
    };
    Solver partial(square(3), standard_material(), jump);
    const RunResult r = run(partial, partial.initialize(d.u0, d.p0), rc);
    CHECK_FALSE(r.complete);
    CHECK(r.reports.size() == 1u);
    CHECK(r.failure.find("step 2") != std::string::npos);
    CHECK(r.diagnostics.size() == 2u);
}

TEST_CASE("snapshot cadence") {
    Solver solver(square(2), standard_material(), make_loads("standard", 0.01));
    const auto d = make_initial("zero", 1);
    RunConfig rc;
    rc.dt = 0.01;
    rc.n_steps = 5;
    rc.snapshot_every = 2;
    const RunResult r = run(solver, solver.initialize(d.u0, d.p0), rc);
    CHECK(r.snapshots.size() == 4u);  // 0, 2, 4, 5
    CHECK(r.diagnostics.size() == 6u);
    CHECK(r.final_state.t == doctest::Approx(0.05));
    rc.snapshot_every = 0;
    CHECK(run(solver, solver.initialize(d.u0, d.p0), rc).snapshots.size() == 2u);
}
