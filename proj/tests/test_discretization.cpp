#include "poro/assembly.hpp"
#include "poro/errors.hpp"
#include "poro/fe_space.hpp"
#include "poro/mesh.hpp"
#include "poro/stability.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>

using namespace poro;
using doctest::Approx;
using Eigen::Vector2d;

namespace {

std::shared_ptr<const Mesh> make(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

Eigen::VectorXd random_vec(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = U(rng);
    return v;
}

}  // namespace

TEST_CASE("dof counts and cell maps") {
    auto mesh = make(unit_square_mesh(2));
    const Space s(mesh, SpaceKind::ScalarLinear), u(mesh, SpaceKind::VectorQuadratic), v(mesh, SpaceKind::VectorLinear);
    CHECK(s.num_dofs() == mesh->num_vertices());
    CHECK(u.num_dofs() == 2 * (mesh->num_vertices() + mesh->num_edges()));
    CHECK(v.num_dofs() == 2 * mesh->num_vertices());
    CHECK(s.id() != u.id());
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const auto nodes = u.cell_nodes(c);
        CHECK(std::set<int>(nodes.begin(), nodes.end()).size() == 6u);
    }
    CHECK_THROWS_AS(FieldVec(s, Eigen::VectorXd::Zero(3)), ValidationError);
}

TEST_CASE("linear mass matrix on one triangle") {
    const Vector2d a(0.2, 0.1), b(1.3, 0.4), c(0.5, 1.7);
    auto mesh = make(Mesh({a, b, c}, {{0, 1, 2}}, {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 0}, 1}}));
    const double A = mesh->cell_area(0);
    const Eigen::MatrixXd M = assemble_mass(Space(mesh, SpaceKind::ScalarLinear)).to_dense();
    Eigen::Matrix3d want;
    want << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    want *= A / 12;
    CHECK((M - want).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("mass matrix properties") {
    auto mesh = make(unit_square_mesh(2));
    for (SpaceKind k : {SpaceKind::ScalarLinear, SpaceKind::VectorQuadratic}) {
        const Space sp(mesh, k);
        const CsrMatrix M = assemble_mass(sp);
        CHECK(M.is_symmetric());
        const Eigen::MatrixXd D = M.to_dense();
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D).eigenvalues().minCoeff() > 0);
        if (k == SpaceKind::ScalarLinear) {
            const Eigen::VectorXd one = Eigen::VectorXd::Ones(sp.num_dofs());
            CHECK(std::abs(M.quadratic_form(one) - 1.0) <= 1e-14);
        } else {
            const auto rm = rm_basis(sp);
            CHECK(std::abs(M.quadratic_form(rm[0]) - 1.0) <= 1e-14);
        }
    }
}

TEST_CASE("vector stiffness kernel and values") {
    auto mesh = make(unit_square_mesh(2));
    const Space u(mesh, SpaceKind::VectorQuadratic), s(mesh, SpaceKind::ScalarLinear);
    const double mu = 1.7;
    const CsrMatrix A = assemble_vector_stiffness(u, mu);
    CHECK(A.is_symmetric());
    const auto rm = rm_basis(u);
    const CsrMatrix B = assemble_divergence(u, s);
    for (const auto& r : rm) {
        CHECK(std::abs(A.quadratic_form(r)) <= 1e-13);
        CHECK((A * r).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((B * r).cwiseAbs().maxCoeff() <= 1e-13);
    }
    const Eigen::VectorXd ux = interpolate(u, VectorFn([](const Vector2d& x) { return Vector2d(x.x(), 0.0); }));
    CHECK(A.quadratic_form(ux) == Approx(mu).epsilon(1e-13));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A.to_dense());
    lu.setThreshold(1e-10);
    CHECK(A.rows() - lu.rank() == 3);
    Eigen::Matrix3d gram;
    const CsrMatrix M = assemble_mass(u);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gram(i, j) = rm[i].dot(M * rm[j]);
    CHECK(std::abs(gram.determinant()) > 1e-6);
}

TEST_CASE("divergence operator") {
    auto mesh = make(centered_square_mesh(3));
    const Space u(mesh, SpaceKind::VectorQuadratic), s(mesh, SpaceKind::ScalarLinear);
    const CsrMatrix B = assemble_divergence(u, s);
    CHECK(B.rows() == s.num_dofs());
    CHECK(B.cols() == u.num_dofs());
    const Eigen::VectorXd c = interpolate(u, VectorFn([](const Vector2d&) { return Vector2d(1.0, 0.0); }));
    CHECK((B * c).cwiseAbs().maxCoeff() <= 1e-14);
    const Eigen::VectorXd d = interpolate(u, VectorFn([](const Vector2d& x) { return x; }));
    const Eigen::VectorXd row_sums = assemble_mass(s) * Eigen::VectorXd::Ones(s.num_dofs());
    CHECK(((B * d) - 2.0 * row_sums).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("discrete Gauss theorem for random displacements") {
    auto mesh = make(centered_square_mesh(3));
    const Space u(mesh, SpaceKind::VectorQuadratic), s(mesh, SpaceKind::ScalarLinear);
    const CsrMatrix B = assemble_divergence(u, s);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(s.num_dofs());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::VectorXd v = random_vec(u.num_dofs(), seed);
        CHECK(std::abs(one.dot(B * v) - boundary_normal_flux(u, v)) <= 1e-13);
    }
}

TEST_CASE("diffusion operator") {
    auto mesh = make(unit_square_mesh(3));
    const Space s(mesh, SpaceKind::ScalarLinear);
    const double mu_f = 2.0;
    const CsrMatrix D = assemble_diffusion(s, Eigen::Matrix2d::Identity(), mu_f);
    CHECK(D.is_symmetric());
    CHECK(std::abs(D.quadratic_form(Eigen::VectorXd::Ones(s.num_dofs()))) <= 1e-14);
    const Eigen::VectorXd px = interpolate(s, ScalarFn([](const Vector2d& x) { return x.x(); }));
    CHECK(D.quadratic_form(px) == Approx(1.0 / mu_f).epsilon(1e-14));
    const CsrMatrix D2 = assemble_diffusion(s, 2.0 * Eigen::Matrix2d::Identity(), mu_f);
    const Eigen::VectorXd r = random_vec(s.num_dofs(), 3);
    CHECK(D2.quadratic_form(r) == Approx(2.0 * D.quadratic_form(r)).epsilon(1e-14));
    Eigen::Matrix2d K;
    K << 3, 1, 1, 2;
    const CsrMatrix DK = assemble_diffusion(s, K, 1.0);
    CHECK(DK.is_symmetric());
    // Spectral sandwich against the K = I operator.
    const double k1 = (5 - std::sqrt(5.0)) / 2, k2 = (5 + std::sqrt(5.0)) / 2;
    const CsrMatrix D1 = assemble_diffusion(s, Eigen::Matrix2d::Identity(), 1.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::VectorXd v = random_vec(s.num_dofs(), seed);
        CHECK(DK.quadratic_form(v) >= k1 * D1.quadratic_form(v) * (1 - 1e-12));
        CHECK(DK.quadratic_form(v) <= k2 * D1.quadratic_form(v) * (1 + 1e-12));
    }
    K << 1, 2, 2, 1;
    CHECK_THROWS_AS(assemble_diffusion(s, K, 1.0), ValidationError);
    K << 1, 0.5, 0.4, 1;
    CHECK_THROWS_AS(assemble_diffusion(s, K, 1.0), ValidationError);
    // Per-cell tensors reduce to the constant case.
    const CsrMatrix Dc = assemble_diffusion(s, CellTensorFn([](int) { return Eigen::Matrix2d::Identity().eval(); }), mu_f);
    CHECK((Dc.to_dense() - D.to_dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gravity load") {
    auto mesh = make(unit_square_mesh(3));
    const Space s(mesh, SpaceKind::ScalarLinear);
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    CHECK(assemble_gravity_load(s, I, 1.0, 1.0, Vector2d::Zero()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd L = assemble_gravity_load(s, I, 2.0, 1.0, Vector2d(0, -1));
    CHECK(std::abs(L.sum()) <= 1e-15);
    const Eigen::VectorXd y = interpolate(s, ScalarFn([](const Vector2d& x) { return x.y(); }));
    CHECK(L.dot(y) == Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("load vectors") {
    auto mesh = make(unit_square_mesh(3));
    const Space s(mesh, SpaceKind::ScalarLinear), u(mesh, SpaceKind::VectorQuadratic);
    CHECK(assemble_body_load(u, [](const Vector2d&) { return Vector2d::Zero().eval(); }).norm() == 0.0);
    CHECK(assemble_source(s, [](const Vector2d&) { return 1.0; }).sum() == Approx(1.0).epsilon(1e-14));
    CHECK(assemble_flux(s, [](const Vector2d&, const Vector2d&, int) { return 1.0; }).sum() ==
          Approx(4.0).epsilon(1e-14));
    // Flux restricted to one tag covers one side only.
    CHECK(assemble_flux(s, [](const Vector2d&, const Vector2d&, int tag) { return tag == kTop ? 1.0 : 0.0; }).sum() ==
          Approx(1.0).epsilon(1e-14));
    const auto rm = rm_basis(u);
    const Eigen::VectorXd F = assemble_body_load(u, [](const Vector2d&) { return Vector2d(0, -1); });
    CHECK(F.dot(rm[1]) == Approx(-1.0).epsilon(1e-14));
    const Eigen::VectorXd T =
        assemble_traction(u, [](const Vector2d&, const Vector2d& n, int) { return n.eval(); });
    CHECK(std::abs(T.dot(rm[0])) <= 1e-14);
}

TEST_CASE("nonlinear load pairing with symmetric and full gradients agree") {
    auto mesh = make(centered_square_mesh(3));
    const Space u(mesh, SpaceKind::VectorQuadratic);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Eigen::VectorXd v = 0.1 * random_vec(u.num_dofs(), seed);
        for (bool nl_only : {true, false}) {
            const Eigen::VectorXd a = assemble_stress_load(u, v, 1.3, 0.7, StressPairing::SymmetricGradient, nl_only);
            const Eigen::VectorXd b = assemble_stress_load(u, v, 1.3, 0.7, StressPairing::FullGradient, nl_only);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff()));
        }
    }
    // The full load minus the nonlinear part is the linear stiffness action.
    const Eigen::VectorXd v = 0.1 * random_vec(u.num_dofs(), 9);
    const Eigen::VectorXd full = assemble_stress_load(u, v, 1.3, 0.7, StressPairing::SymmetricGradient, false);
    const Eigen::VectorXd nl = assemble_stress_load(u, v, 1.3, 0.7, StressPairing::SymmetricGradient, true);
    CHECK((full - nl - assemble_vector_stiffness(u, 1.3) * v).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("interpolation reproduces the discrete spaces") {
    auto mesh = make(centered_square_mesh(2));
    const Space u(mesh, SpaceKind::VectorQuadratic), s(mesh, SpaceKind::ScalarLinear);
    auto q = [](const Vector2d& x) { return Vector2d(x.x() * x.y() + 1, x.y() * x.y() - x.x()); };
    const Eigen::VectorXd c = interpolate(u, VectorFn(q));
    CHECK(l2_error(u, c, VectorFn(q)) <= 1e-15);
    auto gq = [](const Vector2d& x) {
        Eigen::Matrix2d G;
        G << x.y(), x.x(), -1, 2 * x.y();
        return G;
    };
    CHECK(h1_seminorm_error(u, c, TensorFn(gq)) <= 1e-14);
    auto lin = [](const Vector2d& x) { return 0.3 + x.x() - 2 * x.y(); };
    CHECK(l2_error(s, interpolate(s, ScalarFn(lin)), ScalarFn(lin)) <= 1e-15);
    CHECK(max_gradient_norm(u, c) > 0);
}

TEST_CASE("inf-sup estimate for the chosen pair is positive and mesh stable") {
    auto m2 = make(unit_square_mesh(2)), m4 = make(unit_square_mesh(4));
    const Space u2(m2, SpaceKind::VectorQuadratic), s2(m2, SpaceKind::ScalarLinear);
    const Space u4(m4, SpaceKind::VectorQuadratic), s4(m4, SpaceKind::ScalarLinear);
    const double b2 = infsup_estimate(u2, s2, rm_basis(u2));
    const double b4 = infsup_estimate(u4, s4, rm_basis(u4));
    MESSAGE("inf-sup: n=2 ", b2, ", n=4 ", b4);
    CHECK(b2 > 0.2);
    CHECK(std::abs(b4 - b2) <= 0.2 * b2);
}

TEST_CASE("equal-order linear pair is not inf-sup stable") {
    std::vector<double> beta;
    for (int n : {2, 4, 8}) {
        auto m = make(unit_square_mesh(n));
        const Space u(m, SpaceKind::VectorLinear), s(m, SpaceKind::ScalarLinear);
        beta.push_back(infsup_estimate(u, s, rm_basis(u)));
    }
    MESSAGE("linear/linear inf-sup: ", beta[0], " ", beta[1], " ", beta[2]);
    // Crossed meshes carry a spurious pressure mode for this pair.
    for (double b : beta) CHECK(b <= 1e-6);
}

TEST_CASE("Korn quotient is positive and mesh stable") {
    auto m2 = make(centered_square_mesh(2)), m4 = make(centered_square_mesh(4));
    const KornEstimate k2 = korn_estimate(Space(m2, SpaceKind::VectorQuadratic));
    const KornEstimate k4 = korn_estimate(Space(m4, SpaceKind::VectorQuadratic));
    MESSAGE("Korn quotient: ", k2.quotient, " ", k4.quotient);
    CHECK(k2.quotient > 0);
    CHECK(k4.quotient > 0);
    CHECK(std::abs(k4.quotient - k2.quotient) <= 0.2 * k2.quotient);
    CHECK(k2.c1 > 0);
    CHECK(k2.c2 >= 1.0);
}
