#include "poro/stability.hpp"

#include "poro/assembly.hpp"
#include "poro/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace poro {

namespace {

// Orthonormal basis of the null space of the rows of C.
Eigen::MatrixXd null_basis(const Eigen::MatrixXd& C) {
    const int n = static_cast<int>(C.cols());
    const int m = static_cast<int>(C.rows());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C.transpose());
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return Q.rightCols(n - m);
}

double min_generalized_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const char* what) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw SolverError(std::string(what) + ": generalized eigenproblem failed");
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd rm_constraint_rows(const Eigen::MatrixXd& mass_u, const std::array<Eigen::VectorXd, 3>& rm) {
    Eigen::MatrixXd R(3, mass_u.cols());
    for (int k = 0; k < 3; ++k) R.row(k) = (mass_u * rm[k]).transpose();
    return R;
}

}  // namespace

double infsup_estimate(const Space& space_u, const Space& space_s, const std::array<Eigen::VectorXd, 3>& rm) {
    const Eigen::MatrixXd Mu = assemble_mass(space_u).to_dense();
    const Eigen::MatrixXd H = assemble_h1_gram(space_u).to_dense();
    const Eigen::MatrixXd B = assemble_divergence(space_u, space_s).to_dense();
    const Eigen::MatrixXd Mp = assemble_mass(space_s).to_dense();

    const Eigen::MatrixXd Z = null_basis(rm_constraint_rows(Mu, rm));
    const Eigen::MatrixXd Y = null_basis((Mp * Eigen::VectorXd::Ones(Mp.rows())).transpose());

    const Eigen::MatrixXd Hz = Z.transpose() * H * Z;
    const Eigen::MatrixXd Bz = Y.transpose() * B * Z;
    const Eigen::LLT<Eigen::MatrixXd> llt(Hz);
    if (llt.info() != Eigen::Success) throw SolverError("inf-sup: H1 Gram matrix not positive definite");
    const Eigen::MatrixXd S = Bz * llt.solve(Bz.transpose());
    const Eigen::MatrixXd Sy = 0.5 * (S + S.transpose());
    const Eigen::MatrixXd My = Y.transpose() * Mp * Y;
    const double lam = min_generalized_eig(Sy, 0.5 * (My + My.transpose()), "inf-sup");
    return std::sqrt(std::max(0.0, lam));
}

KornEstimate korn_estimate(const Space& space_u) {
    const Eigen::MatrixXd Mu = assemble_mass(space_u).to_dense();
    const Eigen::MatrixXd Ae = assemble_vector_stiffness(space_u, 1.0).to_dense();
    const Eigen::MatrixXd Ag = assemble_gradient_gram(space_u).to_dense();
    const Eigen::MatrixXd Z = null_basis(rm_constraint_rows(Mu, rm_basis(space_u)));
    const Eigen::MatrixXd Aez = Z.transpose() * Ae * Z;
    const Eigen::MatrixXd Agz = Z.transpose() * Ag * Z;
    const Eigen::MatrixXd Mz = Z.transpose() * Mu * Z;
    KornEstimate k;
    k.quotient = std::sqrt(std::max(0.0, min_generalized_eig(Aez, Mz + Agz, "korn")));
    k.c2 = 1.0 / std::sqrt(min_generalized_eig(Aez, Agz, "korn"));
    k.c1 = 1.0 / std::sqrt(min_generalized_eig(Aez, Mz, "korn"));
    return k;
}

}  // namespace poro
