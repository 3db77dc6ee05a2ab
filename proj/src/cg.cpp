#include "poro/cg.hpp"

#include "poro/errors.hpp"

#include <cmath>
#include <string>

namespace poro {

namespace {

void remove_mean(Eigen::VectorXd& v) {
    if (v.size() > 0) v.array() -= v.mean();
}

}  // namespace

CgResult solve_cg(const CsrMatrix& A, const Eigen::VectorXd& b, const CgOptions& opts) {
    const int n = A.rows();
    if (A.cols() != n || b.size() != n) throw ValidationError("cg: size mismatch");
    const int maxit = opts.maxit > 0 ? opts.maxit : 10 * n + 10;

    Eigen::VectorXd rhs = b;
    if (opts.deflate_constants) remove_mean(rhs);
    CgResult res;
    res.x = Eigen::VectorXd::Zero(n);
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) return res;

    Eigen::VectorXd dinv = Eigen::VectorXd::Ones(n);
    if (opts.jacobi) {
        const Eigen::VectorXd d = A.diagonal();
        for (int i = 0; i < n; ++i) {
            if (!(d[i] > 0.0)) throw SolverError("cg: Jacobi preconditioner needs a positive diagonal");
            dinv[i] = 1.0 / d[i];
        }
    }
    auto precond = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd z = dinv.cwiseProduct(r);
        if (opts.deflate_constants) remove_mean(z);
        return z;
    };

    Eigen::VectorXd r = rhs;
    Eigen::VectorXd z = precond(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    double rel = 1.0;
    for (int it = 1; it <= maxit; ++it) {
        const Eigen::VectorXd Ap = A.multiply(p);
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) throw SolverError("cg: matrix not positive definite (p'Ap = " + std::to_string(pAp) + ")");
        const double alpha = rz / pAp;
        res.x += alpha * p;
        r -= alpha * Ap;
        if (opts.deflate_constants) remove_mean(r);
        rel = r.norm() / bnorm;
        res.iterations = it;
        if (rel <= opts.tol) {
            if (opts.deflate_constants) remove_mean(res.x);
            res.relative_residual = rel;
            return res;
        }
        z = precond(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw SolverError("cg: no convergence after " + std::to_string(maxit) +
                      " iterations, relative residual " + std::to_string(rel));
}

}  // namespace poro
