#pragma once

#include "poro/csr.hpp"

#include <Eigen/Core>

namespace poro {

struct CgOptions {
    double tol = 1e-12;            // relative residual target
    int maxit = 0;                 // 0 means 10 * n
    bool jacobi = true;
    bool deflate_constants = false; // project out the constant vector (singular Neumann operators)
};

struct CgResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for SPD matrices (SPD on the
/// complement of the constants when deflating). Throws SolverError with the
/// final residual when the iteration limit is hit.
CgResult solve_cg(const CsrMatrix& A, const Eigen::VectorXd& b, const CgOptions& opts = {});

}  // namespace poro
