#pragma once

#include "poro/csr.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace poro {

struct LuOptions {
    double pivot_tol = 1e-3;       // accept the diagonal if |a_kk| >= tol * max |a_ik|
    bool fill_reducing = true;     // AMD on the pattern of A + A^T
    int refine_steps = 3;
    double residual_limit = 1e-11; // post-solve relative residual check
    double singular_ratio = 1e-14; // min/max pivot magnitude below this is singular
};

struct PivotReport {
    double min_abs_pivot = 0.0;
    double max_abs_pivot = 0.0;
    int min_pivot_column = -1;
    int off_diagonal_pivots = 0;
    long nnz_l = 0;
    long nnz_u = 0;

    std::string summary() const;
};

/// Left-looking sparse LU with threshold partial pivoting (Gilbert-Peierls).
/// Unsymmetric matrices are fine; symmetric indefinite ones factor with the
/// diagonal preference keeping the symmetric ordering intact where possible.
class SparseLU {
public:
    explicit SparseLU(const CsrMatrix& A, LuOptions opts = {});

    int size() const { return n_; }
    const PivotReport& pivots() const { return report_; }

    /// Solve with iterative refinement; throws SolverError if the final
    /// relative residual exceeds the configured limit.
    Eigen::VectorXd solve(const Eigen::VectorXd& b, double* relative_residual = nullptr) const;
    /// One forward/backward substitution, no refinement or checks.
    Eigen::VectorXd substitute(const Eigen::VectorXd& b) const;

private:
    int n_ = 0;
    LuOptions opts_;
    CsrMatrix A_;
    std::vector<int> q_;     // column order
    std::vector<int> pinv_;  // row i of A is pivot row pinv[i]
    std::vector<int> lp_, li_, up_, ui_;
    std::vector<double> lx_, ux_;
    PivotReport report_;
};

}  // namespace poro
