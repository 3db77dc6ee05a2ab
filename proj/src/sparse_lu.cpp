#include "poro/sparse_lu.hpp"

#include "poro/errors.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include <cmath>
#include <numeric>
#include <sstream>

namespace poro {

std::string PivotReport::summary() const {
    std::ostringstream os;
    os << "pivots |min| = " << min_abs_pivot << " (column " << min_pivot_column << "), |max| = " << max_abs_pivot
       << ", off-diagonal pivots = " << off_diagonal_pivots << ", nnz(L) = " << nnz_l << ", nnz(U) = " << nnz_u;
    return os.str();
}

namespace {

// Column-compressed copy of A (the CSR arrays of A^T).
struct Csc {
    int n = 0;
    std::vector<int> p, i;
    std::vector<double> x;
};

Csc to_csc(const CsrMatrix& A) {
    const CsrMatrix t = A.transpose();
    return {A.cols(), t.row_ptr(), t.col_idx(), t.values()};
}

std::vector<int> amd_order(const CsrMatrix& A) {
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> s = A.to_eigen();
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    Eigen::AMDOrdering<int> amd;
    amd(s, perm);
    // perm maps new -> old position, so column k of the reordered matrix is perm(k)
    return std::vector<int>(perm.indices().data(), perm.indices().data() + perm.indices().size());
}

}  // namespace

SparseLU::SparseLU(const CsrMatrix& A, LuOptions opts) : n_(A.rows()), opts_(opts), A_(A) {
    if (A.rows() != A.cols()) throw ValidationError("sparse LU: matrix must be square");
    if (!A.all_finite()) throw SolverError("sparse LU: matrix has non-finite entries");
    const int n = n_;
    const Csc a = to_csc(A);

    if (opts_.fill_reducing && n > 0) {
        q_ = amd_order(A);
    } else {
        q_.resize(n);
        std::iota(q_.begin(), q_.end(), 0);
    }

    pinv_.assign(n, -1);
    lp_.assign(n + 1, 0);
    up_.assign(n + 1, 0);
    const std::size_t guess = 4 * a.i.size() + n;
    li_.reserve(guess);
    lx_.reserve(guess);
    ui_.reserve(guess);
    ux_.reserve(guess);

    std::vector<double> x(n, 0.0);
    std::vector<int> xi(n), stack(n), pstack(n), mark(n, -1);
    report_.min_abs_pivot = n > 0 ? INFINITY : 0.0;

    for (int k = 0; k < n; ++k) {
        lp_[k] = static_cast<int>(li_.size());
        up_[k] = static_cast<int>(ui_.size());
        const int col = q_[k];

        // reach: rows touched by L \ A(:,col), in topological order xi[top..n)
        int top = n;
        for (int p = a.p[col]; p < a.p[col + 1]; ++p) {
            const int start = a.i[p];
            if (mark[start] == k) continue;
            int head = 0;
            stack[0] = start;
            while (head >= 0) {
                const int j = stack[head];
                const int jnew = pinv_[j];
                if (mark[j] != k) {
                    mark[j] = k;
                    pstack[head] = jnew < 0 ? 0 : lp_[jnew] + 1;
                }
                bool done = true;
                const int pend = jnew < 0 ? 0 : lp_[jnew + 1];
                for (int q = pstack[head]; q < pend; ++q) {
                    const int i = li_[q];
                    if (mark[i] == k) continue;
                    pstack[head] = q;
                    stack[++head] = i;
                    done = false;
                    break;
                }
                if (done) {
                    --head;
                    xi[--top] = j;
                }
            }
        }

        // numeric sparse triangular solve
        for (int p = top; p < n; ++p) x[xi[p]] = 0.0;
        for (int p = a.p[col]; p < a.p[col + 1]; ++p) x[a.i[p]] = a.x[p];
        for (int p = top; p < n; ++p) {
            const int j = xi[p];
            const int J = pinv_[j];
            if (J < 0) continue;
            const double xj = x[j];
            for (int q = lp_[J] + 1; q < lp_[J + 1]; ++q) x[li_[q]] -= lx_[q] * xj;
        }

        // pivot choice
        int ipiv = -1;
        double amax = -1.0;
        for (int p = top; p < n; ++p) {
            const int i = xi[p];
            if (pinv_[i] < 0) {
                const double t = std::abs(x[i]);
                if (t > amax) {
                    amax = t;
                    ipiv = i;
                }
            } else {
                ui_.push_back(pinv_[i]);
                ux_.push_back(x[i]);
            }
        }
        if (ipiv < 0 || !(amax > 0.0)) {
            throw SingularSystemError("sparse LU: structurally or numerically singular at column " +
                                      std::to_string(col) + " (step " + std::to_string(k) + ")");
        }
        if (pinv_[col] < 0 && mark[col] == k && std::abs(x[col]) >= amax * opts_.pivot_tol) {
            ipiv = col;
        } else if (ipiv != col) {
            ++report_.off_diagonal_pivots;
        }
        const double pivot = x[ipiv];
        ui_.push_back(k);
        ux_.push_back(pivot);
        pinv_[ipiv] = k;
        li_.push_back(ipiv);
        lx_.push_back(1.0);
        for (int p = top; p < n; ++p) {
            const int i = xi[p];
            if (pinv_[i] < 0) {
                li_.push_back(i);
                lx_.push_back(x[i] / pivot);
            }
            x[i] = 0.0;
        }
        if (std::abs(pivot) < report_.min_abs_pivot) {
            report_.min_abs_pivot = std::abs(pivot);
            report_.min_pivot_column = col;
        }
        report_.max_abs_pivot = std::max(report_.max_abs_pivot, std::abs(pivot));
    }
    lp_[n] = static_cast<int>(li_.size());
    up_[n] = static_cast<int>(ui_.size());
    for (int& i : li_) i = pinv_[i];
    report_.nnz_l = static_cast<long>(li_.size());
    report_.nnz_u = static_cast<long>(ui_.size());

    if (n > 0 && report_.min_abs_pivot < opts_.singular_ratio * report_.max_abs_pivot) {
        throw SingularSystemError("sparse LU: numerically singular matrix; " + report_.summary());
    }
}

Eigen::VectorXd SparseLU::substitute(const Eigen::VectorXd& b) const {
    const int n = n_;
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x[pinv_[k]] = b[k];
    for (int j = 0; j < n; ++j) {  // unit lower, diagonal stored first
        const double xj = x[j];
        for (int p = lp_[j] + 1; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * xj;
    }
    for (int j = n - 1; j >= 0; --j) {  // upper, diagonal stored last
        x[j] /= ux_[up_[j + 1] - 1];
        const double xj = x[j];
        for (int p = up_[j]; p < up_[j + 1] - 1; ++p) x[ui_[p]] -= ux_[p] * xj;
    }
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) out[q_[k]] = x[k];
    return out;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b, double* relative_residual) const {
    if (b.size() != n_) throw ValidationError("sparse LU solve: size mismatch");
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        if (relative_residual) *relative_residual = 0.0;
        return Eigen::VectorXd::Zero(n_);
    }
    Eigen::VectorXd x = substitute(b);
    Eigen::VectorXd r = b - A_.multiply(x);
    double rel = r.norm() / bnorm;
    for (int it = 0; it < opts_.refine_steps && rel > 1e-15; ++it) {
        const Eigen::VectorXd x_new = x + substitute(r);
        const Eigen::VectorXd r_new = b - A_.multiply(x_new);
        const double rel_new = r_new.norm() / bnorm;
        if (!(rel_new < rel)) break;
        x = x_new;
        r = r_new;
        rel = rel_new;
    }
    if (relative_residual) *relative_residual = rel;
    if (!std::isfinite(rel) || rel > opts_.residual_limit) {
        throw SolverError("sparse LU: relative residual " + std::to_string(rel) + " above limit; " +
                          report_.summary());
    }
    return x;
}

}  // namespace poro
