#include "poro/csr.hpp"

#include "poro/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace poro {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
    if (rows < 0 || cols < 0) throw ValidationError("csr: negative shape");
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw ValidationError("csr: triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                  ") out of range");
        }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    for (std::size_t k = 0; k < triplets.size();) {
        const int r = triplets[k].row, c = triplets[k].col;
        double s = 0.0;
        for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) s += triplets[k].value;
        m.col_idx_.push_back(c);
        m.values_.push_back(s);
        ++m.row_ptr_[r + 1];
    }
    for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

CsrMatrix CsrMatrix::identity(int n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
}

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& a, double drop) {
    std::vector<Triplet> t;
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (std::abs(a(i, j)) > drop) t.push_back({i, j, a(i, j)});
        }
    }
    return from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()), std::move(t));
}

double CsrMatrix::coeff(int r, int c) const {
    auto first = col_idx_.begin() + row_ptr_[r];
    auto last = col_idx_.begin() + row_ptr_[r + 1];
    auto it = std::lower_bound(first, last, c);
    return (it != last && *it == c) ? values_[it - col_idx_.begin()] : 0.0;
}

Eigen::VectorXd CsrMatrix::multiply(const Eigen::VectorXd& x) const {
    if (x.size() != cols_) throw ValidationError("csr multiply: size mismatch");
    Eigen::VectorXd y(rows_);
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
        y[r] = s;
    }
    return y;
}

Eigen::VectorXd CsrMatrix::multiply_transpose(const Eigen::VectorXd& x) const {
    if (x.size() != rows_) throw ValidationError("csr multiply_transpose: size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) y[col_idx_[k]] += values_[k] * x[r];
    }
    return y;
}

CsrMatrix CsrMatrix::transpose() const {
    CsrMatrix t(cols_, rows_);
    t.col_idx_.resize(values_.size());
    t.values_.resize(values_.size());
    for (int c : col_idx_) ++t.row_ptr_[c + 1];
    for (int r = 0; r < cols_; ++r) t.row_ptr_[r + 1] += t.row_ptr_[r];
    std::vector<int> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const int dst = next[col_idx_[k]]++;
            t.col_idx_[dst] = r;
            t.values_[dst] = values_[k];
        }
    }
    return t;
}

CsrMatrix CsrMatrix::scaled(double s) const {
    CsrMatrix m = *this;
    for (double& v : m.values_) v *= s;
    return m;
}

Eigen::VectorXd CsrMatrix::diagonal() const {
    Eigen::VectorXd d(std::min(rows_, cols_));
    for (int i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
    return d;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) a(r, col_idx_[k]) = values_[k];
    }
    return a;
}

Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.emplace_back(r, col_idx_[k], values_[k]);
    }
    Eigen::SparseMatrix<double> s(rows_, cols_);
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

bool CsrMatrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    const CsrMatrix t = transpose();
    if (t.col_idx_ != col_idx_) return false;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (std::abs(values_[k] - t.values_[k]) > tol) return false;
    }
    return true;
}

bool CsrMatrix::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

CsrMatrix add(const CsrMatrix& A, const CsrMatrix& B, double a, double b) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw ValidationError("csr add: shape mismatch");
    std::vector<Triplet> t;
    t.reserve(A.nnz() + B.nnz());
    for (auto [m, s] : {std::pair{&A, a}, std::pair{&B, b}}) {
        for (int r = 0; r < m->rows(); ++r) {
            for (int k = m->row_ptr()[r]; k < m->row_ptr()[r + 1]; ++k) {
                t.push_back({r, m->col_idx()[k], s * m->values()[k]});
            }
        }
    }
    return CsrMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

}  // namespace poro
