#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace poro {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix with sorted, duplicate-free columns.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

    /// Duplicates are summed in insertion order, so the result does not
    /// depend on anything but the triplet sequence.
    static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static CsrMatrix identity(int n);
    static CsrMatrix from_dense(const Eigen::MatrixXd& a, double drop = 0.0);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    double coeff(int r, int c) const;

    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return multiply(x); }
    /// A^T x without forming the transpose.
    Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& x) const;
    double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(multiply(x)); }

    CsrMatrix transpose() const;
    CsrMatrix scaled(double s) const;
    Eigen::VectorXd diagonal() const;
    Eigen::MatrixXd to_dense() const;
    Eigen::SparseMatrix<double> to_eigen() const;

    /// Exact entrywise symmetry when tol = 0.
    bool is_symmetric(double tol = 0.0) const;
    bool all_finite() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// a*A + b*B for matrices of equal shape.
CsrMatrix add(const CsrMatrix& A, const CsrMatrix& B, double a = 1.0, double b = 1.0);

}  // namespace poro
