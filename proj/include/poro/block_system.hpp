#pragma once

#include "poro/csr.hpp"
#include "poro/sparse_lu.hpp"

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace poro {

/// Block-structured square system. Blocks are placed by (row, col) block
/// index; dense constraint rows C attached to a block add multiplier
/// unknowns at the end, contributing C^T to that block column of rows and C
/// as new rows.
class BlockSystem {
public:
    BlockSystem(std::vector<std::string> names, std::vector<int> sizes);

    int num_blocks() const { return static_cast<int>(sizes_.size()); }
    int block_size(int b) const { return sizes_.at(b); }
    int block_offset(int b) const { return offsets_.at(b); }
    const std::string& block_name(int b) const { return names_.at(b); }
    int num_multipliers() const { return static_cast<int>(constraints_.size()); }
    int size() const { return offsets_.back() + num_multipliers(); }

    /// Accumulates scale * m into block (i, j).
    void add_block(int i, int j, const CsrMatrix& m, double scale = 1.0);
    void add_constraint_rows(int block, const std::vector<Eigen::VectorXd>& rows);
    /// Vectors the block's operator is known to annihilate; a factorization
    /// without constraint rows on that block is refused with `missing`.
    void declare_kernel(int block, std::vector<Eigen::VectorXd> vecs, std::string missing);

    CsrMatrix assemble() const;
    Eigen::VectorXd join(const std::vector<Eigen::VectorXd>& parts) const;
    /// Per-block pieces followed by the multiplier vector.
    std::vector<Eigen::VectorXd> split(const Eigen::VectorXd& x) const;

    /// Throws SingularSystemError if a declared kernel is left unconstrained.
    void check_kernels(const CsrMatrix& assembled) const;

private:
    struct Piece {
        int i, j;
        CsrMatrix m;
        double scale;
    };
    struct Constraint {
        int block;
        Eigen::VectorXd row;
    };
    struct Kernel {
        int block;
        std::vector<Eigen::VectorXd> vecs;
        std::string missing;
    };

    std::vector<std::string> names_;
    std::vector<int> sizes_;
    std::vector<int> offsets_;
    std::vector<Piece> pieces_;
    std::vector<Constraint> constraints_;
    std::vector<Kernel> kernels_;
};

/// Factorized block system, reusable for many right-hand sides.
class DirectSolver {
public:
    explicit DirectSolver(const BlockSystem& sys, LuOptions opts = {});

    std::vector<Eigen::VectorXd> solve(const std::vector<Eigen::VectorXd>& rhs, double* relative_residual = nullptr) const;
    const PivotReport& pivots() const { return lu_->pivots(); }
    const CsrMatrix& matrix() const { return matrix_; }

private:
    BlockSystem layout_;
    CsrMatrix matrix_;
    std::unique_ptr<SparseLU> lu_;
};

/// One-shot convenience: factor and solve.
std::vector<Eigen::VectorXd> solve_direct(const BlockSystem& sys, const std::vector<Eigen::VectorXd>& rhs,
                                          double* relative_residual = nullptr);

}  // namespace poro
