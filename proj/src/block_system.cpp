#include "poro/block_system.hpp"

#include "poro/errors.hpp"

#include <algorithm>
#include <cmath>

namespace poro {

BlockSystem::BlockSystem(std::vector<std::string> names, std::vector<int> sizes)
    : names_(std::move(names)), sizes_(std::move(sizes)) {
    if (names_.size() != sizes_.size()) throw ValidationError("block system: names and sizes differ in length");
    offsets_.push_back(0);
    for (int s : sizes_) {
        if (s < 0) throw ValidationError("block system: negative block size");
        offsets_.push_back(offsets_.back() + s);
    }
}

void BlockSystem::add_block(int i, int j, const CsrMatrix& m, double scale) {
    if (i < 0 || j < 0 || i >= num_blocks() || j >= num_blocks()) throw ValidationError("block system: bad block index");
    if (m.rows() != sizes_[i] || m.cols() != sizes_[j]) {
        throw ValidationError("block system: block (" + names_[i] + ", " + names_[j] + ") has shape " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                              std::to_string(sizes_[i]) + "x" + std::to_string(sizes_[j]));
    }
    pieces_.push_back({i, j, m, scale});
}

void BlockSystem::add_constraint_rows(int block, const std::vector<Eigen::VectorXd>& rows) {
    for (const auto& r : rows) {
        if (r.size() != sizes_.at(block)) throw ValidationError("block system: constraint row length mismatch");
        constraints_.push_back({block, r});
    }
}

void BlockSystem::declare_kernel(int block, std::vector<Eigen::VectorXd> vecs, std::string missing) {
    for (const auto& v : vecs) {
        if (v.size() != sizes_.at(block)) throw ValidationError("block system: kernel vector length mismatch");
    }
    kernels_.push_back({block, std::move(vecs), std::move(missing)});
}

CsrMatrix BlockSystem::assemble() const {
    std::vector<Triplet> t;
    for (const auto& pc : pieces_) {
        const int r0 = offsets_[pc.i], c0 = offsets_[pc.j];
        for (int r = 0; r < pc.m.rows(); ++r) {
            for (int k = pc.m.row_ptr()[r]; k < pc.m.row_ptr()[r + 1]; ++k) {
                t.push_back({r0 + r, c0 + pc.m.col_idx()[k], pc.scale * pc.m.values()[k]});
            }
        }
    }
    const int base = offsets_.back();
    for (int m = 0; m < num_multipliers(); ++m) {
        const auto& c = constraints_[m];
        const int off = offsets_[c.block];
        for (int k = 0; k < c.row.size(); ++k) {
            if (c.row[k] == 0.0) continue;
            t.push_back({base + m, off + k, c.row[k]});
            t.push_back({off + k, base + m, c.row[k]});
        }
    }
    return CsrMatrix::from_triplets(size(), size(), std::move(t));
}

Eigen::VectorXd BlockSystem::join(const std::vector<Eigen::VectorXd>& parts) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
    if (parts.size() < sizes_.size()) throw ValidationError("block system: missing right-hand side blocks");
    for (int b = 0; b < num_blocks(); ++b) {
        if (parts[b].size() != sizes_[b]) {
            throw ValidationError("block system: right-hand side block '" + names_[b] + "' has wrong length");
        }
        x.segment(offsets_[b], sizes_[b]) = parts[b];
    }
    if (parts.size() > sizes_.size() && parts.back().size() == num_multipliers()) {
        x.tail(num_multipliers()) = parts.back();
    }
    return x;
}

std::vector<Eigen::VectorXd> BlockSystem::split(const Eigen::VectorXd& x) const {
    std::vector<Eigen::VectorXd> out;
    for (int b = 0; b < num_blocks(); ++b) out.push_back(x.segment(offsets_[b], sizes_[b]));
    out.push_back(x.tail(num_multipliers()));
    return out;
}

void BlockSystem::check_kernels(const CsrMatrix& assembled) const {
    for (const auto& ker : kernels_) {
        const bool constrained = std::any_of(constraints_.begin(), constraints_.end(),
                                             [&](const Constraint& c) { return c.block == ker.block; });
        if (constrained) continue;
        double scale = 0.0;
        for (double v : assembled.values()) scale = std::max(scale, std::abs(v));
        for (const auto& v : ker.vecs) {
            Eigen::VectorXd full = Eigen::VectorXd::Zero(size());
            full.segment(offsets_[ker.block], sizes_[ker.block]) = v;
            const double r = assembled.multiply(full).norm();
            if (r <= 1e-10 * scale * v.norm()) {
                throw SingularSystemError("singular system: block '" + names_[ker.block] +
                                          "' has an unconstrained kernel (" + ker.missing + ")");
            }
        }
    }
}

DirectSolver::DirectSolver(const BlockSystem& sys, LuOptions opts)
    : layout_(sys), matrix_(sys.assemble()) {
    layout_.check_kernels(matrix_);
    lu_ = std::make_unique<SparseLU>(matrix_, opts);
}

std::vector<Eigen::VectorXd> DirectSolver::solve(const std::vector<Eigen::VectorXd>& rhs,
                                                 double* relative_residual) const {
    return layout_.split(lu_->solve(layout_.join(rhs), relative_residual));
}

std::vector<Eigen::VectorXd> solve_direct(const BlockSystem& sys, const std::vector<Eigen::VectorXd>& rhs,
                                          double* relative_residual) {
    return DirectSolver(sys).solve(rhs, relative_residual);
}

}  // namespace poro
