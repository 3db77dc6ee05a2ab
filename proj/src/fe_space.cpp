#include "poro/fe_space.hpp"

#include "poro/errors.hpp"

#include <atomic>

namespace poro {

CellGeometry cell_geometry(const Mesh& mesh, int c) {
    CellGeometry g;
    const auto& t = mesh.cell(c);
    for (int k = 0; k < 3; ++k) g.x[k] = mesh.vertex(t[k]);
    const Eigen::Vector2d e1 = g.x[1] - g.x[0];
    const Eigen::Vector2d e2 = g.x[2] - g.x[0];
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    g.area = 0.5 * det;
    // grad lambda_k is the inward normal of the opposite edge over 2*area
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d& a = g.x[(k + 1) % 3];
        const Eigen::Vector2d& b = g.x[(k + 2) % 3];
        g.grad_lambda[k] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / det;
    }
    return g;
}

ShapeEval eval_linear(const CellGeometry& g, const Eigen::Vector3d& bary) {
    ShapeEval s;
    for (int k = 0; k < 3; ++k) {
        s.value[k] = bary(k);
        s.grad[k] = g.grad_lambda[k];
    }
    return s;
}

ShapeEval eval_quadratic(const CellGeometry& g, const Eigen::Vector3d& bary) {
    ShapeEval s;
    const auto& L = bary;
    const auto& dL = g.grad_lambda;
    for (int k = 0; k < 3; ++k) {
        s.value[k] = L(k) * (2.0 * L(k) - 1.0);
        s.grad[k] = (4.0 * L(k) - 1.0) * dL[k];
    }
    for (int k = 0; k < 3; ++k) {
        const int i = k, j = (k + 1) % 3;
        s.value[3 + k] = 4.0 * L(i) * L(j);
        s.grad[3 + k] = 4.0 * (L(j) * dL[i] + L(i) * dL[j]);
    }
    return s;
}

namespace {
std::atomic<std::uint64_t> next_space_id{1};
}

Space::Space(std::shared_ptr<const Mesh> mesh, SpaceKind kind) : mesh_(std::move(mesh)), kind_(kind) {
    if (!mesh_) throw ValidationError("space: null mesh");
    num_nodes_ = mesh_->num_vertices() + (is_quadratic() ? mesh_->num_edges() : 0);
    id_ = next_space_id++;
}

std::array<int, 6> Space::cell_nodes(int c) const {
    const auto& t = mesh_->cell(c);
    std::array<int, 6> out{t[0], t[1], t[2], -1, -1, -1};
    if (is_quadratic()) {
        const auto& e = mesh_->cell_edges(c);
        for (int k = 0; k < 3; ++k) out[3 + k] = mesh_->num_vertices() + e[k];
    }
    return out;
}

Eigen::Vector2d Space::node_coords(int node) const {
    const int nv = mesh_->num_vertices();
    if (node < nv) return mesh_->vertex(node);
    const auto& e = mesh_->edges()[node - nv];
    return 0.5 * (mesh_->vertex(e[0]) + mesh_->vertex(e[1]));
}

FieldVec::FieldVec(const Space& s, Eigen::VectorXd v) : space_id(s.id()), values(std::move(v)) {
    if (values.size() != s.num_dofs()) throw ValidationError("field length does not match space dof count");
}

}  // namespace poro
