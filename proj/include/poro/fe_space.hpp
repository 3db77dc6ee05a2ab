#pragma once

#include "poro/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>

namespace poro {

enum class SpaceKind { ScalarLinear, VectorLinear, VectorQuadratic };

/// Affine map data of one triangle.
struct CellGeometry {
    std::array<Eigen::Vector2d, 3> x;
    std::array<Eigen::Vector2d, 3> grad_lambda;  // gradients of barycentric coordinates
    double area = 0.0;

    Eigen::Vector2d point(const Eigen::Vector3d& bary) const {
        return bary(0) * x[0] + bary(1) * x[1] + bary(2) * x[2];
    }
};

CellGeometry cell_geometry(const Mesh& mesh, int c);

/// Lagrange basis values/gradients at a barycentric point. Linear uses the
/// first three entries; quadratic orders vertices then edges (0,1),(1,2),(2,0).
struct ShapeEval {
    std::array<double, 6> value{};
    std::array<Eigen::Vector2d, 6> grad{};
};

ShapeEval eval_linear(const CellGeometry& g, const Eigen::Vector3d& bary);
ShapeEval eval_quadratic(const CellGeometry& g, const Eigen::Vector3d& bary);

/// Lagrange space on a mesh. Vector spaces interleave components: dof =
/// 2*node + component. Quadratic nodes are the vertices followed by one
/// node per edge (index num_vertices + edge id).
class Space {
public:
    Space(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

    SpaceKind kind() const { return kind_; }
    const Mesh& mesh() const { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
    std::uint64_t id() const { return id_; }

    bool is_vector() const { return kind_ != SpaceKind::ScalarLinear; }
    bool is_quadratic() const { return kind_ == SpaceKind::VectorQuadratic; }
    int components() const { return is_vector() ? 2 : 1; }
    int num_nodes() const { return num_nodes_; }
    int num_dofs() const { return num_nodes_ * components(); }
    int nodes_per_cell() const { return is_quadratic() ? 6 : 3; }

    std::array<int, 6> cell_nodes(int c) const;
    Eigen::Vector2d node_coords(int node) const;

    ShapeEval eval(const CellGeometry& g, const Eigen::Vector3d& bary) const {
        return is_quadratic() ? eval_quadratic(g, bary) : eval_linear(g, bary);
    }

private:
    std::shared_ptr<const Mesh> mesh_;
    SpaceKind kind_;
    int num_nodes_ = 0;
    std::uint64_t id_ = 0;
};

/// Coefficient vector tagged with the space it belongs to.
struct FieldVec {
    std::uint64_t space_id = 0;
    Eigen::VectorXd values;

    FieldVec() = default;
    FieldVec(const Space& s) : space_id(s.id()), values(Eigen::VectorXd::Zero(s.num_dofs())) {}
    FieldVec(const Space& s, Eigen::VectorXd v);
};

}  // namespace poro
