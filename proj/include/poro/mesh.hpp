#pragma once

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace poro {

/// Side tags produced by the rectangle generators.
enum BoundaryTag : int { kBottom = 1, kRight = 2, kTop = 3, kLeft = 4 };

struct BoundaryEdge {
    std::array<int, 2> v;  // oriented so the domain lies to the left
    int tag = 0;
};

/// Conforming 2D triangulation. Immutable once constructed; the constructor
/// validates orientation, conformity and boundary coverage and derives the
/// edge table used by the quadratic element.
class Mesh {
public:
    Mesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<int, 3>> cells,
         std::vector<BoundaryEdge> boundary, int level = 0);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int level() const { return level_; }

    const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
    const Eigen::Vector2d& vertex(int i) const { return vertices_[i]; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }
    const std::array<int, 3>& cell(int c) const { return cells_[c]; }
    const std::vector<BoundaryEdge>& boundary() const { return boundary_; }

    /// Unique edges as sorted vertex pairs.
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    /// Global edge ids of local edges (v0,v1), (v1,v2), (v2,v0).
    const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }
    /// Global edge id of each boundary edge, parallel to boundary().
    int boundary_edge_id(int b) const { return boundary_edge_ids_[b]; }

    double cell_area(int c) const;
    double total_area() const;
    double max_edge_length() const;

    Eigen::Vector2d outward_normal(int b) const;
    double boundary_edge_length(int b) const;

    friend bool operator==(const Mesh& a, const Mesh& b);

private:
    std::vector<Eigen::Vector2d> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<BoundaryEdge> boundary_;
    int level_ = 0;

    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<int> boundary_edge_ids_;
};

/// Crossed triangulation of [x0,x1]x[y0,y1]: n x n squares, each split into
/// four triangles through its center.
Mesh crossed_rectangle_mesh(double x0, double x1, double y0, double y1, int n);
Mesh unit_square_mesh(int n);
Mesh centered_square_mesh(int n);

/// Red refinement: every triangle split into four through edge midpoints.
Mesh refine_uniform(const Mesh& m);

/// Plain-text mesh format with VERTICES / CELLS / BOUNDARY sections and '#'
/// comments. Coordinates are written with 17 significant digits.
void write_mesh(const Mesh& m, std::ostream& out);
void write_mesh(const Mesh& m, const std::filesystem::path& path);
Mesh read_mesh(std::istream& in, const std::string& source = "<stream>");
Mesh read_mesh(const std::filesystem::path& path);

}  // namespace poro
