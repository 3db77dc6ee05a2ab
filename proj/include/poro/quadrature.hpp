#pragma once

#include <Eigen/Core>

#include <vector>

namespace poro {

/// Triangle rule in barycentric coordinates; weights sum to 1 so that
/// sum_q w_q f(x_q) * area approximates the integral.
struct QuadRule {
    std::vector<Eigen::Vector3d> points;
    std::vector<double> weights;
    int degree = 0;
};

/// Gauss rule on [0, 1]; weights sum to 1.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;
};

/// Rules for degree 1, 2 and 4. Throws for anything else.
const QuadRule& triangle_rule(int degree = 4);

/// Three-point Gauss-Legendre, exact to degree 5.
const LineRule& edge_rule();

}  // namespace poro
