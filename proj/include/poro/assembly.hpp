#pragma once

#include "poro/csr.hpp"
#include "poro/fe_space.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>

namespace poro {

using ScalarFn = std::function<double(const Eigen::Vector2d&)>;
using VectorFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;
using TensorFn = std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>;
/// Boundary data sees the point, the outward unit normal and the edge tag.
using BoundaryScalarFn = std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&, int)>;
using BoundaryVectorFn = std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&, int)>;
/// Per-cell permeability, the hook for heterogeneous media.
using CellTensorFn = std::function<Eigen::Matrix2d(int)>;

/// Visit every volume quadrature point: (cell, geometry, x, weight*area, shapes).
using QuadVisitor =
    std::function<void(int, const CellGeometry&, const Eigen::Vector2d&, double, const ShapeEval&)>;
void for_each_quad_point(const Space& space, const QuadVisitor& visit, int degree = 4);

/// Value and gradient of a discrete field from precomputed shapes.
double scalar_value(const Space& s, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                    const ShapeEval& sh);
Eigen::Vector2d scalar_gradient(const Space& s, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                                const ShapeEval& sh);
Eigen::Vector2d vector_value(const Space& u, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                             const ShapeEval& sh);
/// G(i, j) = d u_i / d x_j.
Eigen::Matrix2d vector_gradient(const Space& u, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                                const ShapeEval& sh);

CsrMatrix assemble_mass(const Space& space);
/// mu * (eps(u), eps(v)).
CsrMatrix assemble_vector_stiffness(const Space& space_u, double mu);
/// (grad u, grad v) for scalar or vector spaces.
CsrMatrix assemble_gradient_gram(const Space& space);
/// Full H1 inner product: mass + gradient gram.
CsrMatrix assemble_h1_gram(const Space& space);
/// Rows are scalar test functions: B(a, i) = (phi_a, div v_i).
CsrMatrix assemble_divergence(const Space& space_u, const Space& space_s);
/// (1/mu_f) (K grad p, grad psi). Rejects non-SPD K.
CsrMatrix assemble_diffusion(const Space& space_s, const Eigen::Matrix2d& K, double mu_f);
CsrMatrix assemble_diffusion(const Space& space_s, const CellTensorFn& K, double mu_f);

/// (1/mu_f) (K rho_f g, grad psi).
Eigen::VectorXd assemble_gravity_load(const Space& space_s, const Eigen::Matrix2d& K, double mu_f, double rho_f,
                                      const Eigen::Vector2d& g_vec);
Eigen::VectorXd assemble_body_load(const Space& space_u, const VectorFn& f);
Eigen::VectorXd assemble_traction(const Space& space_u, const BoundaryVectorFn& f1);
Eigen::VectorXd assemble_source(const Space& space_s, const ScalarFn& phi);
Eigen::VectorXd assemble_flux(const Space& space_s, const BoundaryScalarFn& phi1);

enum class StressPairing { SymmetricGradient, FullGradient };

/// (T(grad u), eps(v)) or (T(grad u), grad v) with T = N_nl, or the full N
/// when nonlinear_only is false.
Eigen::VectorXd assemble_stress_load(const Space& space_u, const Eigen::VectorXd& u, double mu, double lambda,
                                     StressPairing pairing = StressPairing::SymmetricGradient,
                                     bool nonlinear_only = true);

/// Interpolants of (1,0), (0,1) and (-y,x).
std::array<Eigen::VectorXd, 3> rm_basis(const Space& space_u);

Eigen::VectorXd interpolate(const Space& space, const ScalarFn& fn);
Eigen::VectorXd interpolate(const Space& space, const VectorFn& fn);

/// Boundary quadrature of u.n.
double boundary_normal_flux(const Space& space_u, const Eigen::VectorXd& u);
/// (N(grad u), I).
double stress_trace_integral(const Space& space_u, const Eigen::VectorXd& u, double mu, double lambda);
/// Largest pointwise Frobenius norm of grad u over quadrature points and vertices.
double max_gradient_norm(const Space& space_u, const Eigen::VectorXd& u);

double l2_error(const Space& space, const Eigen::VectorXd& c, const ScalarFn& exact);
double l2_error(const Space& space, const Eigen::VectorXd& c, const VectorFn& exact);
/// |grad(u - u*)|_L2 with the exact gradient supplied.
double h1_seminorm_error(const Space& space, const Eigen::VectorXd& c, const TensorFn& exact_grad);

}  // namespace poro
