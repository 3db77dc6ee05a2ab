#include "poro/assembly.hpp"

#include "poro/constitutive.hpp"
#include "poro/errors.hpp"
#include "poro/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace poro {

namespace {

using Local = Eigen::Matrix<double, 12, 12>;

void require_vector(const Space& s, const char* who) {
    if (!s.is_vector()) throw ValidationError(std::string(who) + ": needs a vector space");
}

void require_scalar(const Space& s, const char* who) {
    if (s.is_vector()) throw ValidationError(std::string(who) + ": needs a scalar space");
}

void require_same_mesh(const Space& a, const Space& b) {
    if (&a.mesh() != &b.mesh()) throw ValidationError("spaces live on different meshes");
}

// Global dof of local basis k, component c.
int dof(const Space& s, const std::array<int, 6>& nodes, int k, int c) {
    return s.is_vector() ? 2 * nodes[k] + c : nodes[k];
}

void scatter(std::vector<Triplet>& out, const Space& s, const std::array<int, 6>& nodes, const Local& a) {
    const int nb = s.nodes_per_cell(), nc = s.components();
    for (int i = 0; i < nb; ++i) {
        for (int ci = 0; ci < nc; ++ci) {
            for (int j = 0; j < nb; ++j) {
                for (int cj = 0; cj < nc; ++cj) {
                    out.push_back({dof(s, nodes, i, ci), dof(s, nodes, j, cj), a(i * nc + ci, j * nc + cj)});
                }
            }
        }
    }
}

template <class LocalFn>
CsrMatrix assemble_square(const Space& s, LocalFn&& local) {
    const auto& rule = triangle_rule(4);
    const int nb = s.nodes_per_cell(), nc = s.components(), n = nb * nc;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(s.mesh().num_cells()) * n * n);
    for (int c = 0; c < s.mesh().num_cells(); ++c) {
        const CellGeometry g = cell_geometry(s.mesh(), c);
        Local a = Local::Zero();
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const ShapeEval sh = s.eval(g, rule.points[q]);
            local(a, sh, rule.weights[q] * g.area, c);
        }
        scatter(trip, s, s.cell_nodes(c), a);
    }
    return CsrMatrix::from_triplets(s.num_dofs(), s.num_dofs(), std::move(trip));
}

void check_spd(const Eigen::Matrix2d& K) {
    if (!K.allFinite() || K(0, 1) != K(1, 0)) throw ValidationError("permeability tensor must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(K, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 0.0)) throw ValidationError("permeability tensor must be positive definite");
}

// Edge-local basis on a boundary edge parametrized by t in [0,1].
std::array<double, 3> edge_shapes(bool quadratic, double t) {
    if (quadratic) return {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
    return {1.0 - t, t, 0.0};
}

template <class Visit>
void for_each_boundary_point(const Space& s, Visit&& visit) {
    const Mesh& m = s.mesh();
    const auto& rule = edge_rule();
    for (int b = 0; b < static_cast<int>(m.boundary().size()); ++b) {
        const auto& e = m.boundary()[b];
        const std::array<int, 3> nodes{e.v[0], e.v[1], m.num_vertices() + m.boundary_edge_id(b)};
        const Eigen::Vector2d a = m.vertex(e.v[0]), d = m.vertex(e.v[1]) - a;
        const Eigen::Vector2d n = m.outward_normal(b);
        const double len = m.boundary_edge_length(b);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double t = rule.points[q];
            visit(b, e.tag, nodes, edge_shapes(s.is_quadratic(), t), Eigen::Vector2d(a + t * d), n,
                  rule.weights[q] * len);
        }
    }
}

}  // namespace

void for_each_quad_point(const Space& space, const QuadVisitor& visit, int degree) {
    const auto& rule = triangle_rule(degree);
    for (int c = 0; c < space.mesh().num_cells(); ++c) {
        const CellGeometry g = cell_geometry(space.mesh(), c);
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            visit(c, g, g.point(rule.points[q]), rule.weights[q] * g.area, space.eval(g, rule.points[q]));
        }
    }
}

double scalar_value(const Space& s, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                    const ShapeEval& sh) {
    double v = 0.0;
    for (int k = 0; k < s.nodes_per_cell(); ++k) v += c[nodes[k]] * sh.value[k];
    return v;
}

Eigen::Vector2d scalar_gradient(const Space& s, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                                const ShapeEval& sh) {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (int k = 0; k < s.nodes_per_cell(); ++k) g += c[nodes[k]] * sh.grad[k];
    return g;
}

Eigen::Vector2d vector_value(const Space& u, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                             const ShapeEval& sh) {
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    for (int k = 0; k < u.nodes_per_cell(); ++k) {
        v += sh.value[k] * Eigen::Vector2d(c[2 * nodes[k]], c[2 * nodes[k] + 1]);
    }
    return v;
}

Eigen::Matrix2d vector_gradient(const Space& u, const Eigen::VectorXd& c, const std::array<int, 6>& nodes,
                                const ShapeEval& sh) {
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    for (int k = 0; k < u.nodes_per_cell(); ++k) {
        G.row(0) += c[2 * nodes[k]] * sh.grad[k].transpose();
        G.row(1) += c[2 * nodes[k] + 1] * sh.grad[k].transpose();
    }
    return G;
}

CsrMatrix assemble_mass(const Space& space) {
    const int nb = space.nodes_per_cell(), nc = space.components();
    return assemble_square(space, [&](Local& a, const ShapeEval& sh, double w, int) {
        for (int i = 0; i < nb; ++i) {
            for (int j = 0; j < nb; ++j) {
                const double v = w * (sh.value[i] * sh.value[j]);
                for (int c = 0; c < nc; ++c) a(i * nc + c, j * nc + c) += v;
            }
        }
    });
}

CsrMatrix assemble_vector_stiffness(const Space& space_u, double mu) {
    require_vector(space_u, "assemble_vector_stiffness");
    const int nb = space_u.nodes_per_cell();
    return assemble_square(space_u, [&](Local& a, const ShapeEval& sh, double w, int) {
        for (int i = 0; i < nb; ++i) {
            for (int j = 0; j < nb; ++j) {
                const Eigen::Vector2d& g = sh.grad[i];
                const Eigen::Vector2d& h = sh.grad[j];
                const double gh = g.x() * h.x() + g.y() * h.y();
                for (int c = 0; c < 2; ++c) {
                    for (int d = 0; d < 2; ++d) {
                        // eps(phi_i e_c) : eps(phi_j e_d) = (delta_cd g.h + g_d h_c) / 2
                        const double v = 0.5 * ((c == d ? gh : 0.0) + g(d) * h(c));
                        a(2 * i + c, 2 * j + d) += w * mu * v;
                    }
                }
            }
        }
    });
}

CsrMatrix assemble_gradient_gram(const Space& space) {
    const int nb = space.nodes_per_cell(), nc = space.components();
    return assemble_square(space, [&](Local& a, const ShapeEval& sh, double w, int) {
        for (int i = 0; i < nb; ++i) {
            for (int j = 0; j < nb; ++j) {
                const double v = w * (sh.grad[i].x() * sh.grad[j].x() + sh.grad[i].y() * sh.grad[j].y());
                for (int c = 0; c < nc; ++c) a(i * nc + c, j * nc + c) += v;
            }
        }
    });
}

CsrMatrix assemble_h1_gram(const Space& space) { return add(assemble_mass(space), assemble_gradient_gram(space)); }

CsrMatrix assemble_divergence(const Space& space_u, const Space& space_s) {
    require_vector(space_u, "assemble_divergence");
    require_scalar(space_s, "assemble_divergence");
    require_same_mesh(space_u, space_s);
    const auto& rule = triangle_rule(4);
    const int nu = space_u.nodes_per_cell(), ns = space_s.nodes_per_cell();
    std::vector<Triplet> trip;
    for (int c = 0; c < space_u.mesh().num_cells(); ++c) {
        const CellGeometry g = cell_geometry(space_u.mesh(), c);
        Eigen::Matrix<double, 3, 12> a = Eigen::Matrix<double, 3, 12>::Zero();
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const ShapeEval su = space_u.eval(g, rule.points[q]);
            const ShapeEval ss = space_s.eval(g, rule.points[q]);
            const double w = rule.weights[q] * g.area;
            for (int i = 0; i < ns; ++i) {
                for (int j = 0; j < nu; ++j) {
                    for (int d = 0; d < 2; ++d) a(i, 2 * j + d) += w * ss.value[i] * su.grad[j](d);
                }
            }
        }
        const auto nodes_u = space_u.cell_nodes(c);
        const auto nodes_s = space_s.cell_nodes(c);
        for (int i = 0; i < ns; ++i) {
            for (int j = 0; j < nu; ++j) {
                for (int d = 0; d < 2; ++d) trip.push_back({nodes_s[i], 2 * nodes_u[j] + d, a(i, 2 * j + d)});
            }
        }
    }
    return CsrMatrix::from_triplets(space_s.num_dofs(), space_u.num_dofs(), std::move(trip));
}

CsrMatrix assemble_diffusion(const Space& space_s, const Eigen::Matrix2d& K, double mu_f) {
    check_spd(K);
    return assemble_diffusion(space_s, [&K](int) { return K; }, mu_f);
}

CsrMatrix assemble_diffusion(const Space& space_s, const CellTensorFn& K, double mu_f) {
    require_scalar(space_s, "assemble_diffusion");
    if (!(mu_f > 0.0)) throw ValidationError("assemble_diffusion: mu_f must be > 0");
    const int nb = space_s.nodes_per_cell();
    int last_cell = -1;
    Eigen::Matrix2d Kc;
    return assemble_square(space_s, [&](Local& a, const ShapeEval& sh, double w, int cell) {
        if (cell != last_cell) {
            Kc = K(cell);
            check_spd(Kc);
            last_cell = cell;
        }
        for (int i = 0; i < nb; ++i) {
            for (int j = 0; j < nb; ++j) {
                // symmetric evaluation keeps the assembled matrix exactly symmetric
                const Eigen::Vector2d& g = sh.grad[i];
                const Eigen::Vector2d& h = sh.grad[j];
                const double v = Kc(0, 0) * (g.x() * h.x()) + Kc(1, 1) * (g.y() * h.y()) +
                                 Kc(0, 1) * (g.x() * h.y() + g.y() * h.x());
                a(i, j) += w * v / mu_f;
            }
        }
    });
}

Eigen::VectorXd assemble_gravity_load(const Space& space_s, const Eigen::Matrix2d& K, double mu_f, double rho_f,
                                      const Eigen::Vector2d& g_vec) {
    require_scalar(space_s, "assemble_gravity_load");
    check_spd(K);
    const Eigen::Vector2d flux = K * (rho_f * g_vec) / mu_f;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space_s.num_dofs());
    for_each_quad_point(space_s, [&](int c, const CellGeometry&, const Eigen::Vector2d&, double w, const ShapeEval& sh) {
        const auto nodes = space_s.cell_nodes(c);
        for (int i = 0; i < space_s.nodes_per_cell(); ++i) out[nodes[i]] += w * flux.dot(sh.grad[i]);
    });
    return out;
}

Eigen::VectorXd assemble_body_load(const Space& space_u, const VectorFn& f) {
    require_vector(space_u, "assemble_body_load");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space_u.num_dofs());
    for_each_quad_point(space_u, [&](int c, const CellGeometry&, const Eigen::Vector2d& x, double w, const ShapeEval& sh) {
        const Eigen::Vector2d fx = f(x);
        const auto nodes = space_u.cell_nodes(c);
        for (int i = 0; i < space_u.nodes_per_cell(); ++i) {
            out[2 * nodes[i]] += w * fx.x() * sh.value[i];
            out[2 * nodes[i] + 1] += w * fx.y() * sh.value[i];
        }
    });
    return out;
}

Eigen::VectorXd assemble_traction(const Space& space_u, const BoundaryVectorFn& f1) {
    require_vector(space_u, "assemble_traction");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space_u.num_dofs());
    const int nb = space_u.is_quadratic() ? 3 : 2;
    for_each_boundary_point(space_u, [&](int, int tag, const std::array<int, 3>& nodes, const std::array<double, 3>& phi,
                                         const Eigen::Vector2d& x, const Eigen::Vector2d& n, double w) {
        const Eigen::Vector2d fx = f1(x, n, tag);
        for (int i = 0; i < nb; ++i) {
            out[2 * nodes[i]] += w * fx.x() * phi[i];
            out[2 * nodes[i] + 1] += w * fx.y() * phi[i];
        }
    });
    return out;
}

Eigen::VectorXd assemble_source(const Space& space_s, const ScalarFn& phi) {
    require_scalar(space_s, "assemble_source");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space_s.num_dofs());
    for_each_quad_point(space_s, [&](int c, const CellGeometry&, const Eigen::Vector2d& x, double w, const ShapeEval& sh) {
        const double v = phi(x);
        const auto nodes = space_s.cell_nodes(c);
        for (int i = 0; i < 3; ++i) out[nodes[i]] += w * v * sh.value[i];
    });
    return out;
}

Eigen::VectorXd assemble_flux(const Space& space_s, const BoundaryScalarFn& phi1) {
    require_scalar(space_s, "assemble_flux");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space_s.num_dofs());
    for_each_boundary_point(space_s, [&](int, int tag, const std::array<int, 3>& nodes, const std::array<double, 3>& phi,
                                         const Eigen::Vector2d& x, const Eigen::Vector2d& n, double w) {
        const double v = phi1(x, n, tag);
        for (int i = 0; i < 2; ++i) out[nodes[i]] += w * v * phi[i];
    });
    return out;
}

Eigen::VectorXd assemble_stress_load(const Space& space_u, const Eigen::VectorXd& u, double mu, double lambda,
                                     StressPairing pairing, bool nonlinear_only) {
    require_vector(space_u, "assemble_stress_load");
    if (u.size() != space_u.num_dofs()) throw ValidationError("assemble_stress_load: field size mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space_u.num_dofs());
    for_each_quad_point(space_u, [&](int c, const CellGeometry&, const Eigen::Vector2d&, double w, const ShapeEval& sh) {
        const auto nodes = space_u.cell_nodes(c);
        const Tensor2 G = vector_gradient(space_u, u, nodes, sh);
        Tensor2 T = nonlinear_only ? nonlinear_part<2>(G, mu, lambda) : stress_N<2>(G, mu, lambda);
        if (pairing == StressPairing::SymmetricGradient) T = sym_grad<2>(T);
        for (int i = 0; i < space_u.nodes_per_cell(); ++i) {
            out[2 * nodes[i]] += w * T.row(0).dot(sh.grad[i]);
            out[2 * nodes[i] + 1] += w * T.row(1).dot(sh.grad[i]);
        }
    });
    return out;
}

std::array<Eigen::VectorXd, 3> rm_basis(const Space& space_u) {
    require_vector(space_u, "rm_basis");
    return {interpolate(space_u, VectorFn([](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 0.0); })),
            interpolate(space_u, VectorFn([](const Eigen::Vector2d&) { return Eigen::Vector2d(0.0, 1.0); })),
            interpolate(space_u, VectorFn([](const Eigen::Vector2d& x) { return Eigen::Vector2d(-x.y(), x.x()); }))};
}

Eigen::VectorXd interpolate(const Space& space, const ScalarFn& fn) {
    require_scalar(space, "interpolate");
    Eigen::VectorXd out(space.num_dofs());
    for (int i = 0; i < space.num_nodes(); ++i) out[i] = fn(space.node_coords(i));
    return out;
}

Eigen::VectorXd interpolate(const Space& space, const VectorFn& fn) {
    require_vector(space, "interpolate");
    Eigen::VectorXd out(space.num_dofs());
    for (int i = 0; i < space.num_nodes(); ++i) {
        const Eigen::Vector2d v = fn(space.node_coords(i));
        out[2 * i] = v.x();
        out[2 * i + 1] = v.y();
    }
    return out;
}

double boundary_normal_flux(const Space& space_u, const Eigen::VectorXd& u) {
    require_vector(space_u, "boundary_normal_flux");
    double total = 0.0;
    const int nb = space_u.is_quadratic() ? 3 : 2;
    for_each_boundary_point(space_u, [&](int, int, const std::array<int, 3>& nodes, const std::array<double, 3>& phi,
                                         const Eigen::Vector2d&, const Eigen::Vector2d& n, double w) {
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        for (int i = 0; i < nb; ++i) v += phi[i] * Eigen::Vector2d(u[2 * nodes[i]], u[2 * nodes[i] + 1]);
        total += w * v.dot(n);
    });
    return total;
}

double stress_trace_integral(const Space& space_u, const Eigen::VectorXd& u, double mu, double lambda) {
    double total = 0.0;
    for_each_quad_point(space_u, [&](int c, const CellGeometry&, const Eigen::Vector2d&, double w, const ShapeEval& sh) {
        total += w * stress_N<2>(vector_gradient(space_u, u, space_u.cell_nodes(c), sh), mu, lambda).trace();
    });
    return total;
}

double max_gradient_norm(const Space& space_u, const Eigen::VectorXd& u) {
    double best = 0.0;
    auto probe = [&](int c, const CellGeometry&, const Eigen::Vector2d&, double, const ShapeEval& sh) {
        best = std::max(best, vector_gradient(space_u, u, space_u.cell_nodes(c), sh).norm());
    };
    for_each_quad_point(space_u, probe, 4);
    // vertices: the gradient of a quadratic peaks on the cell boundary
    for (int c = 0; c < space_u.mesh().num_cells(); ++c) {
        const CellGeometry g = cell_geometry(space_u.mesh(), c);
        for (int k = 0; k < 3; ++k) {
            Eigen::Vector3d b = Eigen::Vector3d::Zero();
            b(k) = 1.0;
            probe(c, g, g.x[k], 0.0, space_u.eval(g, b));
        }
    }
    return best;
}

double l2_error(const Space& space, const Eigen::VectorXd& c, const ScalarFn& exact) {
    require_scalar(space, "l2_error");
    double s = 0.0;
    for_each_quad_point(space, [&](int cell, const CellGeometry&, const Eigen::Vector2d& x, double w, const ShapeEval& sh) {
        const double e = scalar_value(space, c, space.cell_nodes(cell), sh) - exact(x);
        s += w * e * e;
    });
    return std::sqrt(s);
}

double l2_error(const Space& space, const Eigen::VectorXd& c, const VectorFn& exact) {
    require_vector(space, "l2_error");
    double s = 0.0;
    for_each_quad_point(space, [&](int cell, const CellGeometry&, const Eigen::Vector2d& x, double w, const ShapeEval& sh) {
        s += w * (vector_value(space, c, space.cell_nodes(cell), sh) - exact(x)).squaredNorm();
    });
    return std::sqrt(s);
}

double h1_seminorm_error(const Space& space, const Eigen::VectorXd& c, const TensorFn& exact_grad) {
    require_vector(space, "h1_seminorm_error");
    double s = 0.0;
    for_each_quad_point(space, [&](int cell, const CellGeometry&, const Eigen::Vector2d& x, double w, const ShapeEval& sh) {
        s += w * (vector_gradient(space, c, space.cell_nodes(cell), sh) - exact_grad(x)).squaredNorm();
    });
    return std::sqrt(s);
}

}  // namespace poro
