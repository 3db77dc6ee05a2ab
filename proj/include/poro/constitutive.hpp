#pragma once

// Pointwise tensor kernel of the nonlinear stress-strain law. Templated on the
// spatial dimension; the solver exercises Dim = 2.

#include <Eigen/Core>

#include <cmath>

namespace poro {

template <int Dim>
using Tensor = Eigen::Matrix<double, Dim, Dim>;
using Tensor2 = Tensor<2>;

/// G^T G, filled so that the result is exactly symmetric.
template <int Dim>
Tensor<Dim> gram(const Tensor<Dim>& G) {
    Tensor<Dim> out;
    for (int i = 0; i < Dim; ++i) {
        for (int j = i; j < Dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < Dim; ++k) s += G(k, i) * G(k, j);
            out(i, j) = s;
            out(j, i) = s;
        }
    }
    return out;
}

template <int Dim>
Tensor<Dim> sym_grad(const Tensor<Dim>& G) {
    Tensor<Dim> out;
    for (int i = 0; i < Dim; ++i) {
        for (int j = 0; j < Dim; ++j) out(i, j) = 0.5 * (G(i, j) + G(j, i));
    }
    return out;
}

/// Deformed Green strain 1/2 (G + G^T + 2 G^T G).
template <int Dim>
Tensor<Dim> green_strain(const Tensor<Dim>& G) {
    return sym_grad(G) + gram(G);
}

/// Full effective stress mu*E + lambda*tr(E)*I with E the Green strain.
template <int Dim>
Tensor<Dim> stress_full(const Tensor<Dim>& G, double mu, double lambda) {
    const Tensor<Dim> e = green_strain(G);
    return mu * e + (lambda * e.trace()) * Tensor<Dim>::Identity();
}

/// Quadratic part mu*G^T G + lambda*|G|_F^2 I, so that N = mu*eps + N_nl.
template <int Dim>
Tensor<Dim> nonlinear_part(const Tensor<Dim>& G, double mu, double lambda) {
    return mu * gram(G) + (lambda * G.squaredNorm()) * Tensor<Dim>::Identity();
}

/// Reformulated stress N(G) = sigma(G) - lambda*tr(G)*I.
template <int Dim>
Tensor<Dim> stress_N(const Tensor<Dim>& G, double mu, double lambda) {
    return mu * sym_grad(G) + nonlinear_part(G, mu, lambda);
}

template <int Dim>
bool is_symmetric(const Tensor<Dim>& T) {
    for (int i = 0; i < Dim; ++i) {
        for (int j = i + 1; j < Dim; ++j) {
            if (T(i, j) != T(j, i)) return false;
        }
    }
    return true;
}

/// Frobenius inner product A : B.
template <int Dim>
double frobenius(const Tensor<Dim>& A, const Tensor<Dim>& B) {
    return (A.array() * B.array()).sum();
}

}  // namespace poro
