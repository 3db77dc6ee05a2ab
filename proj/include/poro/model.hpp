#pragma once

#include <Eigen/Core>

#include <utility>

namespace poro {

/// Physical coefficients of the poroelastic medium. Units are documentation
/// only; every test and shipped scenario is unit-normalized.
struct MaterialParams {
    double mu = 1.0;      // shear modulus
    double lambda = 1.0;  // Lame constant
    double alpha = 1.0;   // Biot-Willis constant
    double c0 = 0.1;      // constrained specific storage, > 0 on the solver path
    Eigen::Matrix2d K = Eigen::Matrix2d::Identity();  // permeability, SPD
    double mu_f = 1.0;    // solvent viscosity
    double rho_f = 1.0;   // fluid density
    Eigen::Vector2d g_vec = Eigen::Vector2d::Zero();

    /// Throws ValidationError naming the first violated bound.
    void validate() const;

    Eigen::Vector2d gravity_force() const { return rho_f * g_vec; }

    /// Spectral bounds (K1, K2) of the permeability tensor.
    std::pair<double, double> permeability_bounds() const;
};

struct KappaSet {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
};

struct ElasticModuli {
    double youngs = 1.0;
    double poisson = 0.25;
};

struct LameConstants {
    double lambda = 0.0;
    double mu = 0.0;
    double bulk = 0.0;
};

KappaSet kappa_from(const MaterialParams& params);

/// Limits of the kappa coefficients as c0 -> 0.
KappaSet kappa_limit(double alpha, double lambda);

LameConstants lame_from_young(double youngs, double poisson);
inline LameConstants lame_from_young(const ElasticModuli& m) { return lame_from_young(m.youngs, m.poisson); }

template <class T>
struct XiEta {
    T xi;
    T eta;
};

template <class T>
struct PressureDilation {
    T p;
    T q;
};

// Both maps work for scalars and for nodal coefficient vectors.

template <class T>
XiEta<T> to_xi_eta(const T& p, const T& q, const MaterialParams& params) {
    return {T(params.alpha * p - params.lambda * q), T(params.c0 * p + params.alpha * q)};
}

template <class T>
PressureDilation<T> from_xi_eta(const T& xi, const T& eta, const KappaSet& k) {
    return {T(k.k1 * xi + k.k2 * eta), T(k.k1 * eta - k.k3 * xi)};
}

}  // namespace poro
