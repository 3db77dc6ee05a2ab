#include "poro/model.hpp"

#include "poro/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace poro {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError("invalid material parameters: " + what);
}

}  // namespace

void MaterialParams::validate() const {
    require(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be >= 0");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
    require(std::isfinite(c0) && c0 > 0.0, "c0 must be > 0 (strictly positive storage required)");
    require(std::isfinite(mu_f) && mu_f > 0.0, "mu_f must be > 0");
    require(std::isfinite(rho_f), "rho_f must be finite");
    require(g_vec.allFinite(), "gravity vector must be finite");
    require(K.allFinite() && K(0, 1) == K(1, 0), "permeability must be symmetric");
    require(permeability_bounds().first > 0.0, "permeability must be positive definite");
}

std::pair<double, double> MaterialParams::permeability_bounds() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(K, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

KappaSet kappa_from(const MaterialParams& params) {
    if (!(params.c0 > 0.0)) {
        throw ValidationError("kappa_from: strictly positive storage required (c0 = " +
                              std::to_string(params.c0) + ")");
    }
    const double denom = params.alpha * params.alpha + params.lambda * params.c0;
    if (!(denom > 0.0)) throw ValidationError("kappa_from: alpha^2 + lambda*c0 must be positive");
    return {params.alpha / denom, params.lambda / denom, params.c0 / denom};
}

KappaSet kappa_limit(double alpha, double lambda) {
    if (alpha == 0.0 || !std::isfinite(alpha)) throw ValidationError("kappa_limit: alpha must be nonzero");
    return {1.0 / alpha, lambda / (alpha * alpha), 0.0};
}

LameConstants lame_from_young(double youngs, double poisson) {
    if (!(youngs > 0.0)) throw ValidationError("lame_from_young: E must be > 0");
    if (poisson == 0.5) throw ValidationError("lame_from_young: nu = 0.5 (incompressible) is singular");
    if (!(poisson > -1.0 && poisson < 0.5)) throw ValidationError("lame_from_young: nu must lie in (-1, 0.5)");
    const double lambda = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    const double mu = youngs / (2.0 * (1.0 + poisson));
    const double bulk = youngs / (3.0 * (1.0 - 2.0 * poisson));
    return {lambda, mu, bulk};
}

}  // namespace poro
