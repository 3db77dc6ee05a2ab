#pragma once

#include "poro/fe_space.hpp"

#include <Eigen/Core>

#include <array>

namespace poro {

/// Discrete inf-sup constant of the divergence pairing between the
/// RM-orthogonal part of space_u (H1 norm) and mean-zero functions of
/// space_s (L2 norm). Dense; meant for small meshes.
double infsup_estimate(const Space& space_u, const Space& space_s, const std::array<Eigen::VectorXd, 3>& rm);

struct KornEstimate {
    double quotient = 0.0;  // min |eps(u)| / |u|_H1 over RM-orthogonal u
    double c1 = 0.0;        // |u|_L2 <= c1 |eps(u)|
    double c2 = 0.0;        // |grad u|_L2 <= c2 |eps(u)|
};

KornEstimate korn_estimate(const Space& space_u);

}  // namespace poro
