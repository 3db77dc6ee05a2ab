#pragma once

#include "poro/assembly.hpp"
#include "poro/model.hpp"
#include "poro/stepper.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace poro {

/// Load sets by id, scaled by amplitude (gravity comes from the material
/// parameters and is never scaled). Ids: zero, standard, standard-no-traction,
/// source.
Loads make_loads(const std::string& id, double amplitude);
std::vector<std::string> load_ids();

struct InitialData {
    VectorFn u0;
    ScalarFn p0;
};

/// Initial data by id: zero, dilation, rigid, pressure-bump.
InitialData make_initial(const std::string& id, double amplitude);
std::vector<std::string> initial_ids();

/// Exact fields and the derivatives needed to manufacture loads.
struct ExactPoint {
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();  // G(i, j) = d u_i / d x_j
    std::array<Eigen::Matrix2d, 2> H{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};  // Hessians of u_0, u_1
    Eigen::Matrix2d G_t = Eigen::Matrix2d::Zero();
    double p = 0.0;
    double p_t = 0.0;
    Eigen::Vector2d grad_p = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hess_p = Eigen::Matrix2d::Zero();
};

class MmsCase {
public:
    MmsCase(std::string id, double amplitude, bool steady, std::function<ExactPoint(const Eigen::Vector2d&, double)> exact);

    const std::string& id() const { return id_; }
    double amplitude() const { return amplitude_; }
    bool steady() const { return steady_; }
    ExactPoint exact(const Eigen::Vector2d& x, double t) const { return exact_(x, t); }

    /// Manufactured loads for the given material. Compatibility holds in
    /// exact arithmetic; the discrete tolerance is loosened to quadrature level.
    Loads loads(const MaterialParams& params) const;
    Eigen::Vector2d body_force(const Eigen::Vector2d& x, double t, const MaterialParams& params) const;

    VectorFn u_at(double t) const;
    TensorFn grad_u_at(double t) const;
    ScalarFn p_at(double t) const;

    /// Largest finite-difference mismatch of the closed-form derivatives and
    /// loads at random points, relative to the amplitude.
    double fd_residual(const MaterialParams& params, std::uint64_t seed = 7, int points = 20) const;

private:
    std::string id_;
    double amplitude_;
    bool steady_;
    std::function<ExactPoint(const Eigen::Vector2d&, double)> exact_;
};

/// Cases: trig (time-decaying trigonometric fields) and linear (fields
/// inside the discrete spaces, steady).
MmsCase make_mms_case(const std::string& id, double amplitude);
std::vector<std::string> mms_case_ids();

}  // namespace poro
