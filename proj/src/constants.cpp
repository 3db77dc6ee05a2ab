#include "poro/constants.hpp"

#include "poro/assembly.hpp"
#include "poro/cg.hpp"
#include "poro/constitutive.hpp"
#include "poro/errors.hpp"
#include "poro/stability.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <random>

namespace poro {

void RegimeBounds::validate() const {
    if (!(grad_lower > 0.0 && grad_lower <= grad_upper)) throw ValidationError("regime bounds: need 0 < M <= N");
    if (!(frob_lower > 0.0 && frob_lower <= frob_upper)) throw ValidationError("regime bounds: need 0 < M' <= N'");
    if (!(delta > 0.0)) throw ValidationError("regime bounds: delta must be > 0");
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 of the combined key
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

struct Mode {
    int k, l;
    double amp, phase;
};

// Random trigonometric field, interpolated, RM-orthogonalized, scaled so the
// pointwise gradient norm peaks at `target`.
Eigen::VectorXd random_field(const Space& su, const CsrMatrix& mass, const std::array<Eigen::VectorXd, 3>& rm,
                             const Eigen::Matrix3d& gram_inv, std::mt19937_64& rng, int modes, double target) {
    std::uniform_int_distribution<int> wave(0, modes);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::array<std::vector<Mode>, 2> comp;
    for (auto& c : comp) {
        for (int m = 0; m < 2 * modes; ++m) {
            const int k = wave(rng), l = wave(rng);
            c.push_back({k, l, unit(rng) / (1.0 + k * k + l * l), angle(rng)});
        }
    }
    Eigen::VectorXd u = interpolate(su, VectorFn([&](const Eigen::Vector2d& x) {
        Eigen::Vector2d v = Eigen::Vector2d::Zero();
        for (int c = 0; c < 2; ++c) {
            for (const auto& m : comp[c]) v(c) += m.amp * std::cos(M_PI * (m.k * x.x() + m.l * x.y()) + m.phase);
        }
        return v;
    }));
    Eigen::Vector3d proj;
    for (int k = 0; k < 3; ++k) proj[k] = rm[k].dot(mass.multiply(u));
    const Eigen::Vector3d c = gram_inv * proj;
    for (int k = 0; k < 3; ++k) u -= c[k] * rm[k];
    const double g = max_gradient_norm(su, u);
    if (!(g > 1e-14)) return Eigen::VectorXd::Zero(u.size());
    return u * (target / g);
}

struct Pairings {
    double eps_u = 0, N_u = 0, N_eps_u = 0;   // |eps(u)|^2, |N(u)|^2, (N(u), eps(u))
    double eps_d = 0, N_d = 0, N_eps_d = 0;   // same for differences
    double grad_u = 0;                        // |grad u|^2
};

Pairings integrate_pairings(const Space& su, const Eigen::VectorXd& u, const Eigen::VectorXd& v, double mu,
                            double lambda, bool linear_only) {
    Pairings P;
    auto N = [&](const Tensor2& G) {
        return linear_only ? Tensor2(mu * sym_grad<2>(G)) : stress_N<2>(G, mu, lambda);
    };
    for_each_quad_point(su, [&](int c, const CellGeometry&, const Eigen::Vector2d&, double w, const ShapeEval& sh) {
        const auto nodes = su.cell_nodes(c);
        const Tensor2 Gu = vector_gradient(su, u, nodes, sh);
        const Tensor2 Gv = vector_gradient(su, v, nodes, sh);
        const Tensor2 eu = sym_grad<2>(Gu), ed = sym_grad<2>(Tensor2(Gu - Gv));
        const Tensor2 Nu = N(Gu), Nd = N(Gu) - N(Gv);
        P.eps_u += w * eu.squaredNorm();
        P.N_u += w * Nu.squaredNorm();
        P.N_eps_u += w * frobenius<2>(Nu, eu);
        P.eps_d += w * ed.squaredNorm();
        P.N_d += w * Nd.squaredNorm();
        P.N_eps_d += w * frobenius<2>(Nd, ed);
        P.grad_u += w * Gu.squaredNorm();
    });
    return P;
}

}  // namespace

EmpiricalConstants estimate_constants(const ConstantsConfig& cfg) {
    cfg.bounds.validate();
    if (cfg.n_samples < 100) throw ValidationError("estimate_constants: need at least 100 samples");
    if (!(cfg.mu > 0.0) || cfg.lambda < 0.0) throw ValidationError("estimate_constants: need mu > 0, lambda >= 0");
    auto mesh = std::make_shared<const Mesh>(centered_square_mesh(cfg.mesh_n));
    const Space su(mesh, SpaceKind::VectorQuadratic);
    const CsrMatrix mass = assemble_mass(su);
    const auto rm = rm_basis(su);
    Eigen::Matrix3d gram;
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) gram(k, l) = rm[k].dot(mass.multiply(rm[l]));
    }
    const Eigen::Matrix3d gram_inv = gram.inverse();

    EmpiricalConstants out;
    const double inf = std::numeric_limits<double>::infinity();
    out.C1_growth = 0.0;
    out.C3_lipschitz = 0.0;
    out.C2_coercivity = inf;
    out.C4_monotonicity = inf;
    int within = 0;
    const int max_attempts = 20;
    for (int i = 0; i < cfg.n_samples; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
            std::mt19937_64 rng(sample_seed(cfg.seed, static_cast<std::uint64_t>(i) * max_attempts + attempt));
            std::uniform_real_distribution<double> frac(0.1, 1.0);
            const double tu = cfg.bounds.delta * frac(rng);
            const double tv = cfg.bounds.delta * frac(rng);
            const Eigen::VectorXd u = random_field(su, mass, rm, gram_inv, rng, cfg.modes, tu);
            const Eigen::VectorXd v = random_field(su, mass, rm, gram_inv, rng, cfg.modes, tv);
            const Pairings P = integrate_pairings(su, u, v, cfg.mu, cfg.lambda, cfg.linear_only);
            if (!(P.eps_u > 1e-300) || !(P.eps_d > 1e-300)) {
                ++out.samples_discarded;
                continue;
            }
            ok = true;
            out.C1_growth = std::max(out.C1_growth, std::sqrt(P.N_u / P.eps_u));
            out.C2_coercivity = std::min(out.C2_coercivity, P.N_eps_u / P.eps_u);
            out.C3_lipschitz = std::max(out.C3_lipschitz, std::sqrt(P.N_d / P.eps_d));
            out.C4_monotonicity = std::min(out.C4_monotonicity, P.N_eps_d / P.eps_d);
            const double gn = std::sqrt(P.grad_u);
            const double fr = max_gradient_norm(su, u);
            if (gn >= cfg.bounds.grad_lower && gn <= cfg.bounds.grad_upper && fr >= cfg.bounds.frob_lower &&
                fr <= cfg.bounds.frob_upper * (1.0 + 1e-12)) {
                ++within;
            }
            ++out.samples_used;
        }
    }
    if (out.samples_used == 0) throw SolverError("estimate_constants: every sample was degenerate");
    out.fraction_within_bounds = static_cast<double>(within) / out.samples_used;
    out.outside_monotone_regime = !(out.C2_coercivity > 0.0) || !(out.C4_monotonicity > 0.0);
    const KornEstimate k = korn_estimate(su);
    out.korn_c1 = k.c1;
    out.korn_c2 = k.c2;
    return out;
}

std::string constants_report_json(const ConstantsConfig& cfg, const EmpiricalConstants& c) {
    nlohmann::ordered_json j;
    j["constants"] = {{"C1_growth", c.C1_growth},
                      {"C2_coercivity", c.C2_coercivity},
                      {"C3_lipschitz", c.C3_lipschitz},
                      {"C4_monotonicity", c.C4_monotonicity},
                      {"korn_c1", c.korn_c1},
                      {"korn_c2", c.korn_c2}};
    j["outside_monotone_regime"] = c.outside_monotone_regime;
    j["regime_bounds"] = {{"M", cfg.bounds.grad_lower},
                          {"N", cfg.bounds.grad_upper},
                          {"M_prime", cfg.bounds.frob_lower},
                          {"N_prime", cfg.bounds.frob_upper},
                          {"delta", cfg.bounds.delta}};
    j["fraction_within_bounds"] = c.fraction_within_bounds;
    j["material"] = {{"mu", cfg.mu}, {"lambda", cfg.lambda}};
    j["linear_only"] = cfg.linear_only;
    j["n_samples"] = cfg.n_samples;
    j["samples_used"] = c.samples_used;
    j["samples_discarded"] = c.samples_discarded;
    j["seed"] = cfg.seed;
    j["mesh_n"] = cfg.mesh_n;
    return j.dump(2);
}

}  // namespace poro
