#include "poro/registry.hpp"

#include "poro/constitutive.hpp"
#include "poro/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace poro {

namespace {

using Eigen::Matrix2d;
using Eigen::Vector2d;

constexpr double kPi = std::numbers::pi;

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& s : ids) out += (out.empty() ? "" : ", ") + s;
    return out;
}

}  // namespace

std::vector<std::string> load_ids() { return {"zero", "standard", "standard-no-traction", "source"}; }

Loads make_loads(const std::string& id, double a) {
    Loads loads;
    if (id == "zero") return loads;
    if (id == "standard" || id == "standard-no-traction") {
        loads.f = [a](const Vector2d&, double) { return Vector2d(0.0, -a); };
        if (id == "standard")
            loads.f1 = [a](const Vector2d&, const Vector2d&, int, double) { return Vector2d(0.0, 0.25 * a); };
        loads.phi_src = [a](const Vector2d&, double) { return a; };
        return loads;
    }
    if (id == "source") {
        loads.phi_src = [a](const Vector2d&, double) { return a; };
        return loads;
    }
    throw ConfigError("unknown load set '" + id + "' (known: " + join_ids(load_ids()) + ")");
}

std::vector<std::string> initial_ids() { return {"zero", "dilation", "rigid", "pressure-bump"}; }

InitialData make_initial(const std::string& id, double a) {
    InitialData d;
    d.u0 = [](const Vector2d&) { return Vector2d::Zero().eval(); };
    d.p0 = [](const Vector2d&) { return 0.0; };
    if (id == "zero") return d;
    if (id == "dilation") {
        d.u0 = [a](const Vector2d& x) { return (a * x).eval(); };
        return d;
    }
    if (id == "rigid") {
        d.u0 = [a](const Vector2d& x) { return Vector2d(a * (1.0 - x.y()), a * (2.0 + x.x())); };
        return d;
    }
    if (id == "pressure-bump") {
        d.p0 = [a](const Vector2d& x) { return a * std::cos(kPi * x.x()) * std::cos(kPi * x.y()); };
        return d;
    }
    throw ConfigError("unknown initial data '" + id + "' (known: " + join_ids(initial_ids()) + ")");
}

MmsCase::MmsCase(std::string id, double amplitude, bool steady,
                 std::function<ExactPoint(const Vector2d&, double)> exact)
    : id_(std::move(id)), amplitude_(amplitude), steady_(steady), exact_(std::move(exact)) {}

namespace {

// d_j N_ij for N = mu sym(G) + mu G'G + lambda |G|^2 I.
Vector2d div_stress(const ExactPoint& e, double mu, double lambda) {
    const Matrix2d& G = e.G;
    auto H = [&](int k, int i, int j) { return e.H[k](i, j); };
    Vector2d out;
    for (int i = 0; i < 2; ++i) {
        double sym = 0.0, gram = 0.0, frob = 0.0;
        for (int j = 0; j < 2; ++j) {
            sym += 0.5 * (H(i, j, j) + H(j, i, j));
            for (int k = 0; k < 2; ++k) gram += H(k, i, j) * G(k, j) + G(k, i) * H(k, j, j);
        }
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) frob += 2.0 * G(k, l) * H(k, l, i);
        out(i) = mu * sym + mu * gram + lambda * frob;
    }
    return out;
}

Vector2d grad_div(const ExactPoint& e) {
    return Vector2d(e.H[0](0, 0) + e.H[1](0, 1), e.H[0](1, 0) + e.H[1](1, 1));
}

double xi_of(const ExactPoint& e, const MaterialParams& m) { return m.alpha * e.p - m.lambda * e.G.trace(); }

}  // namespace

Vector2d MmsCase::body_force(const Vector2d& x, double t, const MaterialParams& m) const {
    const ExactPoint e = exact_(x, t);
    const Vector2d grad_xi = m.alpha * e.grad_p - m.lambda * grad_div(e);
    return -div_stress(e, m.mu, m.lambda) + grad_xi;
}

Loads MmsCase::loads(const MaterialParams& m) const {
    Loads loads;
    auto self = *this;
    loads.time_dependent = !steady_;
    loads.compat_tol = 1e-3 * std::max(amplitude_, 1e-300);
    loads.f = [self, m](const Vector2d& x, double t) { return self.body_force(x, t, m); };
    loads.f1 = [self, m](const Vector2d& x, const Vector2d& n, int, double t) {
        const ExactPoint e = self.exact_(x, t);
        const Matrix2d N = stress_N<2>(e.G, m.mu, m.lambda);
        return (N * n - xi_of(e, m) * n).eval();
    };
    loads.phi_src = [self, m](const Vector2d& x, double t) {
        const ExactPoint e = self.exact_(x, t);
        const double eta_t = m.c0 * e.p_t + m.alpha * e.G_t.trace();
        return eta_t - (m.K.cwiseProduct(e.hess_p)).sum() / m.mu_f;
    };
    loads.phi1 = [self, m](const Vector2d& x, const Vector2d& n, int, double t) {
        const ExactPoint e = self.exact_(x, t);
        return (m.K * (e.grad_p - m.gravity_force())).dot(n) / m.mu_f;
    };
    return loads;
}

VectorFn MmsCase::u_at(double t) const {
    auto ex = exact_;
    return [ex, t](const Vector2d& x) { return ex(x, t).u; };
}

TensorFn MmsCase::grad_u_at(double t) const {
    auto ex = exact_;
    return [ex, t](const Vector2d& x) { return ex(x, t).G; };
}

ScalarFn MmsCase::p_at(double t) const {
    auto ex = exact_;
    return [ex, t](const Vector2d& x) { return ex(x, t).p; };
}

double MmsCase::fd_residual(const MaterialParams& m, std::uint64_t seed, int points) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.4, 0.4), T(0.1, 0.9);
    const double h = 1e-5;
    const double scale = std::max(amplitude_, 1e-300);
    double worst = 0.0;
    auto track = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / scale); };
    for (int s = 0; s < points; ++s) {
        const Vector2d x(U(rng), U(rng));
        const double t = T(rng);
        const ExactPoint e = exact_(x, t);
        for (int j = 0; j < 2; ++j) {
            Vector2d dx = Vector2d::Zero();
            dx(j) = h;
            const ExactPoint ep = exact_(x + dx, t), em = exact_(x - dx, t);
            for (int i = 0; i < 2; ++i) {
                track(e.G(i, j), (ep.u(i) - em.u(i)) / (2 * h));
                for (int k = 0; k < 2; ++k) track(e.H[i](k, j), (ep.G(i, k) - em.G(i, k)) / (2 * h));
                track(e.hess_p(i, j), (ep.grad_p(i) - em.grad_p(i)) / (2 * h));
            }
            track(e.grad_p(j), (ep.p - em.p) / (2 * h));
        }
        const ExactPoint tp = exact_(x, t + h), tm = exact_(x, t - h);
        track(e.p_t, (tp.p - tm.p) / (2 * h));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) track(e.G_t(i, j), (tp.G(i, j) - tm.G(i, j)) / (2 * h));

        // Body force against a finite-difference divergence of the full stress.
        Vector2d div_fd = Vector2d::Zero();
        for (int j = 0; j < 2; ++j) {
            Vector2d dx = Vector2d::Zero();
            dx(j) = h;
            const ExactPoint ep = exact_(x + dx, t), em = exact_(x - dx, t);
            const Matrix2d Np = stress_N<2>(ep.G, m.mu, m.lambda) - xi_of(ep, m) * Matrix2d::Identity();
            const Matrix2d Nm = stress_N<2>(em.G, m.mu, m.lambda) - xi_of(em, m) * Matrix2d::Identity();
            div_fd += (Np.col(j) - Nm.col(j)) / (2 * h);
        }
        const Vector2d f = body_force(x, t, m);
        track(f(0), -div_fd(0));
        track(f(1), -div_fd(1));
    }
    return worst;
}

std::vector<std::string> mms_case_ids() { return {"trig", "linear"}; }

MmsCase make_mms_case(const std::string& id, double A) {
    if (id == "trig") {
        auto exact = [A](const Vector2d& x, double t) {
            const double tau = A * std::exp(-t);
            const double sx = std::sin(kPi * x.x()), cx = std::cos(kPi * x.x());
            const double sy = std::sin(kPi * x.y()), cy = std::cos(kPi * x.y());
            const double w = 0.5 * (1.0 + x.x() * x.x());
            const double pi2 = kPi * kPi;
            ExactPoint e;
            e.u = tau * Vector2d(sx * cy, sy * w);
            e.G << kPi * cx * cy, -kPi * sx * sy, x.x() * sy, kPi * cy * w;
            e.G *= tau;
            e.H[0] << -pi2 * sx * cy, -pi2 * cx * sy, -pi2 * cx * sy, -pi2 * sx * cy;
            e.H[0] *= tau;
            e.H[1] << sy, kPi * x.x() * cy, kPi * x.x() * cy, -pi2 * sy * w;
            e.H[1] *= tau;
            e.G_t = -e.G;
            e.p = tau * (cx * sy + x.x());
            e.p_t = -e.p;
            e.grad_p = tau * Vector2d(-kPi * sx * sy + 1.0, kPi * cx * cy);
            e.hess_p << -pi2 * cx * sy, -pi2 * sx * cy, -pi2 * sx * cy, -pi2 * cx * sy;
            e.hess_p *= tau;
            return e;
        };
        return MmsCase("trig", A, false, exact);
    }
    if (id == "linear") {
        auto exact = [A](const Vector2d& x, double) {
            const double a = 1.0, b = 0.5, c = -0.3;
            ExactPoint e;
            e.u = A * Vector2d(a * x.x() + b * x.y(), b * x.x() + c * x.y());
            e.G << a, b, b, c;
            e.G *= A;
            e.p = A * (0.7 + 0.2 * x.x() - 0.4 * x.y());
            e.grad_p = A * Vector2d(0.2, -0.4);
            return e;
        };
        return MmsCase("linear", A, true, exact);
    }
    throw ConfigError("unknown manufactured solution '" + id + "' (known: " + join_ids(mms_case_ids()) + ")");
}

}  // namespace poro
