#include "poro/errors.hpp"
#include "poro/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace poro;
using doctest::Approx;

namespace {

MaterialParams params(double alpha, double lambda, double c0) {
    MaterialParams p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.c0 = c0;
    return p;
}

}  // namespace

TEST_CASE("kappa values for hand-checked parameter sets") {
    auto k = kappa_from(params(1, 1, 1));
    CHECK(k.k1 == 0.5);
    CHECK(k.k2 == 0.5);
    CHECK(k.k3 == 0.5);

    k = kappa_from(params(1, 0, 1));
    CHECK(k.k1 == 1.0);
    CHECK(k.k2 == 0.0);
    CHECK(k.k3 == 1.0);

    k = kappa_from(params(2, 3, 0.5));
    CHECK(k.k1 == Approx(2 / 5.5).epsilon(1e-15));
    CHECK(k.k2 == Approx(3 / 5.5).epsilon(1e-15));
    CHECK(k.k3 == Approx(0.5 / 5.5).epsilon(1e-15));
}

TEST_CASE("kappa_from rejects nonpositive storage") {
    CHECK_THROWS_AS(kappa_from(params(1, 1, 0)), ValidationError);
    CHECK_THROWS_WITH_AS(kappa_from(params(1, 1, -1)), doctest::Contains("strictly positive storage required"),
                         ValidationError);
}

TEST_CASE("kappa limits as storage vanishes") {
    auto k = kappa_limit(1, 1);
    CHECK(k.k1 == 1.0);
    CHECK(k.k2 == 1.0);
    CHECK(k.k3 == 0.0);
    k = kappa_limit(2, 0);
    CHECK(k.k1 == 0.5);
    CHECK(k.k2 == 0.0);
    k = kappa_limit(2, 4);
    CHECK(k.k1 == 0.5);
    CHECK(k.k2 == 1.0);
    CHECK_THROWS_AS(kappa_limit(0, 1), ValidationError);
}

TEST_CASE("kappas converge linearly to the limit") {
    const double alpha = 1.3, lambda = 2.1;
    const KappaSet lim = kappa_limit(alpha, lambda);
    double prev_ratio = -1;
    for (int e = 2; e <= 8; ++e) {
        const double c0 = std::pow(10.0, -e);
        const KappaSet k = kappa_from(params(alpha, lambda, c0));
        const double dev = std::max({std::abs(k.k1 - lim.k1), std::abs(k.k2 - lim.k2), std::abs(k.k3 - lim.k3)});
        const double ratio = dev / c0;
        CHECK(ratio < 2.0);
        if (prev_ratio > 0) CHECK(ratio == Approx(prev_ratio).epsilon(0.05));
        prev_ratio = ratio;
    }
}

TEST_CASE("kappa algebraic identities over random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const auto p = params(U(rng), U(rng), U(rng));
        const KappaSet k = kappa_from(p);
        CHECK(std::abs(p.alpha * k.k1 + p.c0 * k.k2 - 1.0) <= 1e-15);
        const double a = p.lambda * k.k1, b = p.alpha * k.k2;
        CHECK(std::abs(a - b) <= 1e-15 * std::max(std::abs(a), std::abs(b)));
        CHECK(k.k1 > 0);
        CHECK(k.k2 > 0);
        CHECK(k.k3 > 0);
    }
}

TEST_CASE("Lame conversion") {
    auto l = lame_from_young(1, 0.25);
    CHECK(l.lambda == Approx(0.4).epsilon(1e-15));
    CHECK(l.mu == Approx(0.4).epsilon(1e-15));
    CHECK(l.bulk == Approx(2.0 / 3.0).epsilon(1e-15));
    l = lame_from_young(1, 0);
    CHECK(l.lambda == 0.0);
    CHECK(l.mu == 0.5);
    CHECK(l.bulk == Approx(1.0 / 3.0).epsilon(1e-15));
    l = lame_from_young(ElasticModuli{3, 0.2});
    CHECK(l.lambda == Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(l.mu == Approx(1.25).epsilon(1e-15));
    CHECK(l.bulk == Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(l.bulk == Approx(l.lambda + 2.0 / 3.0 * l.mu).epsilon(1e-14));
    CHECK_THROWS_AS(lame_from_young(1, 0.5), ValidationError);
    CHECK_THROWS_AS(lame_from_young(1, -1.0), ValidationError);
    CHECK_THROWS_AS(lame_from_young(0, 0.2), ValidationError);
}

TEST_CASE("variable change on scalars") {
    const auto p = params(1, 1, 1);
    const auto xe = to_xi_eta(2.0, 3.0, p);
    CHECK(xe.xi == -1.0);
    CHECK(xe.eta == 5.0);
    const auto pq = from_xi_eta(xe.xi, xe.eta, kappa_from(p));
    CHECK(pq.p == 2.0);
    CHECK(pq.q == 3.0);
    const auto z = to_xi_eta(0.0, 0.0, p);
    CHECK(z.xi == 0.0);
    CHECK(z.eta == 0.0);
    const auto back = from_xi_eta(-1.0, 5.0, KappaSet{0.5, 0.5, 0.5});
    CHECK(back.p == 2.0);
    CHECK(back.q == 3.0);
}

TEST_CASE("variable change round trip over random inputs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.1, 10.0), V(-100.0, 100.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto prm = params(U(rng), U(rng), U(rng));
        const double p = V(rng), q = V(rng);
        const auto xe = to_xi_eta(p, q, prm);
        const auto pq = from_xi_eta(xe.xi, xe.eta, kappa_from(prm));
        worst = std::max(worst, std::hypot(pq.p - p, pq.q - q) / std::hypot(p, q));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("variable change on coefficient vectors") {
    const auto prm = params(1.5, 0.7, 0.2);
    Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(5, -1, 1), q = Eigen::VectorXd::LinSpaced(5, 2, 3);
    const auto xe = to_xi_eta(p, q, prm);
    const auto pq = from_xi_eta(xe.xi, xe.eta, kappa_from(prm));
    CHECK((pq.p - p).norm() <= 1e-14 * p.norm());
    CHECK((pq.q - q).norm() <= 1e-14 * q.norm());
}

TEST_CASE("material validation") {
    MaterialParams p;
    CHECK_NOTHROW(p.validate());
    p.K << 1, 0.5, 0.4, 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.K << 1, 2, 2, 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = MaterialParams{};
    p.mu = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = MaterialParams{};
    p.K << 2, 0, 0, 0.5;
    const auto [k1, k2] = p.permeability_bounds();
    CHECK(k1 == Approx(0.5));
    CHECK(k2 == Approx(2.0));
}
