#include "poro/errors.hpp"
#include "poro/fe_space.hpp"
#include "poro/mesh.hpp"
#include "poro/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace poro;
using doctest::Approx;

namespace {

const std::string fixtures = POR_FIXTURES;

double signed_area_sum(const Mesh& m) {
    double s = 0;
    for (int c = 0; c < m.num_cells(); ++c) s += m.cell_area(c);
    return s;
}

// Integral of f over the mesh with the degree-4 rule.
template <class F>
double integrate(const Mesh& m, F f) {
    const QuadRule& q = triangle_rule(4);
    double s = 0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.cell(c);
        for (std::size_t k = 0; k < q.points.size(); ++k) {
            const Eigen::Vector2d x = q.points[k](0) * m.vertex(t[0]) + q.points[k](1) * m.vertex(t[1]) +
                                      q.points[k](2) * m.vertex(t[2]);
            s += q.weights[k] * m.cell_area(c) * f(x);
        }
    }
    return s;
}

// Boundary integral of g(x, n) with the three-point Gauss rule.
template <class G>
double integrate_boundary(const Mesh& m, G g) {
    const LineRule& q = edge_rule();
    double s = 0;
    for (std::size_t b = 0; b < m.boundary().size(); ++b) {
        const auto& e = m.boundary()[b];
        const Eigen::Vector2d a = m.vertex(e.v[0]), z = m.vertex(e.v[1]);
        const Eigen::Vector2d n = m.outward_normal(static_cast<int>(b));
        for (std::size_t k = 0; k < q.points.size(); ++k)
            s += q.weights[k] * m.boundary_edge_length(static_cast<int>(b)) * g(a + q.points[k] * (z - a), n);
    }
    return s;
}

}  // namespace

TEST_CASE("unit square counts and area") {
    const Mesh m1 = unit_square_mesh(1);
    CHECK(m1.num_vertices() == 5);
    CHECK(m1.num_cells() == 4);
    CHECK(m1.total_area() == Approx(1.0).epsilon(1e-15));
    const Mesh m2 = unit_square_mesh(2);
    CHECK(m2.num_vertices() == 13);
    CHECK(m2.num_cells() == 16);
    for (int n = 1; n <= 6; ++n) {
        const Mesh m = unit_square_mesh(n);
        CHECK(m.num_vertices() == (n + 1) * (n + 1) + n * n);
        CHECK(m.num_cells() == 4 * n * n);
        CHECK(std::abs(signed_area_sum(m) - 1.0) <= 1e-14);
        for (int c = 0; c < m.num_cells(); ++c) CHECK(m.cell_area(c) > 0);
    }
    CHECK_THROWS_AS(unit_square_mesh(0), ValidationError);
}

TEST_CASE("centered square symmetry") {
    const Mesh m = centered_square_mesh(2);
    double xmin = 1, xmax = -1, ymin = 1, ymax = -1;
    for (const auto& v : m.vertices()) {
        xmin = std::min(xmin, v.x());
        xmax = std::max(xmax, v.x());
        ymin = std::min(ymin, v.y());
        ymax = std::max(ymax, v.y());
    }
    CHECK(xmin == -0.5);
    CHECK(xmax == 0.5);
    CHECK(ymin == -0.5);
    CHECK(ymax == 0.5);
    const Mesh m4 = centered_square_mesh(4);
    CHECK(std::abs(integrate(m4, [](const Eigen::Vector2d& x) { return x.x(); })) <= 1e-15);
    CHECK(std::abs(integrate(m4, [](const Eigen::Vector2d& x) { return x.y(); })) <= 1e-15);
    const double flux = integrate_boundary(m4, [](const Eigen::Vector2d& x, const Eigen::Vector2d& n) { return x.x() * n.x(); });
    CHECK(flux == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boundary tags and orientation") {
    const Mesh m = unit_square_mesh(3);
    std::set<int> tags;
    for (std::size_t b = 0; b < m.boundary().size(); ++b) {
        tags.insert(m.boundary()[b].tag);
        const Eigen::Vector2d n = m.outward_normal(static_cast<int>(b));
        const auto& e = m.boundary()[b];
        const Eigen::Vector2d mid = 0.5 * (m.vertex(e.v[0]) + m.vertex(e.v[1]));
        // The outward normal points away from the center of the square.
        CHECK((mid - Eigen::Vector2d(0.5, 0.5)).dot(n) > 0);
    }
    CHECK(tags == std::set<int>{kBottom, kRight, kTop, kLeft});
    CHECK(m.boundary().size() == 12u);
}

TEST_CASE("uniform refinement") {
    const Mesh m = unit_square_mesh(1);
    const Mesh r = refine_uniform(m);
    CHECK(r.num_cells() == 16);
    CHECK(r.boundary().size() == 2 * m.boundary().size());
    CHECK(std::abs(r.total_area() - 1.0) <= 1e-15);
    CHECK(r.max_edge_length() == Approx(0.5 * m.max_edge_length()).epsilon(1e-14));
    CHECK(r.level() == m.level() + 1);
    Mesh cur = centered_square_mesh(2);
    for (int k = 0; k < 3; ++k) {
        cur = refine_uniform(cur);
        CHECK(std::abs(signed_area_sum(cur) - 1.0) <= 1e-14);
    }
}

TEST_CASE("Euler characteristic of a disk") {
    for (const Mesh& m : {unit_square_mesh(1), unit_square_mesh(4), refine_uniform(centered_square_mesh(3))})
        CHECK(m.num_vertices() - m.num_edges() + m.num_cells() == 1);
}

TEST_CASE("discrete divergence theorem for quadratic fields") {
    const Mesh m = refine_uniform(centered_square_mesh(2));
    // u = (x^2 + 3xy - y, 2y^2 - x y + x), div u = 2x + 3y + 4y - x = x + 7y
    auto u = [](const Eigen::Vector2d& x) {
        return Eigen::Vector2d(x.x() * x.x() + 3 * x.x() * x.y() - x.y(), 2 * x.y() * x.y() - x.x() * x.y() + x.x());
    };
    const double vol = integrate(m, [](const Eigen::Vector2d& x) { return x.x() + 7 * x.y() + 0.0; });
    const double bnd = integrate_boundary(m, [&](const Eigen::Vector2d& x, const Eigen::Vector2d& n) { return u(x).dot(n); });
    CHECK(std::abs(vol - bnd) <= 1e-13);
    const Mesh w = unit_square_mesh(3);
    const double vol2 = integrate(w, [](const Eigen::Vector2d& x) { return x.x() + 7 * x.y(); });
    const double bnd2 = integrate_boundary(w, [&](const Eigen::Vector2d& x, const Eigen::Vector2d& n) { return u(x).dot(n); });
    CHECK(std::abs(vol2 - bnd2) <= 1e-13);
    CHECK(vol2 == Approx(4.0).epsilon(1e-13));
}

TEST_CASE("mesh text round trip is exact") {
    const Mesh m = refine_uniform(unit_square_mesh(2));
    std::stringstream ss;
    write_mesh(m, ss);
    const Mesh back = read_mesh(ss, "roundtrip");
    CHECK(back == m);
    for (int v = 0; v < m.num_vertices(); ++v) CHECK(back.vertex(v) == m.vertex(v));
    const Mesh odd = crossed_rectangle_mesh(0.1, 0.7, -0.3, 1.0 / 3.0, 3);
    std::stringstream s2;
    write_mesh(odd, s2);
    CHECK(read_mesh(s2) == odd);
}

TEST_CASE("malformed and invalid mesh files are rejected") {
    CHECK_THROWS_AS(read_mesh(std::filesystem::path(fixtures + "/negative_area.mesh")), ValidationError);
    CHECK_THROWS_AS(read_mesh(std::filesystem::path(fixtures + "/dangling_boundary.mesh")), ValidationError);
    try {
        read_mesh(std::filesystem::path(fixtures + "/malformed.mesh"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::stringstream missing("VERTICES 1\n0 0\n");
    CHECK_THROWS_AS(read_mesh(missing), ParseError);
}

TEST_CASE("constructor validation") {
    using V = Eigen::Vector2d;
    // Boundary missing an edge.
    CHECK_THROWS_AS(Mesh({V(0, 0), V(1, 0), V(0, 1)}, {{0, 1, 2}}, {{{0, 1}, 1}, {{1, 2}, 1}}), ValidationError);
    // Vertex index out of range.
    CHECK_THROWS_AS(Mesh({V(0, 0), V(1, 0), V(0, 1)}, {{0, 1, 5}}, {}), ValidationError);
    // Valid single triangle.
    CHECK_NOTHROW(Mesh({V(0, 0), V(1, 0), V(0, 1)}, {{0, 1, 2}}, {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 0}, 1}}));
}

TEST_CASE("quadrature exactness on the reference triangle") {
    // Integral of x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    auto fact = [](int n) {
        double f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    for (int degree : {1, 2, 4}) {
        const QuadRule& q = triangle_rule(degree);
        double wsum = 0;
        for (double w : q.weights) {
            CHECK(w > 0);
            wsum += w;
        }
        CHECK(std::abs(wsum - 1.0) <= 1e-15);
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                double s = 0;
                for (std::size_t k = 0; k < q.points.size(); ++k)
                    s += q.weights[k] * 0.5 * std::pow(q.points[k](1), a) * std::pow(q.points[k](2), b);
                CHECK(std::abs(s - fact(a) * fact(b) / fact(a + b + 2)) <= 1e-15);
            }
    }
    CHECK_THROWS(triangle_rule(7));
    const LineRule& e = edge_rule();
    for (int k = 0; k <= 5; ++k) {
        double s = 0;
        for (std::size_t i = 0; i < e.points.size(); ++i) s += e.weights[i] * std::pow(e.points[i], k);
        CHECK(std::abs(s - 1.0 / (k + 1)) <= 1e-15);
    }
}
