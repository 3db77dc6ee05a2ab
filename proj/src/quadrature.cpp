#include "poro/quadrature.hpp"

#include "poro/errors.hpp"

#include <cmath>
#include <string>

namespace poro {

namespace {

QuadRule make_centroid() {
    QuadRule r;
    r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    r.weights.push_back(1.0);
    r.degree = 1;
    return r;
}

QuadRule make_degree2() {
    QuadRule r;
    const double a = 1.0 / 6.0, b = 2.0 / 3.0;
    r.points = {{b, a, a}, {a, b, a}, {a, a, b}};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    r.degree = 2;
    return r;
}

// Six-point symmetric rule (two orbits of three points).
QuadRule make_degree4() {
    const double a = 0.4459484909159648863183292538830519883991;
    const double wa = 0.2233815896780114656950070084331228043703;
    const double b = 0.09157621350977074345957146340220150785433;
    const double wb = 0.1099517436553218676383263249002105289631;
    QuadRule r;
    for (auto [c, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
        const double d = 1.0 - 2.0 * c;
        r.points.emplace_back(c, c, d);
        r.points.emplace_back(c, d, c);
        r.points.emplace_back(d, c, c);
        for (int k = 0; k < 3; ++k) r.weights.push_back(w);
    }
    r.degree = 4;
    return r;
}

}  // namespace

const QuadRule& triangle_rule(int degree) {
    static const QuadRule r1 = make_centroid();
    static const QuadRule r2 = make_degree2();
    static const QuadRule r4 = make_degree4();
    switch (degree) {
        case 1: return r1;
        case 2: return r2;
        case 3:
        case 4: return r4;
        default: throw ValidationError("no triangle rule of degree " + std::to_string(degree));
    }
}

const LineRule& edge_rule() {
    static const LineRule rule = [] {
        LineRule r;
        const double s = 0.5 * std::sqrt(3.0 / 5.0);
        r.points = {0.5 - s, 0.5, 0.5 + s};
        r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
        r.degree = 5;
        return r;
    }();
    return rule;
}

}  // namespace poro
