#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "polycycle/builder.hpp"
#include "polycycle/flow.hpp"

using namespace polycycle;

namespace {

// hyperbolicity ratio from the symbolic Jacobian at a point
double jacobian_ratio(const VectorField2& f, const Point2& x)
{
    const auto J = jacobian(f, x);
    const double tr = J[0] + J[3];
    const double det = J[0] * J[3] - J[1] * J[2];
    REQUIRE(det < 0);
    const double disc = std::sqrt(tr * tr - 4 * det);
    const double neg = 0.5 * (tr - disc), pos = 0.5 * (tr + disc);
    return -neg / pos;
}

}  // namespace

TEST_CASE("closed-form eigenvalues at the first vertex")
{
    const BuiltPolycycle b =
        build_polycycle({3, {2.0, 3.0, 0.5}, Orientation::clockwise});
    const SaddleData d = saddle_data(b, 1);
    CHECK(d.eigen_neg == doctest::Approx(-2.5980762).epsilon(1e-6));
    CHECK(d.eigen_pos == doctest::Approx(1.2990381).epsilon(1e-6));
    CHECK(d.ratio == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.sin_theta == doctest::Approx(0.8660254).epsilon(1e-6));
    CHECK(b.m_const == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("prescribed ratios are realized at every vertex")
{
    const BuiltPolycycle b =
        build_polycycle({4, {2.0, 0.3, 1.7, 4.0}, Orientation::clockwise});
    for (int s = 1; s <= 4; ++s) {
        CHECK(saddle_data(b, s).ratio ==
              doctest::Approx(b.spec.ratios[s - 1]).epsilon(1e-10));
        CHECK(jacobian_ratio(b.field, b.vertex(s)) ==
              doctest::Approx(b.spec.ratios[s - 1]).epsilon(1e-10));
    }
}

TEST_CASE("polygon edges are invariant lines")
{
    const BuiltPolycycle b =
        build_polycycle({5, {1.2, 0.8, 2.5, 0.4, 1.0}, Orientation::clockwise});
    for (int i = 0; i < 5; ++i) {
        const LineForm& l = b.lines[i];
        // sample points on the carrier line: field must be tangent
        const Point2 p = b.vertices[i];
        const Point2 q = b.vertices[(i + 1) % 5];
        for (double t : {-0.5, 0.1, 0.5, 0.9, 1.7}) {
            const Point2 x = {p[0] + t * (q[0] - p[0]),
                              p[1] + t * (q[1] - p[1])};
            const Vec2 v = b.field.eval(x);
            CHECK(std::abs(dot(v, l.normal())) < 1e-10);
        }
    }
}

TEST_CASE("vertices are equilibria and sections sit mid-edge")
{
    const BuiltPolycycle b =
        build_polycycle({3, {2.0, 2.0, 2.0}, Orientation::clockwise});
    for (int s = 1; s <= 3; ++s) {
        const Vec2 v = b.field.eval(b.vertex(s));
        CHECK(norm(v) < 1e-12);
    }
    for (int i = 0; i < 3; ++i) {
        CHECK(norm(b.section_dirs[i]) == doctest::Approx(1.0).epsilon(1e-13));
        // the section direction is perpendicular to the flow there
        const Vec2 x = b.field.eval(b.section_bases[i]);
        CHECK(std::abs(dot(x, b.section_dirs[i])) < 1e-12);
    }
}

TEST_CASE("clockwise edge orbits flow from p_{i+1} to p_i")
{
    const BuiltPolycycle b =
        build_polycycle({3, {2.0, 1.0 / 3.0, 4.0}, Orientation::clockwise});
    for (int i = 1; i <= 3; ++i) {
        const auto [source, sink] = edge_flow(b, i);
        CHECK(source == (i % 3) + 1);
        CHECK(sink == i);
    }
}

TEST_CASE("counterclockwise build realizes the same ratios")
{
    const BuiltPolycycle b =
        build_polycycle({3, {2.0, 3.0, 0.5}, Orientation::counterclockwise});
    for (int s = 1; s <= 3; ++s)
        CHECK(saddle_data(b, s).ratio ==
              doctest::Approx(b.spec.ratios[s - 1]).epsilon(1e-10));
    for (int i = 1; i <= 3; ++i) {
        const auto [source, sink] = edge_flow(b, i);
        CHECK(source == i);  // reversed edge orbits
        CHECK(sink == (i % 3) + 1);
    }
}

TEST_CASE("builder rejects invalid specs")
{
    CHECK_THROWS_AS(build_polycycle({2, {1.0, 1.0}, Orientation::clockwise}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_polycycle({3, {1.0, -1.0, 1.0},
                                     Orientation::clockwise}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_polycycle({3, {1.0, 1.0}, Orientation::clockwise}),
                    std::invalid_argument);
}
