#include <doctest.h>

#include "polycycle/poly.hpp"

using namespace polycycle;

TEST_CASE("sparse polynomial arithmetic and evaluation")
{
    // p = x1^2 + 2 x1 x2 - 3
    Poly2 p({{2, 0, 1.0}, {1, 1, 2.0}, {0, 0, -3.0}});
    CHECK(p.eval({2.0, 1.5}) == doctest::Approx(4.0 + 6.0 - 3.0));
    CHECK(p.degree() == 2);

    Poly2 q = Poly2::affine(1.0, -1.0, 0.5);  // x1 - x2 + 0.5
    Poly2 r = p * q + q;
    const Point2 x = {0.7, -0.3};
    CHECK(r.eval(x) ==
          doctest::Approx(p.eval(x) * q.eval(x) + q.eval(x)).epsilon(1e-14));

    // duplicate and zero terms collapse
    Poly2 z({{1, 0, 1.0}, {1, 0, -1.0}, {0, 0, 0.0}});
    CHECK(z.empty());
    CHECK(z.eval({5.0, 5.0}) == 0.0);
}

TEST_CASE("symbolic derivatives match finite differences")
{
    Poly2 p({{3, 1, 0.5}, {1, 2, -2.0}, {0, 0, 1.0}});
    const Point2 x = {0.4, -1.1};
    const double h = 1e-6;
    const double fd1 =
        (p.eval({x[0] + h, x[1]}) - p.eval({x[0] - h, x[1]})) / (2 * h);
    const double fd2 =
        (p.eval({x[0], x[1] + h}) - p.eval({x[0], x[1] - h})) / (2 * h);
    CHECK(p.derivative_x1().eval(x) == doctest::Approx(fd1).epsilon(1e-8));
    CHECK(p.derivative_x2().eval(x) == doctest::Approx(fd2).epsilon(1e-8));
}

TEST_CASE("divergence and jacobian of a field")
{
    VectorField2 f{Poly2({{2, 0, 1.0}, {0, 1, -1.0}}),
                   Poly2({{1, 1, 3.0}, {0, 0, 0.25}})};
    const Point2 x = {-0.6, 0.9};
    // div = d/dx1 (x1^2 - x2) + d/dx2 (3 x1 x2 + 1/4) = 2 x1 + 3 x1
    CHECK(divergence(f, x) == doctest::Approx(5 * x[0]).epsilon(1e-13));
    const auto J = jacobian(f, x);
    CHECK(J[0] == doctest::Approx(2 * x[0]));
    CHECK(J[1] == doctest::Approx(-1.0));
    CHECK(J[2] == doctest::Approx(3 * x[1]));
    CHECK(J[3] == doctest::Approx(3 * x[0]));
}

TEST_CASE("perp field rotates by 90 degrees")
{
    VectorField2 f{Poly2::affine(1, 0, 0), Poly2::affine(0, 1, 0)};
    VectorField2 fp = f.perp();
    const Point2 x = {0.3, 0.8};
    const Vec2 v = f.eval(x), w = fp.eval(x);
    CHECK(dot(v, w) == doctest::Approx(0.0));
    CHECK(wedge(v, w) == doctest::Approx(dot(v, v)));
}
