#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polycycle/approx.hpp"

using namespace polycycle;
using namespace polycycle::approx;

TEST_CASE("radial bump: plateau, support, monotone glue")
{
    BumpSpec spec{0.1, 0.3, {0.2, -0.1}};
    CHECK(eval_bump(spec, {0.2, -0.1}) == 1.0);
    CHECK(eval_bump(spec, {0.25, -0.1}) == 1.0);   // r = 0.05 < delta1
    CHECK(eval_bump(spec, {0.6, -0.1}) == 0.0);    // r = 0.4 > delta2
    double prev = 1.0;
    for (double r = 0.1; r <= 0.3; r += 0.01) {
        const double v = eval_bump(spec, {0.2 + r, -0.1});
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK_THROWS_AS(eval_bump({0.3, 0.1, {0, 0}}, {0, 0}),
                    std::invalid_argument);
}

TEST_CASE("Bernstein basis is a partition of unity")
{
    for (double x : {0.0, 0.13, 0.5, 0.999, 1.0}) {
        const auto w = BernsteinPoly::weights(40, x);
        double sum = 0;
        for (double v : w) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("Bernstein polynomial reproduces affine functions exactly")
{
    auto f = [](const Point2& x) { return 2.0 * x[0] - x[1] + 0.25; };
    const BernsteinPoly b = bernstein_of(f, 24, 24);
    for (double u : {0.0, 0.2, 0.7, 1.0})
        for (double v : {0.1, 0.5, 0.9})
            CHECK(b.eval({u, v}) == doctest::Approx(f({u, v})).epsilon(1e-12));
}

TEST_CASE("grid evaluation matches pointwise evaluation")
{
    auto f = [](const Point2& x) {
        return std::sin(3 * x[0]) * std::cos(2 * x[1]);
    };
    const BernsteinPoly b = bernstein_of(f, 32, 32);
    const std::vector<double> xs = {0.1, 0.4, 0.85};
    const std::vector<double> ys = {0.0, 0.6, 1.0};
    const auto g = b.eval_grid(xs, ys);
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t c = 0; c < ys.size(); ++c)
            CHECK(g[a * ys.size() + c] ==
                  doctest::Approx(b.eval({xs[a], ys[c]})).epsilon(1e-13));
}

TEST_CASE("shifted bump approximant satisfies the strict sandwich")
{
    BumpSpec spec{0.1, 0.3, {0, 0}};
    Box box{-1, -1, 1, 1};
    const double eps = 0.4;  // loose budget keeps the unit test quick
    const ShiftedBumpPoly q = shifted_bump_polynomial(spec, box, eps);
    for (double x = -1; x <= 1.0001; x += 0.125)
        for (double y = -1; y <= 1.0001; y += 0.125) {
            const double phi = eval_bump(spec, {x, y});
            const double v = q.eval({x, y});
            CHECK(v > phi + eps / 4);
            CHECK(v < phi + 3 * eps / 4);
        }
    CHECK(q.certified_error() < eps / 4);
}

TEST_CASE("degree escalation throws when the cap is too small")
{
    BumpSpec spec{0.1, 0.3, {0, 0}};
    Box box{-1, -1, 1, 1};
    CHECK_THROWS_AS(shifted_bump_polynomial(spec, box, 0.01, 0, 32),
                    std::runtime_error);
}
