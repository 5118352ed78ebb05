#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "polycycle/curves.hpp"

using namespace polycycle;

namespace {

std::vector<Point2> circle(double radius, int samples,
                           const Point2& center = {0, 0})
{
    std::vector<Point2> pts;
    pts.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double a = 2 * std::numbers::pi * k / samples;
        pts.push_back({center[0] + radius * std::cos(a),
                       center[1] + radius * std::sin(a)});
    }
    return pts;
}

}  // namespace

TEST_CASE("hausdorff distance closed forms")
{
    const auto c1 = circle(1.0, 256);
    CHECK(hausdorff_distance(c1, c1) == 0.0);

    // degenerate curve at the origin vs the unit circle
    const std::vector<Point2> origin = {{0, 0}};
    CHECK(hausdorff_distance(c1, origin) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(hausdorff_distance(origin, c1) == doctest::Approx(1.0).epsilon(1e-3));

    const auto c2 = circle(1.1, 256);
    CHECK(hausdorff_distance(c1, c2) == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("hausdorff distance is a metric on random polylines")
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_poly = [&] {
        std::vector<Point2> p(8);
        for (auto& q : p) q = {u(rng), u(rng)};
        return p;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_poly(), b = random_poly(), c = random_poly();
        const double ab = hausdorff_distance(a, b);
        const double ba = hausdorff_distance(b, a);
        const double ac = hausdorff_distance(a, c);
        const double cb = hausdorff_distance(c, b);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab >= 0);
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("without-contact check on closed-form fields")
{
    const auto c1 = circle(1.0, 512);

    // radial outflow: crosses every circle strictly outward, margin 1
    VectorField2 radial{Poly2::affine(1, 0, 0), Poly2::affine(0, 1, 0)};
    const ContactReport out = check_without_contact(radial, c1);
    CHECK(out.without_contact);
    CHECK(out.direction == ContactDirection::outward);
    CHECK(out.min_margin == doctest::Approx(1.0).epsilon(1e-3));

    // radial inflow
    VectorField2 inflow{Poly2::affine(-1, 0, 0), Poly2::affine(0, -1, 0)};
    const ContactReport in = check_without_contact(inflow, c1);
    CHECK(in.without_contact);
    CHECK(in.direction == ContactDirection::inward);

    // rotation: tangent to the circle, never transversal
    VectorField2 rot{Poly2::affine(0, -1, 0), Poly2::affine(1, 0, 0)};
    CHECK_FALSE(check_without_contact(rot, c1).without_contact);
}

TEST_CASE("orientation of the input curve does not matter")
{
    auto c1 = circle(1.0, 512);
    std::reverse(c1.begin(), c1.end());
    VectorField2 radial{Poly2::affine(1, 0, 0), Poly2::affine(0, 1, 0)};
    const ContactReport out = check_without_contact(radial, c1);
    CHECK(out.without_contact);
    CHECK(out.direction == ContactDirection::outward);
}

TEST_CASE("polygon offset moves edges by the requested distance")
{
    const std::vector<Point2> square = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    const auto inner = offset_polygon(square, -0.25);
    REQUIRE(inner.size() == 4);
    for (const auto& p : inner) {
        CHECK(std::abs(std::abs(p[0]) - 0.75) < 1e-12);
        CHECK(std::abs(std::abs(p[1]) - 0.75) < 1e-12);
    }
    const auto outer = offset_polygon(square, 0.5);
    for (const auto& p : outer) {
        CHECK(std::abs(std::abs(p[0]) - 1.5) < 1e-12);
        CHECK(std::abs(std::abs(p[1]) - 1.5) < 1e-12);
    }
    // Hausdorff between the square and its inward offset equals the
    // corner displacement 0.25 * sqrt(2)
    CHECK(hausdorff_distance(square, inner) ==
          doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("product level curve for the unit square lines")
{
    // lines x = +-1, y = +-1 written with inward-positive orientation
    // (LineForm evaluates alpha*x + beta*y - offset)
    const std::vector<LineForm> lines = {
        {1, 0, -1}, {-1, 0, -1}, {0, 1, -1}, {0, -1, -1}};
    // F = (1-x^2)(1-y^2); at c = 1 - 1/16 the axis crossings sit at +-1/4
    const double c = 1.0 - 1.0 / 16.0;
    const auto curve = product_level_curve(lines, c, 720);
    double on_axis = 0;
    for (const auto& p : curve)
        if (std::abs(p[1]) < 1e-3) on_axis = std::max(on_axis, std::abs(p[0]));
    CHECK(on_axis == doctest::Approx(0.25).epsilon(1e-3));
    // every sample lies on the level set
    for (const auto& p : curve) {
        double f = 1;
        for (const auto& l : lines) f *= l.eval(p);
        CHECK(f == doctest::Approx(c).epsilon(1e-9));
    }
    // level_for_depth inverts the minimal line distance
    const double cd = level_for_depth(lines, 0.5);
    const auto dcurve = product_level_curve(lines, cd, 720);
    double mind = 1e300;
    for (const auto& p : dcurve)
        for (const auto& l : lines) mind = std::min(mind, l.eval(p));
    CHECK(mind == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("weighted product level curve respects the exponents")
{
    const std::vector<LineForm> lines = {
        {1, 0, -1}, {-1, 0, -1}, {0, 1, -1}, {0, -1, -1}};
    const std::vector<double> w = {2, 1, 1, 1};
    const auto curve = product_level_curve(lines, 0.5, 360, w);
    for (const auto& p : curve) {
        double f = 1;
        for (std::size_t i = 0; i < 4; ++i)
            f *= std::pow(lines[i].eval(p), w[i]);
        CHECK(f == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK_THROWS(product_level_curve(lines, 0.5, 360, {1, 1}));
    CHECK_THROWS(product_level_curve(lines, 0.5, 360, {1, -1, 1, 1}));
}

TEST_CASE("find_equilibrium on a shifted linear field")
{
    // X = (x - 0.3, 2(y + 0.1)): equilibrium at (0.3, -0.1)
    VectorField2 f{Poly2::affine(1, 0, -0.3), Poly2::affine(0, 2, 0.2)};
    const Point2 eq = find_equilibrium(f, {0, 0});
    CHECK(eq[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(eq[1] == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("repelling core boundary certifies an unstable focus")
{
    // weakly unstable focus: X = (0.1 x - y, x + 0.1 y)
    VectorField2 f{Poly2::affine(0.1, -1, 0), Poly2::affine(1, 0.1, 0)};
    const auto ell = repelling_core_boundary(f, {0.2, 0.2}, 0.05);
    const auto rep = check_without_contact(f, ell, 512);
    CHECK(rep.without_contact);
    CHECK(rep.direction == ContactDirection::outward);
    CHECK(rep.min_margin > 0.01);

    // a stable focus must be rejected
    VectorField2 g{Poly2::affine(-0.1, -1, 0), Poly2::affine(1, -0.1, 0)};
    CHECK_THROWS(repelling_core_boundary(g, {0.2, 0.2}, 0.05));
}
