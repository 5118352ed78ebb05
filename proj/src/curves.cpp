#include "polycycle/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polycycle {

namespace {

double point_to_segment(const Point2& x, const Point2& a, const Point2& b)
{
    const Vec2 ab = {b[0] - a[0], b[1] - a[1]};
    const Vec2 ax = {x[0] - a[0], x[1] - a[1]};
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(ax, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Point2 c = {a[0] + t * ab[0], a[1] + t * ab[1]};
    return std::hypot(x[0] - c[0], x[1] - c[1]);
}

double directed_hausdorff(const std::vector<Point2>& a,
                          const std::vector<Point2>& b)
{
    double worst = 0;
    for (const Point2& x : a)
        worst = std::max(worst, point_to_polyline(x, b));
    return worst;
}

double signed_area(const std::vector<Point2>& poly)
{
    double s = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % poly.size()];
        s += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * s;
}

std::vector<Point2> resample_closed(const std::vector<Point2>& curve, int m)
{
    const std::size_t n = curve.size();
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = curve[i];
        const Point2& q = curve[(i + 1) % n];
        cum[i + 1] = cum[i] + std::hypot(q[0] - p[0], q[1] - p[1]);
    }
    const double total = cum[n];
    if (total == 0) throw std::invalid_argument("degenerate closed curve");
    std::vector<Point2> out;
    out.reserve(m);
    std::size_t seg = 0;
    for (int k = 0; k < m; ++k) {
        const double target = total * k / m;
        while (seg + 1 < n && cum[seg + 1] < target) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double t = seg_len > 0 ? (target - cum[seg]) / seg_len : 0.0;
        const Point2& p = curve[seg];
        const Point2& q = curve[(seg + 1) % n];
        out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
    return out;
}

}  // namespace

double point_to_polyline(const Point2& x, const std::vector<Point2>& curve)
{
    if (curve.empty()) throw std::invalid_argument("empty curve");
    if (curve.size() == 1)
        return std::hypot(x[0] - curve[0][0], x[1] - curve[0][1]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.size(); ++i)
        best = std::min(best, point_to_segment(x, curve[i],
                                               curve[(i + 1) % curve.size()]));
    return best;
}

double hausdorff_distance(const std::vector<Point2>& a,
                          const std::vector<Point2>& b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff_distance: empty sample");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

ContactReport check_without_contact(const VectorField2& f,
                                    const std::vector<Point2>& curve,
                                    int samples)
{
    if (curve.size() < 3)
        throw std::invalid_argument("check_without_contact: need a closed curve");
    if (samples < 3) throw std::invalid_argument("check_without_contact: samples");

    const bool ccw = signed_area(curve) > 0;
    const std::vector<Point2> pts = resample_closed(curve, samples);

    ContactReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    int sign = 0;
    for (int k = 0; k < samples; ++k) {
        const Point2& p = pts[k];
        const Point2& q = pts[(k + 1) % samples];
        Vec2 t = {q[0] - p[0], q[1] - p[1]};
        const double len = norm(t);
        if (len == 0) continue;
        // outward normal of a ccw polygon is the right-hand normal
        Vec2 nout = ccw ? Vec2{t[1] / len, -t[0] / len}
                        : Vec2{-t[1] / len, t[0] / len};
        const Point2 mid = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
        const Vec2 X = f.eval(mid);
        const double speed = norm(X);
        if (speed == 0)
            throw std::runtime_error(
                "check_without_contact: singularity on the curve");
        const double s = dot(X, nout) / speed;
        if (s == 0.0) {
            rep.without_contact = false;
            rep.min_margin = 0;
            return rep;
        }
        const int this_sign = s > 0 ? 1 : -1;
        if (sign == 0) sign = this_sign;
        if (this_sign != sign) {
            rep.without_contact = false;
            rep.min_margin = 0;
            return rep;
        }
        rep.min_margin = std::min(rep.min_margin, std::abs(s));
    }
    rep.without_contact = true;
    rep.direction = sign > 0 ? ContactDirection::outward
                             : ContactDirection::inward;
    return rep;
}

std::vector<Point2> offset_polygon(const std::vector<Point2>& poly, double dist)
{
    const std::size_t n = poly.size();
    if (n < 3) throw std::invalid_argument("offset_polygon: need >= 3 vertices");
    const bool ccw = signed_area(poly) > 0;

    // outward unit normal per edge i = (poly[i], poly[i+1])
    std::vector<Vec2> normals(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        Vec2 t = {q[0] - p[0], q[1] - p[1]};
        const double len = norm(t);
        if (len == 0) throw std::invalid_argument("offset_polygon: repeated vertex");
        normals[i] = ccw ? Vec2{t[1] / len, -t[0] / len}
                         : Vec2{-t[1] / len, t[0] / len};
    }

    // vertex i+1 is the intersection of offset edges i and i+1
    std::vector<Point2> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        // lines: <x, n_i> = <p_i, n_i> + dist, same for j
        const double ci = dot({poly[i][0], poly[i][1]}, normals[i]) + dist;
        const double cj = dot({poly[j][0], poly[j][1]}, normals[j]) + dist;
        const double det = normals[i][0] * normals[j][1] -
                           normals[i][1] * normals[j][0];
        if (std::abs(det) < 1e-14)
            throw std::runtime_error("offset_polygon: parallel adjacent edges");
        out[j] = {(ci * normals[j][1] - cj * normals[i][1]) / det,
                  (cj * normals[i][0] - ci * normals[j][0]) / det};
    }
    return out;
}

std::vector<Point2> product_level_curve(const std::vector<LineForm>& lines,
                                        double c, int samples,
                                        const std::vector<double>& weights)
{
    if (lines.size() < 3)
        throw std::invalid_argument("product_level_curve: need >= 3 lines");
    if (!weights.empty() && weights.size() != lines.size())
        throw std::invalid_argument("product_level_curve: weights size");
    for (double w : weights)
        if (!(w > 0))
            throw std::invalid_argument("product_level_curve: weights > 0");
    auto F = [&lines, &weights](const Point2& x) {
        double v = 1;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const double li = lines[i].eval(x);
            if (li <= 0) return 0.0;  // outside the positive cell
            v *= weights.empty() ? li : std::pow(li, weights[i]);
        }
        return v;
    };
    if (!(F({0, 0}) > c) || !(c > 0))
        throw std::invalid_argument("product_level_curve: need F(0) > c > 0");
    // radius safely beyond the polygon (all lines have unit normals and
    // pass within distance |offset| of the origin)
    double radius = 0;
    for (const LineForm& l : lines) radius = std::max(radius, std::abs(l.offset));
    radius = 2 * radius + 1;

    std::vector<Point2> curve;
    curve.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double a = 2 * std::numbers::pi * k / samples;
        const Vec2 dir = {std::cos(a), std::sin(a)};
        double lo = 0, hi = radius;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (F({mid * dir[0], mid * dir[1]}) > c ? lo : hi) = mid;
        }
        curve.push_back({lo * dir[0], lo * dir[1]});
    }
    return curve;
}

double level_for_depth(const std::vector<LineForm>& lines, double depth,
                       const std::vector<double>& weights)
{
    auto min_line_dist = [&lines, &weights](double c) {
        const auto curve = product_level_curve(lines, c, 256, weights);
        double d = std::numeric_limits<double>::infinity();
        for (const Point2& p : curve)
            for (const LineForm& l : lines)
                d = std::min(d, std::abs(l.eval(p)));
        return d;
    };
    double clo = 0, chi = 1;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const double li = lines[i].eval({0, 0});
        chi *= weights.empty() ? li : std::pow(li, weights[i]);
    }
    chi *= 0.999;
    if (min_line_dist(chi) < depth)
        throw std::invalid_argument("level_for_depth: depth unreachable");
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (clo + chi);
        if (mid == clo || mid == chi) break;
        (min_line_dist(mid) < depth ? clo : chi) = mid;
    }
    return chi;
}

Point2 find_equilibrium(const VectorField2& f, Point2 seed)
{
    Point2 x = seed;
    for (int it = 0; it < 100; ++it) {
        const Vec2 v = f.eval(x);
        const auto J = jacobian(f, x);
        const double det = J[0] * J[3] - J[1] * J[2];
        if (std::abs(det) < 1e-14)
            throw std::runtime_error("find_equilibrium: singular Jacobian");
        const double dx = (v[0] * J[3] - v[1] * J[1]) / det;
        const double dy = (v[1] * J[0] - v[0] * J[2]) / det;
        x = {x[0] - dx, x[1] - dy};
        if (std::hypot(dx, dy) < 1e-14) break;
    }
    const Vec2 res = f.eval(x);
    if (norm(res) > 1e-10)
        throw std::runtime_error("find_equilibrium: no convergence");
    return x;
}

std::vector<Point2> repelling_core_boundary(const VectorField2& f, Point2 seed,
                                            double scale, int samples)
{
    if (!(scale > 0) || samples < 3)
        throw std::invalid_argument("repelling_core_boundary: bad arguments");
    const Point2 eq = find_equilibrium(f, seed);
    const auto J = jacobian(f, eq);
    const double a = J[0], b = J[1], c = J[2], d = J[3];
    if (!(a + d > 0) || !(a * d - b * c > 0))
        throw std::runtime_error(
            "repelling_core_boundary: equilibrium does not repel");
    // Solve A^T P + P A = I for symmetric P = [[p, q], [q, r]]:
    //   2(a p + c q)          = 1
    //   b p + (a+d) q + c r   = 0
    //   2(b q + d r)          = 1
    double M[3][4] = {{2 * a, 2 * c, 0, 1},
                      {b, a + d, c, 0},
                      {0, 2 * b, 2 * d, 1}};
    for (int i = 0; i < 3; ++i) {
        int piv = i;
        for (int k = i + 1; k < 3; ++k)
            if (std::abs(M[k][i]) > std::abs(M[piv][i])) piv = k;
        for (int j = 0; j < 4; ++j) std::swap(M[i][j], M[piv][j]);
        if (std::abs(M[i][i]) < 1e-14)
            throw std::runtime_error("repelling_core_boundary: Lyapunov solve");
        for (int k = i + 1; k < 3; ++k) {
            const double fac = M[k][i] / M[i][i];
            for (int j = i; j < 4; ++j) M[k][j] -= fac * M[i][j];
        }
    }
    double sol[3];
    for (int i = 2; i >= 0; --i) {
        double s = M[i][3];
        for (int j = i + 1; j < 3; ++j) s -= M[i][j] * sol[j];
        sol[i] = s / M[i][i];
    }
    const double p = sol[0], q = sol[1], r = sol[2];
    if (!(p > 0) || !(p * r - q * q > 0))
        throw std::runtime_error(
            "repelling_core_boundary: Lyapunov form not positive definite");

    std::vector<Point2> ell;
    ell.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double th = 2 * std::numbers::pi * k / samples;
        const double ux = std::cos(th), uy = std::sin(th);
        const double quad = p * ux * ux + 2 * q * ux * uy + r * uy * uy;
        const double rad = scale / std::sqrt(quad);
        ell.push_back({eq[0] + rad * ux, eq[1] + rad * uy});
    }
    return ell;
}

}  // namespace polycycle
