#include "polycycle/builder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polycycle {

BuiltPolycycle build_polycycle(const PolycycleSpec& spec)
{
    const int n = spec.n;
    if (n < 3) throw std::invalid_argument("build_polycycle: n must be >= 3");
    if (static_cast<int>(spec.ratios.size()) != n)
        throw std::invalid_argument("build_polycycle: need n ratios");
    for (double r : spec.ratios)
        if (!(r > 0) || !std::isfinite(r))
            throw std::invalid_argument("build_polycycle: ratios must be positive");

    BuiltPolycycle b;
    b.spec = spec;

    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 1; i <= n; ++i)
        b.vertices.push_back({std::cos(two_pi * i / n), std::sin(two_pi * i / n)});

    // Line i through p_i and p_{i+1}, unit normal oriented so the polygon
    // interior has l_i > 0.
    for (int i = 0; i < n; ++i) {
        const Point2& p = b.vertices[i];
        const Point2& q = b.vertices[(i + 1) % n];
        Vec2 t = {q[0] - p[0], q[1] - p[1]};
        Vec2 nv = {t[1], -t[0]};
        const double len = norm(nv);
        nv = {nv[0] / len, nv[1] / len};
        double off = dot(nv, {p[0], p[1]});
        if (-off < 0) {  // l(0,0) = -offset must be positive
            nv = {-nv[0], -nv[1]};
            off = -off;
        }
        b.lines.push_back({nv[0], nv[1], off});
    }

    // A_i interpolates the two vertex conditions on line i; the leftover
    // degree of freedom is fixed by making grad A_i parallel to the edge.
    const bool cw = spec.orientation == Orientation::clockwise;
    for (int i = 0; i < n; ++i) {
        const Point2& p = b.vertices[i];          // A_i(p_i)
        const Point2& q = b.vertices[(i + 1) % n];  // A_i(p_{i+1})
        // At p_s the eigenvalues are -scale*A_s(p_s) and scale*A_{s-1}(p_s);
        // counterclockwise reverses stable/unstable, so the ratio r_{i+1}
        // moves to the far endpoint to stay attached to its vertex.
        const double at_p = cw ? spec.ratios[i] : -1.0;
        const double at_q = cw ? 1.0 : -spec.ratios[(i + 1) % n];
        Vec2 e = {p[0] - q[0], p[1] - q[1]};
        const double t = (at_p - at_q) / dot(e, e);
        AffineForm a;
        a.a = t * e[0];
        a.b = t * e[1];
        a.c = at_p - (a.a * p[0] + a.b * p[1]);
        b.affine_factors.push_back(a);
    }

    // P = -sum_i beta_i A_i prod_{j != i} l_j,  Q = sum_i alpha_i A_i prod l_j
    Poly2 P, Q;
    for (int i = 0; i < n; ++i) {
        Poly2 prod = Poly2::constant(1.0);
        for (int j = 0; j < n; ++j)
            if (j != i) prod = prod * b.lines[j].as_poly();
        Poly2 term = b.affine_factors[i].as_poly() * prod;
        P += term * -b.lines[i].beta;
        Q += term * b.lines[i].alpha;
    }
    b.field = {std::move(P), std::move(Q)};

    VectorField2 fp = b.field.perp();
    for (int i = 0; i < n; ++i) {
        const Point2& p = b.vertices[i];
        const Point2& q = b.vertices[(i + 1) % n];
        Point2 mid = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
        Vec2 v = fp.eval(mid);
        const double len = norm(v);
        if (len == 0)
            throw std::runtime_error("build_polycycle: singular edge midpoint");
        b.section_bases.push_back(mid);
        b.section_dirs.push_back({v[0] / len, v[1] / len});
    }

    b.sin_theta = std::sin(two_pi / n);

    // M(s) collapses to a constant on the regular polygon; evaluate at s=1.
    double m = 1.0;
    for (int j = 2; j <= n - 1; ++j) m *= b.line(j).eval(b.vertex(1));
    b.m_const = m;

    return b;
}

SaddleData saddle_data(const BuiltPolycycle& b, int s)
{
    if (s < 1 || s > b.n()) throw std::out_of_range("saddle_data: index");
    const double scale = b.sin_theta * b.m_const;
    const double as = b.factor(s).eval(b.vertex(s));
    const double as1 = b.factor(s - 1 == 0 ? b.n() : s - 1).eval(b.vertex(s));
    // clockwise: A_s(p_s)=r_s>0; counterclockwise both negative, so the
    // same closed form lands the negative eigenvalue first either way.
    double mu = -scale * as;
    double nu = scale * as1;
    if (mu > 0) std::swap(mu, nu);
    return {mu, nu, std::abs(mu) / nu};
}

std::vector<EdgeDeformation> build_main3_family(const BuiltPolycycle& b)
{
    std::vector<EdgeDeformation> fam;
    for (int s = 0; s < b.n(); ++s) {
        Poly2 h = Poly2::constant(1.0);
        for (int j = 0; j < b.n(); ++j)
            if (j != s) h = h * b.lines[j].as_poly();
        fam.push_back({std::move(h), {-b.lines[s].alpha, -b.lines[s].beta}});
    }
    return fam;
}

std::pair<int, int> edge_flow(const BuiltPolycycle& b, int i)
{
    if (i < 1 || i > b.n()) throw std::out_of_range("edge_flow: index");
    const Point2 p = b.vertex(i);
    const Point2 q = b.vertex(i + 1 > b.n() ? 1 : i + 1);
    const Vec2 v = b.field.eval(b.section_bases[i - 1]);
    const Vec2 toward_p = {p[0] - q[0], p[1] - q[1]};
    const int nxt = i + 1 > b.n() ? 1 : i + 1;
    if (dot(v, toward_p) > 0) return {nxt, i};  // flowing p_{i+1} -> p_i
    return {i, nxt};
}

}  // namespace polycycle
