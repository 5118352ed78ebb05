#ifndef POLYCYCLE_POLY_HPP
#define POLYCYCLE_POLY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace polycycle {

using Point2 = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

inline double wedge(const Vec2& u, const Vec2& v)
{
    return u[0] * v[1] - u[1] * v[0];
}

inline double dot(const Vec2& u, const Vec2& v)
{
    return u[0] * v[0] + u[1] * v[1];
}

inline double norm(const Vec2& u)
{
    return std::hypot(u[0], u[1]);
}

/// Sparse bivariate polynomial with binary64 coefficients.
/// Terms are kept sorted by (degree_x1, degree_x2); no duplicate degree
/// pairs and no explicit zero coefficients.
class Poly2 {
public:
    struct Term {
        int i;  // degree in x1
        int j;  // degree in x2
        double c;
    };

    Poly2() = default;
    explicit Poly2(std::vector<Term> terms);

    static Poly2 constant(double c);
    static Poly2 affine(double a, double b, double c);  // a*x1 + b*x2 + c

    double eval(const Point2& x) const;
    Poly2 derivative_x1() const;
    Poly2 derivative_x2() const;

    int degree() const;
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 operator*(double k) const;
    Poly2 operator-() const { return *this * -1.0; }
    Poly2& operator+=(const Poly2& o) { return *this = *this + o; }

private:
    void normalize();
    std::vector<Term> terms_;
};

/// Degree-one polynomial a*x1 + b*x2 + c kept in closed form.
struct AffineForm {
    double a = 0, b = 0, c = 0;

    double eval(const Point2& x) const { return a * x[0] + b * x[1] + c; }
    Poly2 as_poly() const { return Poly2::affine(a, b, c); }
};

/// Straight line alpha*x1 + beta*x2 - offset = 0 with unit normal
/// (alpha, beta).
struct LineForm {
    double alpha = 1, beta = 0, offset = 0;

    double eval(const Point2& x) const
    {
        return alpha * x[0] + beta * x[1] - offset;
    }
    Vec2 normal() const { return {alpha, beta}; }
    Poly2 as_poly() const { return Poly2::affine(alpha, beta, -offset); }
};

/// Planar polynomial vector field X = (P, Q).
struct VectorField2 {
    Poly2 p, q;

    Vec2 eval(const Point2& x) const { return {p.eval(x), q.eval(x)}; }

    /// X^perp = (-Q, P)
    VectorField2 perp() const { return {-q, p}; }
};

Vec2 eval_field(const VectorField2& f, const Point2& x);

/// dP/dx1 + dQ/dx2 at x, with the partials taken symbolically.
double divergence(const VectorField2& f, const Point2& x);

/// 2x2 Jacobian of the field at x (row-major), symbolic partials.
std::array<double, 4> jacobian(const VectorField2& f, const Point2& x);

}  // namespace polycycle

#endif
