#ifndef POLYCYCLE_APPROX_HPP
#define POLYCYCLE_APPROX_HPP

#include <functional>
#include <vector>

#include "polycycle/poly.hpp"

namespace polycycle::approx {

/// Radial bump: 1 inside the delta1-disk around center, 0 outside the
/// delta2-disk, smooth exp(-1/t)-glued step in between.
struct BumpSpec {
    double delta1 = 0.1;
    double delta2 = 0.3;
    Point2 center = {0, 0};
};

double eval_bump(const BumpSpec& spec, const Point2& x);

/// Tensor Bernstein polynomial on [0,1]^2, held by its sample grid.
/// Evaluation is a convex combination of the samples, so the range of F
/// is preserved.
class BernsteinPoly {
public:
    BernsteinPoly(int m, int n, std::vector<double> samples);  // row-major (m+1)x(n+1)

    double eval(const Point2& x) const;
    /// Evaluate on a tensor grid (separable, much faster than pointwise).
    std::vector<double> eval_grid(const std::vector<double>& xs,
                                  const std::vector<double>& ys) const;

    int degree_m() const { return m_; }
    int degree_n() const { return n_; }
    const std::vector<double>& samples() const { return samples_; }

    /// Basis weights C(m,r) x^r (1-x)^(m-r), r = 0..m.
    static std::vector<double> weights(int m, double x);

private:
    int m_, n_;
    std::vector<double> samples_;
};

BernsteinPoly bernstein_of(const std::function<double(const Point2&)>& f,
                           int m, int n);

/// Axis-aligned box [lo1,hi1] x [lo2,hi2].
struct Box {
    double lo1, lo2, hi1, hi2;
};

/// Strictly positive polynomial approximant of the bump on the box:
/// a Bernstein fit shifted up by eps/2, with the degree escalated until a
/// grid certificate bounds value (and finite-difference derivatives up to
/// order r) by eps/4. Sandwich on the box:
///   bump(x) + eps/4 < q(x) < bump(x) + 3 eps/4.
class ShiftedBumpPoly {
public:
    double eval(const Point2& x) const;
    std::vector<double> eval_grid(const std::vector<double>& xs,
                                  const std::vector<double>& ys) const;

    int degree() const { return bern_.degree_m(); }
    double certified_error() const { return certified_error_; }
    const Box& box() const { return box_; }

    friend ShiftedBumpPoly shifted_bump_polynomial(const BumpSpec&, const Box&,
                                                   double, int, int);

private:
    ShiftedBumpPoly(BernsteinPoly b, Box box, double shift, double err)
        : bern_(std::move(b)), box_(box), shift_(shift), certified_error_(err)
    {
    }
    Point2 to_unit(const Point2& x) const;

    BernsteinPoly bern_;
    Box box_;
    double shift_;
    double certified_error_;
};

ShiftedBumpPoly shifted_bump_polynomial(const BumpSpec& spec, const Box& box,
                                        double eps, int smoothness_order = 0,
                                        int degree_cap = 4096);

}  // namespace polycycle::approx

#endif
