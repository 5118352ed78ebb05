#include "polycycle/approx.hpp"

#include <cmath>
#include <stdexcept>

namespace polycycle::approx {

namespace {

double glue(double t)
{
    return t > 0 ? std::exp(-1.0 / t) : 0.0;
}

// 1 for u <= 0, 0 for u >= 1, smooth and monotone in between
double smooth_step(double u)
{
    const double a = glue(1.0 - u);
    const double b = glue(u);
    return a / (a + b);
}

}  // namespace

double eval_bump(const BumpSpec& spec, const Point2& x)
{
    if (!(spec.delta1 > 0) || !(spec.delta2 > spec.delta1))
        throw std::invalid_argument("bump: need 0 < delta1 < delta2");
    const double r =
        std::hypot(x[0] - spec.center[0], x[1] - spec.center[1]);
    if (r <= spec.delta1) return 1.0;
    if (r >= spec.delta2) return 0.0;
    return smooth_step((r - spec.delta1) / (spec.delta2 - spec.delta1));
}

BernsteinPoly::BernsteinPoly(int m, int n, std::vector<double> samples)
    : m_(m), n_(n), samples_(std::move(samples))
{
    if (m < 1 || n < 1) throw std::invalid_argument("bernstein: degrees >= 1");
    if (samples_.size() != static_cast<std::size_t>((m + 1) * (n + 1)))
        throw std::invalid_argument("bernstein: sample grid size mismatch");
}

std::vector<double> BernsteinPoly::weights(int m, double x)
{
    std::vector<double> w(m + 1);
    if (x <= 0.0) {
        w[0] = 1.0;
        return w;
    }
    if (x >= 1.0) {
        w[m] = 1.0;
        return w;
    }
    // log-space to stay finite at high degree, then renormalize the
    // partition of unity to cancel rounding drift
    const double lx = std::log(x), l1x = std::log1p(-x);
    double sum = 0.0;
    for (int r = 0; r <= m; ++r) {
        const double lw = std::lgamma(m + 1.0) - std::lgamma(r + 1.0) -
                          std::lgamma(m - r + 1.0) + r * lx + (m - r) * l1x;
        w[r] = std::exp(lw);
        sum += w[r];
    }
    for (auto& v : w) v /= sum;
    return w;
}

double BernsteinPoly::eval(const Point2& x) const
{
    const auto wx = weights(m_, x[0]);
    const auto wy = weights(n_, x[1]);
    double acc = 0.0;
    for (int r = 0; r <= m_; ++r) {
        if (wx[r] == 0.0) continue;
        double row = 0.0;
        const double* s = &samples_[static_cast<std::size_t>(r) * (n_ + 1)];
        for (int c = 0; c <= n_; ++c) row += wy[c] * s[c];
        acc += wx[r] * row;
    }
    return acc;
}

std::vector<double> BernsteinPoly::eval_grid(const std::vector<double>& xs,
                                             const std::vector<double>& ys) const
{
    // (W_x F) W_y^T, row-major result xs.size() x ys.size()
    const std::size_t nx = xs.size(), ny = ys.size();
    std::vector<double> mid(nx * (n_ + 1), 0.0);
    for (std::size_t a = 0; a < nx; ++a) {
        const auto wx = weights(m_, xs[a]);
        for (int r = 0; r <= m_; ++r) {
            const double w = wx[r];
            if (w == 0.0) continue;
            const double* s = &samples_[static_cast<std::size_t>(r) * (n_ + 1)];
            double* out = &mid[a * (n_ + 1)];
            for (int c = 0; c <= n_; ++c) out[c] += w * s[c];
        }
    }
    std::vector<double> res(nx * ny);
    for (std::size_t b = 0; b < ny; ++b) {
        const auto wy = weights(n_, ys[b]);
        for (std::size_t a = 0; a < nx; ++a) {
            const double* m = &mid[a * (n_ + 1)];
            double acc = 0.0;
            for (int c = 0; c <= n_; ++c) acc += wy[c] * m[c];
            res[a * ny + b] = acc;
        }
    }
    return res;
}

BernsteinPoly bernstein_of(const std::function<double(const Point2&)>& f,
                           int m, int n)
{
    std::vector<double> samples(static_cast<std::size_t>(m + 1) * (n + 1));
    for (int r = 0; r <= m; ++r)
        for (int c = 0; c <= n; ++c)
            samples[static_cast<std::size_t>(r) * (n + 1) + c] =
                f({double(r) / m, double(c) / n});
    return BernsteinPoly(m, n, std::move(samples));
}

Point2 ShiftedBumpPoly::to_unit(const Point2& x) const
{
    return {(x[0] - box_.lo1) / (box_.hi1 - box_.lo1),
            (x[1] - box_.lo2) / (box_.hi2 - box_.lo2)};
}

double ShiftedBumpPoly::eval(const Point2& x) const
{
    return bern_.eval(to_unit(x)) + shift_;
}

std::vector<double> ShiftedBumpPoly::eval_grid(const std::vector<double>& xs,
                                               const std::vector<double>& ys) const
{
    std::vector<double> us(xs.size()), vs(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        us[i] = (xs[i] - box_.lo1) / (box_.hi1 - box_.lo1);
    for (std::size_t i = 0; i < ys.size(); ++i)
        vs[i] = (ys[i] - box_.lo2) / (box_.hi2 - box_.lo2);
    auto g = bern_.eval_grid(us, vs);
    for (auto& v : g) v += shift_;
    return g;
}

ShiftedBumpPoly shifted_bump_polynomial(const BumpSpec& spec, const Box& box,
                                        double eps, int smoothness_order,
                                        int degree_cap)
{
    if (!(eps > 0)) throw std::invalid_argument("shifted bump: eps > 0");
    if (!(box.hi1 > box.lo1) || !(box.hi2 > box.lo2))
        throw std::invalid_argument("shifted bump: degenerate box");

    const double sx = box.hi1 - box.lo1, sy = box.hi2 - box.lo2;
    auto bump_unit = [&](const Point2& u) {
        return eval_bump(spec, {box.lo1 + u[0] * sx, box.lo2 + u[1] * sy});
    };

    // certificate grid: fixed, denser than the transition band
    const int g = 160;
    std::vector<double> grid(g + 1);
    for (int i = 0; i <= g; ++i) grid[i] = double(i) / g;
    std::vector<double> phi((g + 1) * (g + 1));
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j)
            phi[static_cast<std::size_t>(i) * (g + 1) + j] =
                bump_unit({grid[i], grid[j]});

    const double target = 0.25 * eps;
    for (int m = 16; m <= degree_cap; m *= 2) {
        BernsteinPoly b = bernstein_of(bump_unit, m, m);
        auto vals = b.eval_grid(grid, grid);
        double err = 0.0;
        for (std::size_t k = 0; k < vals.size(); ++k)
            err = std::max(err, std::abs(vals[k] - phi[k]));
        // finite-difference surrogate for derivative orders 1..r: the
        // error of grid differences of (B - phi) scaled by the step
        double derr = 0.0;
        const double h = 1.0 / g;
        for (int ord = 1; ord <= smoothness_order; ++ord) {
            for (int axis = 0; axis < 2; ++axis)
                for (int i = 0; i + (axis == 0 ? ord : 0) <= g; ++i)
                    for (int j = 0; j + (axis == 1 ? ord : 0) <= g; ++j) {
                        double dx = 0.0, dphi = 0.0;
                        for (int k = 0; k <= ord; ++k) {
                            const double sgn = (ord - k) % 2 ? -1.0 : 1.0;
                            const double binom = std::exp(
                                std::lgamma(ord + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(ord - k + 1.0));
                            const std::size_t idx =
                                axis == 0
                                    ? static_cast<std::size_t>(i + k) * (g + 1) + j
                                    : static_cast<std::size_t>(i) * (g + 1) + j + k;
                            dx += sgn * binom * vals[idx];
                            dphi += sgn * binom * phi[idx];
                        }
                        derr = std::max(derr,
                                        std::abs(dx - dphi) / std::pow(h, ord));
                    }
        }
        if (err < target && derr < target)
            return ShiftedBumpPoly(std::move(b), box, 0.5 * eps, err);
    }
    throw std::runtime_error(
        "shifted_bump_polynomial: degree cap reached without meeting the "
        "grid error bound");
}

}  // namespace polycycle::approx
