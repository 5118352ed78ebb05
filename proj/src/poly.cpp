#include "polycycle/poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace polycycle {

Poly2::Poly2(std::vector<Term> terms) : terms_(std::move(terms))
{
    for (const auto& t : terms_) {
        if (t.i < 0 || t.j < 0) throw std::invalid_argument("negative degree");
        if (!std::isfinite(t.c)) throw std::invalid_argument("non-finite coefficient");
    }
    normalize();
}

void Poly2::normalize()
{
    std::map<std::pair<int, int>, double> acc;
    for (const auto& t : terms_) acc[{t.i, t.j}] += t.c;
    terms_.clear();
    for (const auto& [deg, c] : acc)
        if (c != 0.0) terms_.push_back({deg.first, deg.second, c});
}

Poly2 Poly2::constant(double c)
{
    if (c == 0.0) return Poly2{};
    return Poly2{{{0, 0, c}}};
}

Poly2 Poly2::affine(double a, double b, double c)
{
    return Poly2{{{1, 0, a}, {0, 1, b}, {0, 0, c}}};
}

double Poly2::eval(const Point2& x) const
{
    // Horner in x2 within runs of equal x1-degree, then Horner in x1.
    // Terms are sorted by (i, j) ascending.
    double result = 0.0;
    int prev_i = -1;
    std::size_t k = terms_.size();
    while (k > 0) {
        // runs in reverse so the outer Horner goes from high x1-degree down
        std::size_t end = k;
        const int i = terms_[k - 1].i;
        while (k > 0 && terms_[k - 1].i == i) --k;
        double inner = 0.0;
        int prev_j = -1;
        for (std::size_t t = end; t > k; --t) {
            const auto& term = terms_[t - 1];
            if (prev_j < 0)
                inner = term.c;
            else
                inner = inner * std::pow(x[1], prev_j - term.j) + term.c;
            prev_j = term.j;
        }
        if (prev_j > 0) inner *= std::pow(x[1], prev_j);
        if (prev_i < 0)
            result = inner;
        else
            result = result * std::pow(x[0], prev_i - i) + inner;
        prev_i = i;
    }
    if (prev_i > 0) result *= std::pow(x[0], prev_i);
    return result;
}

Poly2 Poly2::derivative_x1() const
{
    std::vector<Term> out;
    for (const auto& t : terms_)
        if (t.i > 0) out.push_back({t.i - 1, t.j, t.c * t.i});
    return Poly2{std::move(out)};
}

Poly2 Poly2::derivative_x2() const
{
    std::vector<Term> out;
    for (const auto& t : terms_)
        if (t.j > 0) out.push_back({t.i, t.j - 1, t.c * t.j});
    return Poly2{std::move(out)};
}

int Poly2::degree() const
{
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.i + t.j);
    return d;
}

Poly2 Poly2::operator+(const Poly2& o) const
{
    std::vector<Term> out = terms_;
    out.insert(out.end(), o.terms_.begin(), o.terms_.end());
    return Poly2{std::move(out)};
}

Poly2 Poly2::operator-(const Poly2& o) const
{
    return *this + o * -1.0;
}

Poly2 Poly2::operator*(const Poly2& o) const
{
    std::vector<Term> out;
    out.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
        for (const auto& b : o.terms_)
            out.push_back({a.i + b.i, a.j + b.j, a.c * b.c});
    return Poly2{std::move(out)};
}

Poly2 Poly2::operator*(double k) const
{
    std::vector<Term> out = terms_;
    for (auto& t : out) t.c *= k;
    return Poly2{std::move(out)};
}

Vec2 eval_field(const VectorField2& f, const Point2& x)
{
    return f.eval(x);
}

double divergence(const VectorField2& f, const Point2& x)
{
    return f.p.derivative_x1().eval(x) + f.q.derivative_x2().eval(x);
}

std::array<double, 4> jacobian(const VectorField2& f, const Point2& x)
{
    return {f.p.derivative_x1().eval(x), f.p.derivative_x2().eval(x),
            f.q.derivative_x1().eval(x), f.q.derivative_x2().eval(x)};
}

}  // namespace polycycle
