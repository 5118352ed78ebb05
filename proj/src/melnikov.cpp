#include "polycycle/melnikov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polycycle::melnikov {

Deformation Deformation::polynomial(Poly2 envelope, Vec2 dir)
{
    Deformation d;
    d.has_poly = true;
    d.envelope_poly = std::move(envelope);
    d.const_dir = true;
    d.direction = dir;
    return d;
}

Deformation Deformation::functional(
    std::function<double(const Point2&)> envelope,
    std::function<Vec2(const Point2&)> dir)
{
    Deformation d;
    d.has_poly = false;
    d.envelope_fn = std::move(envelope);
    d.const_dir = false;
    d.direction_fn = std::move(dir);
    return d;
}

double Deformation::envelope(const Point2& x) const
{
    return has_poly ? envelope_poly.eval(x) : envelope_fn(x);
}

Vec2 Deformation::dir(const Point2& x) const
{
    return const_dir ? direction : direction_fn(x);
}

Vec2 Deformation::dk(const Point2& x) const
{
    const double e = envelope(x);
    const Vec2 d = dir(x);
    return {e * d[0], e * d[1]};
}

Vec2 PerturbationFamily::eval(const Point2& x, std::span<const double> mu) const
{
    if (mu.size() != deformations.size())
        throw std::invalid_argument("perturbation family: mu size mismatch");
    Vec2 v = base.eval(x);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu[j] == 0.0) continue;
        const Vec2 k = deformations[j].dk(x);
        v[0] += mu[j] * k[0];
        v[1] += mu[j] * k[1];
    }
    return v;
}

bool PerturbationFamily::polynomial() const
{
    for (const auto& d : deformations)
        if (!d.has_poly || !d.const_dir) return false;
    return true;
}

VectorField2 PerturbationFamily::materialize(std::span<const double> mu) const
{
    if (mu.size() != deformations.size())
        throw std::invalid_argument("perturbation family: mu size mismatch");
    if (!polynomial())
        throw std::invalid_argument(
            "perturbation family: non-polynomial deformation cannot be "
            "materialized");
    Poly2 p = base.p, q = base.q;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (mu[j] == 0.0) continue;
        const auto& d = deformations[j];
        p += d.envelope_poly * (mu[j] * d.direction[0]);
        q += d.envelope_poly * (mu[j] * d.direction[1]);
    }
    return {std::move(p), std::move(q)};
}

PerturbationFamily main3_family(const BuiltPolycycle& b)
{
    PerturbationFamily fam;
    fam.base = b.field;
    for (auto& ed : build_main3_family(b))
        fam.deformations.push_back(
            Deformation::polynomial(std::move(ed.envelope), ed.direction));
    return fam;
}

double melnikov_integrand(const PerturbationFamily& fam, int j, const Point2& x,
                          double weight)
{
    if (j < 1 || j > static_cast<int>(fam.size()))
        throw std::out_of_range("melnikov_integrand: parameter index");
    const Vec2 X = fam.base.eval(x);
    return weight * wedge(X, fam.deformations[j - 1].dk(x));
}

flow::IntegrateOptions melnikov_options()
{
    flow::IntegrateOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    o.max_step = 0.5;
    return o;
}

namespace {

// Distance gate for the truncation rule. 1e-2 rather than something
// tighter: integrating along an invariant edge toward a saddle whose
// transverse eigenvalue exceeds the approach rate amplifies the
// off-edge rounding drift, and for ratio-4 saddles the orbit sweeps
// past at distance ~(machine eps)^{1/5} ~ 5e-4 no matter the
// tolerances. The integrand floor below is what controls the tail.
constexpr double kSaddleDist = 1e-2;
constexpr double kIntegrandFloor = 1e-13;

struct HalfResult {
    double integral = 0;
    double tail = 0;
    double time = 0;  // |truncation time|
};

// Integrate the augmented state (x, w, I) from the section base toward
// the given limiting saddle until the truncation rule fires.
HalfResult half_integral(const PerturbationFamily& fam, int j,
                         const Point2& x0, double t_end, const Point2& saddle,
                         double decay_rate, const flow::IntegrateOptions& opts)
{
    const VectorField2& f = fam.base;
    const Deformation& def = fam.deformations[j - 1];

    flow::RhsN rhs = [&](double, std::span<const double> y,
                         std::span<double> dy) {
        const Point2 x = {y[0], y[1]};
        const Vec2 v = f.eval(x);
        dy[0] = v[0];
        dy[1] = v[1];
        dy[2] = -divergence(f, x) * y[2];
        dy[3] = y[2] * wedge(v, def.dk(x));
    };

    flow::StepMonitor stop = [&](double, std::span<const double> y) {
        const double dist =
            std::hypot(y[0] - saddle[0], y[1] - saddle[1]);
        if (dist > kSaddleDist) return false;
        const Point2 x = {y[0], y[1]};
        const double g = y[2] * wedge(f.eval(x), def.dk(x));
        return std::abs(g) < kIntegrandFloor;
    };

    std::vector<double> yf;
    flow::Trajectory tr = flow::integrate_aug(rhs, {x0[0], x0[1], 1.0, 0.0},
                                              0.0, t_end, {}, opts, {}, stop,
                                              &yf);
    if (tr.outcome != flow::Outcome::stopped_by_monitor)
        throw std::runtime_error(
            "melnikov_derivative: truncation rule not reached within the "
            "time budget");
    if (yf[2] <= 0)
        throw std::runtime_error("melnikov_derivative: weight lost positivity");

    HalfResult h;
    h.integral = yf[3];
    h.time = std::abs(tr.final_time);
    const Point2 xf = {yf[0], yf[1]};
    const double g = yf[2] * wedge(f.eval(xf), def.dk(xf));
    // exponential decay with the local rate bounds the dropped tail
    h.tail = std::abs(g) / decay_rate;
    return h;
}

}  // namespace

MelnikovEntry melnikov_derivative(const PerturbationFamily& fam,
                                  const BuiltPolycycle& b, int conn, int j,
                                  const flow::IntegrateOptions& opts)
{
    if (conn < 1 || conn > b.n())
        throw std::out_of_range("melnikov_derivative: connection index");
    if (j < 1 || j > static_cast<int>(fam.size()))
        throw std::out_of_range("melnikov_derivative: parameter index");

    const Point2 x0 = b.section_bases[conn - 1];
    const auto [source, sink] = edge_flow(b, conn);
    const SaddleData sd_sink = saddle_data(b, sink);
    const SaddleData sd_src = saddle_data(b, source);

    const double budget = 1e4;
    // forward: approach the sink along its stable manifold
    const HalfResult fwd = half_integral(fam, j, x0, budget, b.vertex(sink),
                                         std::abs(sd_sink.eigen_neg), opts);
    // backward: approach the source along its unstable manifold
    const HalfResult bwd = half_integral(fam, j, x0, -budget, b.vertex(source),
                                         sd_src.eigen_pos, opts);

    const double speed = norm(fam.base.eval(x0));
    if (speed == 0)
        throw std::runtime_error("melnikov_derivative: singular section base");

    MelnikovEntry e;
    e.value = (fwd.integral - bwd.integral) / speed;
    e.tail_bound = (fwd.tail + bwd.tail) / speed;
    e.t_plus = fwd.time;
    e.t_minus = bwd.time;
    return e;
}

MelnikovReport melnikov_matrix(const PerturbationFamily& fam,
                               const BuiltPolycycle& b,
                               const flow::IntegrateOptions& opts)
{
    const int n = b.n();
    const int np = static_cast<int>(fam.size());
    MelnikovReport rep;
    rep.matrix.assign(n, std::vector<double>(np, 0.0));
    rep.tail_bounds.assign(n, std::vector<double>(np, 0.0));
    rep.truncation.assign(n, {0.0, 0.0});
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= np; ++j) {
            const MelnikovEntry e = melnikov_derivative(fam, b, i, j, opts);
            rep.matrix[i - 1][j - 1] = e.value;
            rep.tail_bounds[i - 1][j - 1] = e.tail_bound;
            rep.truncation[i - 1][0] =
                std::max(rep.truncation[i - 1][0], e.t_minus);
            rep.truncation[i - 1][1] =
                std::max(rep.truncation[i - 1][1], e.t_plus);
        }
    }
    if (n == np) {
        rep.diagonally_dominant = true;
        for (int i = 0; i < n; ++i) {
            double off = 0;
            for (int j = 0; j < np; ++j)
                if (j != i) off += std::abs(rep.matrix[i][j]);
            if (std::abs(rep.matrix[i][i]) <= off)
                rep.diagonally_dominant = false;
        }
    }
    return rep;
}

}  // namespace polycycle::melnikov
