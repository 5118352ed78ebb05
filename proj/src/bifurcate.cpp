#include "polycycle/bifurcate.hpp"

#include "polycycle/curves.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>

namespace polycycle::bifurcate {

namespace {

flow::IntegrateOptions tight_options()
{
    flow::IntegrateOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    o.max_step = 0.5;
    // Deep saddle passages legitimately spend tens of time units below
    // the stall speed (the transverse coordinate underflows near a
    // strongly contracting saddle); only a truly captured orbit should
    // trip the guard.
    o.stall_budget = 100.0;
    return o;
}

constexpr double kEscapeRadius = 3.0;

struct ReturnHit {
    double coord = 0;
    double time = 0;
};

/// First return to sections[idx] after an in-range crossing of some other
/// section; empty when the orbit escapes or never returns.
std::optional<ReturnHit> try_return(const flow::FieldFn& f,
                                    const std::vector<flow::Section>& sections,
                                    int idx, double s,
                                    const flow::IntegrateOptions& opts,
                                    double max_time,
                                    flow::Trajectory* record_out = nullptr)
{
    bool left_home = false;
    ReturnHit hit;
    bool found = false;
    auto stop = [&](const flow::EventHit& h) {
        if (std::abs(h.coord) > sections[h.section].half_width) return false;
        if (h.section != idx) {
            left_home = true;
            return false;
        }
        if (left_home) {
            hit.coord = h.coord;
            hit.time = h.t;
            found = true;
            return true;
        }
        return false;
    };
    auto escape = [&](double, std::span<const double> y) {
        return std::hypot(y[0], y[1]) > kEscapeRadius;
    };
    flow::Trajectory tr = flow::integrate(f, sections[idx].at(s), 0.0, max_time,
                                          sections, opts, stop, escape);
    if (!found) return std::nullopt;
    if (record_out) *record_out = std::move(tr);
    return hit;
}

/// Small dense linear solve (Gaussian elimination, partial pivoting).
std::vector<double> solve_linear(std::vector<std::vector<double>> a,
                                 std::vector<double> rhs)
{
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300)
            throw std::runtime_error("linear solve: singular matrix");
        std::swap(a[c], a[piv]);
        std::swap(rhs[c], rhs[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double m = a[r][c] / a[c][c];
            if (m == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r][k] -= m * a[c][k];
            rhs[r] -= m * rhs[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = rhs[r];
        for (std::size_t k = r + 1; k < n; ++k) acc -= a[r][k] * x[k];
        x[r] = acc / a[r][r];
    }
    return x;
}

struct MuField {
    flow::FieldFn f;
    flow::JacFn j;
    std::shared_ptr<VectorField2> owned;  // keeps the materialized field alive
};

MuField make_mu_field(const melnikov::PerturbationFamily& fam,
                      std::span<const double> mu)
{
    MuField mf;
    if (fam.polynomial()) {
        mf.owned = std::make_shared<VectorField2>(fam.materialize(mu));
        auto vf = mf.owned;
        mf.f = [vf](const Point2& x) { return vf->eval(x); };
        mf.j = [vf](const Point2& x) { return jacobian(*vf, x); };
    } else {
        std::vector<double> m(mu.begin(), mu.end());
        const auto* fp = &fam;
        mf.f = [fp, m](const Point2& x) { return fp->eval(x, m); };
        mf.j = [fp, m](const Point2& x) {
            const double h = 1e-6;
            const Vec2 fx1 = fp->eval({x[0] + h, x[1]}, m);
            const Vec2 fx0 = fp->eval({x[0] - h, x[1]}, m);
            const Vec2 fy1 = fp->eval({x[0], x[1] + h}, m);
            const Vec2 fy0 = fp->eval({x[0], x[1] - h}, m);
            return std::array<double, 4>{(fx1[0] - fx0[0]) / (2 * h),
                                         (fy1[0] - fy0[0]) / (2 * h),
                                         (fx1[1] - fx0[1]) / (2 * h),
                                         (fy1[1] - fy0[1]) / (2 * h)};
        };
    }
    return mf;
}

flow::Branch pick_branch(const flow::Saddle& s, const Point2& target,
                         bool unstable)
{
    const Vec2 d = unstable ? s.dir_u : s.dir_s;
    const Vec2 to = {target[0] - s.location[0], target[1] - s.location[1]};
    if (dot(d, to) >= 0)
        return unstable ? flow::Branch::unstable_plus : flow::Branch::stable_plus;
    return unstable ? flow::Branch::unstable_minus : flow::Branch::stable_minus;
}

int cyc(int s, int n) { return ((s - 1) % n + n) % n + 1; }

}  // namespace

std::vector<flow::Section> sections_of(const BuiltPolycycle& b,
                                       double half_width)
{
    std::vector<flow::Section> secs;
    for (int i = 0; i < b.n(); ++i)
        secs.push_back({b.section_bases[i], b.section_dirs[i], half_width});
    return secs;
}

Sigma0 detect_sigma0(const BuiltPolycycle& b, double delta)
{
    const auto secs = sections_of(b);
    const flow::FieldFn f = [&b](const Point2& x) { return b.field.eval(x); };
    const flow::IntegrateOptions opts = tight_options();

    // The polygon interior contains the origin; the inner side of section 1
    // is the sign of the coordinate stepping toward the origin.
    const flow::Section& s1 = secs[0];
    const double inner_sign =
        dot(s1.direction, {-s1.base[0], -s1.base[1]}) > 0 ? 1.0 : -1.0;

    const bool inner_returns =
        try_return(f, secs, 0, inner_sign * delta, opts, 1e4).has_value();
    const bool outer_returns =
        try_return(f, secs, 0, -inner_sign * delta, opts, 1e4).has_value();
    if (inner_returns == outer_returns)
        throw std::runtime_error(
            inner_returns ? "detect_sigma0: both sides return"
                          : "detect_sigma0: neither side returns");
    return inner_returns ? Sigma0::inner : Sigma0::outer;
}

DisplacementVector displacement_vector(const melnikov::PerturbationFamily& fam,
                                       const BuiltPolycycle& b,
                                       std::span<const double> mu,
                                       const Sigma0* sigma0_hint)
{
    const MuField mf = make_mu_field(fam, mu);
    const auto secs = sections_of(b);
    const flow::IntegrateOptions opts = tight_options();
    const int n = b.n();

    // continued saddles, one Newton solve per vertex
    std::vector<flow::Saddle> saddles;
    for (int s = 1; s <= n; ++s)
        saddles.push_back(flow::find_saddle(mf.f, mf.j, b.vertex(s)));

    DisplacementVector dv;
    dv.mu.assign(mu.begin(), mu.end());
    dv.sigma0 = sigma0_hint ? *sigma0_hint : detect_sigma0(b);
    for (int i = 1; i <= n; ++i) {
        const auto [source, sink] = edge_flow(b, i);
        const flow::Section& sec = secs[i - 1];
        const flow::Saddle& src = saddles[source - 1];
        const flow::Saddle& snk = saddles[sink - 1];
        const flow::ShootResult up = flow::shoot_separatrix(
            mf.f, src, pick_branch(src, sec.base, true), sec, opts);
        const flow::ShootResult sp = flow::shoot_separatrix(
            mf.f, snk, pick_branch(snk, sec.base, false), sec, opts);
        dv.connections.push_back({up.coord, sp.coord, up.coord - sp.coord});
    }
    return dv;
}

BypassDisplacement bypass_displacement(const melnikov::PerturbationFamily& fam,
                                       const BuiltPolycycle& b,
                                       std::span<const double> mu, int expelled,
                                       const DisplacementVector* precomputed)
{
    const int n = b.n();
    const int e = expelled == 0 ? n : expelled;
    if (e < 1 || e > n)
        throw std::out_of_range("bypass_displacement: expelled index");
    const double re = b.spec.ratios[e - 1];
    if (std::abs(re - 1.0) <= 1e-6)
        throw std::invalid_argument(
            "bypass_displacement: expelled ratio too close to 1 (the map "
            "need not be C^1 there)");

    DisplacementVector local;
    const DisplacementVector* dv = precomputed;
    if (!dv) {
        local = displacement_vector(fam, b, mu);
        dv = &local;
    }
    const double s0 = sign_of(dv->sigma0);
    const int em1 = cyc(e - 1, n);

    const MuField mf = make_mu_field(fam, mu);
    const auto secs = sections_of(b);
    const flow::IntegrateOptions opts = tight_options();

    BypassDisplacement out;
    out.ratio_above_one = re > 1.0;
    if (re > 1.0) {
        // measured on section e-1
        if (s0 * dv->d(e) <= 0.0) {
            out.regime = BypassRegime::unbroken;
            out.value = dv->d(em1);
            return out;
        }
        out.regime = BypassRegime::bypass;
        // continue the incoming-edge source separatrix through the Dulac
        // passage past the expelled saddle to section e-1
        const auto [source, sink] = edge_flow(b, e);
        const flow::Saddle src =
            flow::find_saddle(mf.f, mf.j, b.vertex(source));
        const flow::ShootResult through = flow::shoot_separatrix(
            mf.f, src, pick_branch(src, secs[e - 1].base, true), secs[em1 - 1],
            opts);
        out.value = through.coord - dv->connections[em1 - 1].b_s;
        return out;
    }
    // r_e < 1: measured on section e, time-reversed passage
    if (s0 * dv->d(em1) >= 0.0) {
        out.regime = BypassRegime::unbroken;
        out.value = dv->d(e);
        return out;
    }
    out.regime = BypassRegime::bypass;
    const auto [source1, sink1] = edge_flow(b, em1);
    const flow::Saddle snk = flow::find_saddle(mf.f, mf.j, b.vertex(sink1));
    const flow::ShootResult through = flow::shoot_separatrix(
        mf.f, snk, pick_branch(snk, secs[em1 - 1].base, false), secs[e - 1],
        opts);
    out.value = dv->connections[e - 1].b_u - through.coord;
    return out;
}

BreakResult solve_connection_break(const melnikov::PerturbationFamily& fam,
                                   const BuiltPolycycle& b, double free_value,
                                   const melnikov::MelnikovReport* matrix)
{
    const int n = b.n();
    if (static_cast<int>(fam.size()) != n)
        throw std::invalid_argument(
            "solve_connection_break: need one parameter per connection");
    const double rn = b.spec.ratios[n - 1];
    if (std::abs(rn - 1.0) <= 1e-6)
        throw std::invalid_argument(
            "solve_connection_break: r_n too close to 1");

    melnikov::MelnikovReport local_matrix;
    if (!matrix) {
        local_matrix = melnikov::melnikov_matrix(fam, b);
        matrix = &local_matrix;
    }

    // residual rows: d_1 .. d_{n-2} and the bypass map; its linearization
    // at 0 is the plain row n-1 (r_n > 1) or row n (r_n < 1)
    std::vector<int> rows;
    for (int i = 0; i < n - 2; ++i) rows.push_back(i);
    rows.push_back(rn > 1.0 ? n - 2 : n - 1);

    const int m = n - 1;
    std::vector<std::vector<double>> J(m, std::vector<double>(m));
    std::vector<double> rhs(m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) J[r][c] = matrix->matrix[rows[r]][c];
        rhs[r] = -matrix->matrix[rows[r]][n - 1] * free_value;
    }
    std::vector<double> head = solve_linear(J, rhs);

    BreakResult res;
    const Sigma0 s0 = detect_sigma0(b);
    auto eval_residual = [&](const std::vector<double>& h,
                             DisplacementVector& dv_out,
                             BypassDisplacement& bp_out) {
        std::vector<double> mu(h);
        mu.push_back(free_value);
        dv_out = displacement_vector(fam, b, mu, &s0);
        bp_out = bypass_displacement(fam, b, mu, n, &dv_out);
        std::vector<double> F(m);
        for (int i = 0; i < n - 2; ++i) F[i] = dv_out.d(i + 1);
        F[m - 1] = bp_out.value;
        return F;
    };

    DisplacementVector dv;
    BypassDisplacement bp;
    std::vector<double> F = eval_residual(head, dv, bp);
    auto maxabs = [](const std::vector<double>& v) {
        double r = 0;
        for (double x : v) r = std::max(r, std::abs(x));
        return r;
    };

    for (int it = 0; it < 30; ++it) {
        res.iterations = it;
        res.residual = maxabs(F);
        if (res.residual < 1e-9) {
            res.mu = head;
            res.mu.push_back(free_value);
            res.displacements = dv;
            res.bypass = bp;
            return res;
        }
        std::vector<double> negF(m);
        for (int i = 0; i < m; ++i) negF[i] = -F[i];
        const std::vector<double> dm = solve_linear(J, negF);
        std::vector<double> head_new(m);
        for (int i = 0; i < m; ++i) head_new[i] = head[i] + dm[i];

        DisplacementVector dv_new;
        BypassDisplacement bp_new;
        std::vector<double> F_new = eval_residual(head_new, dv_new, bp_new);

        // Broyden: J += (dF - J dm) dm^T / (dm . dm)
        double dm2 = 0;
        for (double v : dm) dm2 += v * v;
        if (dm2 > 0) {
            for (int r = 0; r < m; ++r) {
                double jdm = 0;
                for (int c = 0; c < m; ++c) jdm += J[r][c] * dm[c];
                const double coef = (F_new[r] - F[r] - jdm) / dm2;
                for (int c = 0; c < m; ++c) J[r][c] += coef * dm[c];
            }
        }
        head = std::move(head_new);
        F = std::move(F_new);
        dv = std::move(dv_new);
        bp = bp_new;
    }
    throw std::runtime_error(
        "solve_connection_break: Newton did not converge in 30 iterations "
        "(last residual " +
        std::to_string(maxabs(F)) + ")");
}

std::vector<CycleRecord> detect_cycles(const VectorField2& f,
                                       const std::vector<flow::Section>& sections,
                                       int sec_index, double t_lo, double t_hi,
                                       int grid,
                                       const std::vector<Point2>& polycycle)
{
    if (!(t_lo < t_hi)) throw std::invalid_argument("detect_cycles: bad window");
    if (grid < 2) throw std::invalid_argument("detect_cycles: grid too small");
    const flow::FieldFn ff = [&f](const Point2& x) { return f.eval(x); };
    const flow::IntegrateOptions opts = tight_options();
    const double max_time = 1e4;

    // geometric ladder accumulating toward coordinate 0 (where bifurcating
    // cycles cluster); falls back to a linear grid when the window spans 0
    std::vector<double> ts;
    const bool pos = t_lo >= 0.0, neg = t_hi <= 0.0;
    if (pos || neg) {
        const double big = pos ? t_hi : -t_lo;
        const double small_lim = pos ? t_lo : -t_hi;
        const double sgn = pos ? 1.0 : -1.0;
        const double floor_mag = std::max(small_lim, big * std::pow(2.0, -40.0));
        const double q = std::pow(floor_mag / big, 1.0 / (grid - 1));
        for (int k = 0; k < grid; ++k) ts.push_back(sgn * big * std::pow(q, k));
        std::sort(ts.begin(), ts.end());
    } else {
        for (int k = 0; k <= grid; ++k)
            ts.push_back(t_lo + (t_hi - t_lo) * k / grid);
    }

    auto pi = [&](double t) -> std::optional<ReturnHit> {
        return try_return(ff, sections, sec_index, t, opts, max_time);
    };

    std::vector<CycleRecord> cycles;
    std::optional<double> prev_g;
    double prev_t = 0;
    for (double t : ts) {
        const auto r = pi(t);
        if (!r) {
            prev_g.reset();
            continue;
        }
        const double g = r->coord - t;
        if (prev_g && *prev_g * g < 0) {
            double lo = prev_t, hi = t, glo = *prev_g;
            while (hi - lo > 1e-11) {
                const double mid = 0.5 * (lo + hi);
                auto rm = pi(mid);
                if (!rm) rm = pi(mid + 0.1 * (hi - lo));
                if (!rm) break;
                const double gm = rm->coord - mid;
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((glo < 0) == (gm < 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double star = 0.5 * (lo + hi);
            const auto rs = pi(star);
            if (rs) {
                CycleRecord rec;
                rec.fixed_point = star;
                rec.period = rs->time;
                // Chord slope of pi over [t*, 10 t*]: near a hyperbolic
                // polycycle the return map is contracting so strongly
                // that a tight finite difference only measures the
                // integration noise floor; a wide chord on the return
                // side still bounds the derivative somewhere inside by
                // the mean value theorem.
                const double t2 = 10 * star;
                if (const auto r2 = pi(t2); r2 && t2 != star) {
                    rec.multiplier = (r2->coord - rs->coord) / (t2 - star);
                } else {
                    const double dlt = std::max(1e-7, 1e-3 * std::abs(star));
                    const auto rp = pi(star + dlt);
                    const auto rm2 = pi(star - dlt);
                    if (rp && rm2)
                        rec.multiplier = (rp->coord - rm2->coord) / (2 * dlt);
                }
                // record the orbit for one period
                flow::IntegrateOptions ro = opts;
                ro.record = true;
                flow::Trajectory tr;
                if (try_return(ff, sections, sec_index, star, ro, max_time, &tr)) {
                    rec.orbit = std::move(tr.states);
                    if (!polycycle.empty())
                        rec.hausdorff_to_polycycle =
                            hausdorff_distance(rec.orbit, polycycle);
                }
                cycles.push_back(std::move(rec));
            }
        }
        prev_g = g;
        prev_t = t;
    }
    return cycles;
}

}  // namespace polycycle::bifurcate
