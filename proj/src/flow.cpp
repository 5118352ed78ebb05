#include "polycycle/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace polycycle::flow {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
    const RhsN& rhs;
    std::size_t dim;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp;

    explicit Stepper(const RhsN& r, std::size_t d) : rhs(r), dim(d)
    {
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &tmp}) v->resize(d);
    }

    // One step from (t, y) with size h; writes y_out and the embedded
    // error estimate. k1 must already hold rhs(t, y) (FSAL).
    void step(double t, std::span<const double> y, double h,
              std::span<double> y_out, std::span<double> err)
    {
        auto stage = [&](std::span<double> k, double c,
                         std::initializer_list<std::pair<const std::vector<double>*, double>> terms) {
            for (std::size_t i = 0; i < dim; ++i) {
                double acc = y[i];
                for (const auto& [kv, a] : terms) acc += h * a * (*kv)[i];
                tmp[i] = acc;
            }
            rhs(t + c * h, tmp, k);
        };
        stage(k2, c2, {{&k1, a21}});
        stage(k3, c3, {{&k1, a31}, {&k2, a32}});
        stage(k4, c4, {{&k1, a41}, {&k2, a42}, {&k3, a43}});
        stage(k5, c5, {{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}});
        stage(k6, 1.0, {{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}});
        for (std::size_t i = 0; i < dim; ++i)
            y_out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                   b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, y_out, k7);
        for (std::size_t i = 0; i < dim; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
    }
};

}  // namespace

Trajectory integrate_aug(const RhsN& rhs, std::vector<double> y0, double t0,
                         double t1, const std::vector<Section>& events,
                         const IntegrateOptions& opts,
                         const HitPredicate& stop_on_hit,
                         const StepMonitor& monitor,
                         std::vector<double>* y_final)
{
    const std::size_t dim = y0.size();
    if (dim < 2) throw std::invalid_argument("integrate: state dim < 2");
    const double dir = t1 >= t0 ? 1.0 : -1.0;

    Trajectory traj;
    Stepper st(rhs, dim);
    std::vector<double> y = std::move(y0), ynew(dim), err(dim);
    double t = t0;
    auto point = [](std::span<const double> v) -> Point2 { return {v[0], v[1]}; };

    if (opts.record) {
        traj.times.push_back(t);
        traj.states.push_back(point(y));
    }

    std::vector<double> ev_prev(events.size());
    for (std::size_t s = 0; s < events.size(); ++s)
        ev_prev[s] = events[s].offset(point(y));

    rhs(t, y, st.k1);
    double h = dir * std::min(opts.max_step, 1e-4);
    double stalled_for = 0.0;
    // PI controller memory
    double err_prev = 1.0;

    auto finish = [&](Outcome oc) {
        traj.outcome = oc;
        traj.final_time = t;
        traj.final_state = point(y);
        if (y_final) *y_final = y;
        return traj;
    };

    while (dir * (t1 - t) > 0) {
        if (traj.accepted + traj.rejected >= opts.max_steps)
            return finish(Outcome::max_steps);
        if (dir * (t + h - t1) > 0) h = t1 - t;

        st.step(t, y, h, ynew, err);
        double en = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sc =
                opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            en = std::max(en, std::abs(err[i]) / sc);
        }

        if (en > 1.0) {
            ++traj.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
                return finish(Outcome::stalled);
            continue;
        }

        // accepted; localize any section crossing inside [t, t+h]
        const double t_new = t + h;
        const Point2 p_new = point(ynew);
        bool stop = false;
        bool fsal_dirty = false;
        for (std::size_t s = 0; s < events.size(); ++s) {
            const double e_new = events[s].offset(p_new);
            if (ev_prev[s] != 0.0 && e_new != 0.0 &&
                std::signbit(e_new) != std::signbit(ev_prev[s])) {
                // bisection on the step fraction; each probe is a single
                // RK step from the accepted step's start state
                double lo = 0.0, hi = 1.0;
                std::vector<double> probe = ynew, perr(dim);
                Point2 px = p_new;
                double pe = e_new, pt = t_new;
                for (int it = 0; it < 80 && std::abs(pe) > 1e-12; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    st.step(t, y, h * mid, probe, perr);  // clobbers k2..k7
                    fsal_dirty = true;
                    px = point(probe);
                    pe = events[s].offset(px);
                    pt = t + h * mid;
                    if (pe == 0.0) break;
                    if (std::signbit(pe) == std::signbit(ev_prev[s]))
                        lo = mid;
                    else
                        hi = mid;
                }
                EventHit hit{static_cast<int>(s), pt, px, events[s].coord(px)};
                traj.hits.push_back(hit);
                if (stop_on_hit && stop_on_hit(hit)) {
                    t = pt;
                    y = probe;  // full augmented state at the localized hit
                    stop = true;
                }
            }
            ev_prev[s] = e_new;
            if (stop) break;
        }
        if (stop) return finish(Outcome::stopped_on_event);

        t = t_new;
        y = ynew;
        if (fsal_dirty)
            rhs(t, y, st.k7);  // probes invalidated the FSAL slot
        st.k1.swap(st.k7);  // FSAL
        ++traj.accepted;
        if (opts.record) {
            traj.times.push_back(t);
            traj.states.push_back(point(y));
        }

        if (monitor && monitor(t, y)) return finish(Outcome::stopped_by_monitor);

        // stall guard on planar speed; k1 holds rhs(t, y) after the swap
        const double speed = std::hypot(st.k1[0], st.k1[1]);
        if (speed < opts.stall_speed) {
            stalled_for += std::abs(h);
            if (stalled_for > opts.stall_budget) return finish(Outcome::stalled);
        } else {
            stalled_for = 0.0;
        }

        const double fac =
            0.9 * std::pow(en > 0 ? en : 1e-10, -0.7 / 5.0) *
            std::pow(err_prev > 0 ? err_prev : 1e-10, 0.4 / 5.0);
        err_prev = en > 0 ? en : 1e-10;
        h *= std::clamp(fac, 0.2, 5.0);
        if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
    }
    return finish(Outcome::completed);
}

Trajectory integrate(const FieldFn& f, const Point2& x0, double t0, double t1,
                     const std::vector<Section>& events,
                     const IntegrateOptions& opts,
                     const HitPredicate& stop_on_hit, const StepMonitor& monitor)
{
    RhsN rhs = [&f](double, std::span<const double> y, std::span<double> dy) {
        const Vec2 v = f({y[0], y[1]});
        dy[0] = v[0];
        dy[1] = v[1];
    };
    return integrate_aug(rhs, {x0[0], x0[1]}, t0, t1, events, opts, stop_on_hit,
                         monitor, nullptr);
}

Saddle find_saddle(const FieldFn& f, const JacFn& jac, const Point2& seed,
                   double tol, int max_iter)
{
    Point2 x = seed;
    std::array<double, 4> J{};
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const Vec2 F = f(x);
        if (norm(F) < tol) {
            converged = true;
            break;
        }
        J = jac(x);
        const double det = J[0] * J[3] - J[1] * J[2];
        if (det == 0.0) throw std::runtime_error("find_saddle: singular Jacobian");
        x = {x[0] - (J[3] * F[0] - J[1] * F[1]) / det,
             x[1] - (-J[2] * F[0] + J[0] * F[1]) / det};
    }
    if (!converged && norm(f(x)) >= tol)
        throw std::runtime_error("find_saddle: Newton did not converge");

    J = jac(x);
    const double tr = J[0] + J[3];
    const double det = J[0] * J[3] - J[1] * J[2];
    if (det >= 0) throw std::runtime_error("find_saddle: converged point is not a saddle");
    const double disc = std::sqrt(tr * tr - 4 * det);
    const double l1 = 0.5 * (tr - disc);  // negative
    const double l2 = 0.5 * (tr + disc);  // positive

    auto eigvec = [&](double lam) -> Vec2 {
        // (J - lam I) v = 0; pick the better-conditioned row
        Vec2 v;
        if (std::abs(J[1]) + std::abs(J[0] - lam) >
            std::abs(J[2]) + std::abs(J[3] - lam))
            v = {-J[1], J[0] - lam};
        else
            v = {J[3] - lam, -J[2]};
        const double n = norm(v);
        if (n == 0) return {1, 0};
        return {v[0] / n, v[1] / n};
    };

    Saddle s;
    s.location = x;
    s.lambda_s = l1;
    s.lambda_u = l2;
    s.dir_s = eigvec(l1);
    s.dir_u = eigvec(l2);
    s.ratio = -l1 / l2;
    return s;
}

Saddle find_saddle(const VectorField2& f, const Point2& seed, double tol,
                   int max_iter)
{
    return find_saddle([&f](const Point2& x) { return f.eval(x); },
                       [&f](const Point2& x) { return jacobian(f, x); }, seed,
                       tol, max_iter);
}

namespace {

double shoot_once(const FieldFn& f, const Saddle& s, Branch branch,
                  const Section& until, const IntegrateOptions& opts,
                  double delta)
{
    const bool unstable =
        branch == Branch::unstable_plus || branch == Branch::unstable_minus;
    const bool plus =
        branch == Branch::unstable_plus || branch == Branch::stable_plus;
    const Vec2 d = unstable ? s.dir_u : s.dir_s;
    const double sgn = plus ? 1.0 : -1.0;
    const Point2 x0 = {s.location[0] + sgn * delta * d[0],
                       s.location[1] + sgn * delta * d[1]};
    const double t_end = unstable ? 1e4 : -1e4;

    double coord = 0;
    bool found = false;
    auto stop = [&](const EventHit& h) {
        if (std::abs(h.coord) <= until.half_width) {
            coord = h.coord;
            found = true;
            return true;
        }
        return false;
    };
    Trajectory tr = integrate(f, x0, 0.0, t_end, {until}, opts, stop, {});
    if (!found)
        throw std::runtime_error("shoot_separatrix: no section crossing");
    (void)tr;
    return coord;
}

}  // namespace

ShootResult shoot_separatrix(const FieldFn& f, const Saddle& s, Branch branch,
                             const Section& until, const IntegrateOptions& opts,
                             double delta_scale)
{
    const double scale = std::max(
        1.0, std::hypot(until.base[0] - s.location[0],
                        until.base[1] - s.location[1]));
    const double delta = delta_scale * scale;
    ShootResult r;
    r.coord = shoot_once(f, s, branch, until, opts, delta);
    const double c2 = shoot_once(f, s, branch, until, opts, delta / 2);
    r.richardson_gap = std::abs(r.coord - c2);
    r.confident = r.richardson_gap <= 1e-7;
    return r;
}

double transition_map(const FieldFn& f, const Section& from, const Section& to,
                      double s, const IntegrateOptions& opts, double max_time)
{
    double coord = 0;
    bool found = false;
    auto stop = [&](const EventHit& h) {
        if (h.t > 1e-12 && std::abs(h.coord) <= to.half_width) {
            coord = h.coord;
            found = true;
            return true;
        }
        return false;
    };
    Trajectory tr = integrate(f, from.at(s), 0.0, max_time, {to}, opts, stop, {});
    if (!found) {
        if (tr.outcome == Outcome::stalled)
            throw std::runtime_error("transition_map: near-singular slowdown");
        throw std::runtime_error("transition_map: orbit did not reach target section");
    }
    return coord;
}

double return_map(const FieldFn& f, const std::vector<Section>& all_sections,
                  int sec_index, double s, const IntegrateOptions& opts,
                  double max_time)
{
    bool left_home = false;
    double coord = 0;
    bool found = false;
    auto stop = [&](const EventHit& h) {
        if (std::abs(h.coord) > all_sections[h.section].half_width) return false;
        if (h.section != sec_index) {
            left_home = true;
            return false;
        }
        if (left_home) {
            coord = h.coord;
            found = true;
            return true;
        }
        return false;
    };
    Trajectory tr = integrate(f, all_sections[sec_index].at(s), 0.0, max_time,
                              all_sections, opts, stop, {});
    if (!found) {
        if (tr.outcome == Outcome::stalled)
            throw std::runtime_error("return_map: orbit stalled near a saddle");
        throw std::runtime_error("return_map: no return before max time");
    }
    return coord;
}

DulacEstimate estimate_dulac_exponent(const FieldFn& f, const Section& from,
                                      const Section& to,
                                      const std::vector<double>& s_values,
                                      const IntegrateOptions& opts)
{
    if (s_values.size() < 2)
        throw std::invalid_argument("dulac fit: need at least two s values");
    std::vector<double> ls, ld;
    for (double s : s_values) {
        const double D = transition_map(f, from, to, s, opts);
        if (D == 0.0) throw std::runtime_error("dulac fit: zero transition value");
        ls.push_back(std::log(std::abs(s)));
        ld.push_back(std::log(std::abs(D)));
    }
    const std::size_t n = ls.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += ls[i];
        sy += ld[i];
        sxx += ls[i] * ls[i];
        sxy += ls[i] * ld[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double res = 0;
    for (std::size_t i = 0; i < n; ++i)
        res = std::max(res, std::abs(ld[i] - slope * ls[i] - icept));
    DulacEstimate est;
    est.exponent = slope;
    est.coefficient = std::exp(icept);
    est.fit_residual = res;
    auto [mn, mx] = std::minmax_element(s_values.begin(), s_values.end(),
                                        [](double a, double b) {
                                            return std::abs(a) < std::abs(b);
                                        });
    est.s_min = std::abs(*mn);
    est.s_max = std::abs(*mx);
    return est;
}

}  // namespace polycycle::flow
