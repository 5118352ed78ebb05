#ifndef POLYCYCLE_FLOW_HPP
#define POLYCYCLE_FLOW_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polycycle/poly.hpp"

namespace polycycle::flow {

/// Transversal segment {base + s * direction : |s| <= half_width}.
struct Section {
    Point2 base;
    Vec2 direction;       // unit
    double half_width = 0.45;

    double coord(const Point2& x) const
    {
        return (x[0] - base[0]) * direction[0] + (x[1] - base[1]) * direction[1];
    }
    /// Signed distance of x to the section's carrier line.
    double offset(const Point2& x) const
    {
        return direction[0] * (x[1] - base[1]) - direction[1] * (x[0] - base[0]);
    }
    Point2 at(double s) const
    {
        return {base[0] + s * direction[0], base[1] + s * direction[1]};
    }
};

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 1.0;
    long max_steps = 10'000'000;
    double stall_speed = 1e-13;   // near-singular passage guard
    double stall_budget = 1.0;    // time allowed below stall_speed
    bool record = false;          // keep the full (t, x) history
};

struct EventHit {
    int section = -1;
    double t = 0;
    Point2 x = {0, 0};
    double coord = 0;     // along-section coordinate (may exceed half_width)
};

enum class Outcome { completed, stopped_on_event, stopped_by_monitor, stalled, max_steps };

struct Trajectory {
    std::vector<double> times;     // filled when opts.record
    std::vector<Point2> states;
    std::vector<EventHit> hits;
    double final_time = 0;
    Point2 final_state = {0, 0};
    long accepted = 0, rejected = 0;
    Outcome outcome = Outcome::completed;
};

using FieldFn = std::function<Vec2(const Point2&)>;
/// Returns true to stop the integration after the current accepted step.
using StepMonitor = std::function<bool(double t, std::span<const double> y)>;
/// Returns true to stop at this event hit.
using HitPredicate = std::function<bool(const EventHit&)>;

/// Adaptive Dormand-Prince 5(4) with PI step control. Crossings of the
/// listed sections are localized by bisection on the signed offset to
/// 1e-12 and appended to the trajectory's hit list.
Trajectory integrate(const FieldFn& f, const Point2& x0, double t0, double t1,
                     const std::vector<Section>& events = {},
                     const IntegrateOptions& opts = {},
                     const HitPredicate& stop_on_hit = {},
                     const StepMonitor& monitor = {});

/// Same integrator over an augmented state vector; only the first two
/// components are watched for section crossings.
using RhsN = std::function<void(double t, std::span<const double> y,
                                std::span<double> dy)>;
Trajectory integrate_aug(const RhsN& rhs, std::vector<double> y0, double t0,
                         double t1, const std::vector<Section>& events,
                         const IntegrateOptions& opts,
                         const HitPredicate& stop_on_hit,
                         const StepMonitor& monitor,
                         std::vector<double>* y_final);

struct Saddle {
    Point2 location;
    double lambda_s = 0;  // < 0
    double lambda_u = 0;  // > 0
    Vec2 dir_s = {0, 0};  // unit eigen-directions
    Vec2 dir_u = {0, 0};
    double ratio = 0;     // |lambda_s| / lambda_u
};

using JacFn = std::function<std::array<double, 4>(const Point2&)>;

/// Newton solve for X(x)=0 with analytic Jacobian; the converged point
/// must be a saddle (negative Jacobian determinant).
Saddle find_saddle(const FieldFn& f, const JacFn& jac, const Point2& seed,
                   double tol = 1e-12, int max_iter = 50);
Saddle find_saddle(const VectorField2& f, const Point2& seed,
                   double tol = 1e-12, int max_iter = 50);

enum class Branch { unstable_plus, unstable_minus, stable_plus, stable_minus };

struct ShootResult {
    double coord = 0;      // signed crossing coordinate on the section
    double richardson_gap = 0;  // |coord(delta) - coord(delta/2)|
    bool confident = true;      // gap within 1e-7
};

/// Integrates the chosen separatrix branch (forward for unstable,
/// backward for stable) from a seed offset delta along the
/// eigen-direction until it crosses `until`. Re-run at delta/2 checks
/// seed-offset sensitivity.
ShootResult shoot_separatrix(const FieldFn& f, const Saddle& s, Branch branch,
                             const Section& until,
                             const IntegrateOptions& opts = {},
                             double delta_scale = 1e-7);

/// First crossing of `to` for the orbit seeded at from.at(s).
double transition_map(const FieldFn& f, const Section& from, const Section& to,
                      double s, const IntegrateOptions& opts = {},
                      double max_time = 1e4);

/// First return to `sec` after at least one crossing of a different
/// listed section.
double return_map(const FieldFn& f, const std::vector<Section>& all_sections,
                  int sec_index, double s, const IntegrateOptions& opts = {},
                  double max_time = 1e4);

struct DulacEstimate {
    double exponent = 0;      // fitted r
    double coefficient = 0;   // fitted Delta_00 > 0
    double fit_residual = 0;  // max abs log-residual
    double s_min = 0, s_max = 0;
};

/// Log-log least-squares fit of the saddle passage map D(s) over a
/// geometric ladder of entry coordinates. Signs of s are taken as given
/// (pass negative s for the inner side); the fit uses magnitudes.
DulacEstimate estimate_dulac_exponent(const FieldFn& f, const Section& from,
                                      const Section& to,
                                      const std::vector<double>& s_values,
                                      const IntegrateOptions& opts = {});

}  // namespace polycycle::flow

#endif
