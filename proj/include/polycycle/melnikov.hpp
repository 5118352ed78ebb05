#ifndef POLYCYCLE_MELNIKOV_HPP
#define POLYCYCLE_MELNIKOV_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "polycycle/builder.hpp"
#include "polycycle/flow.hpp"
#include "polycycle/poly.hpp"

namespace polycycle::melnikov {

/// One parameter direction of a perturbation family: the field moves by
/// mu_j * envelope(x) * direction(x). The envelope is either a sparse
/// polynomial or an arbitrary evaluator; the direction either a constant
/// vector or a field.
struct Deformation {
    bool has_poly = false;
    Poly2 envelope_poly;
    std::function<double(const Point2&)> envelope_fn;

    bool const_dir = true;
    Vec2 direction = {0, 0};
    std::function<Vec2(const Point2&)> direction_fn;

    static Deformation polynomial(Poly2 envelope, Vec2 dir);
    static Deformation functional(std::function<double(const Point2&)> envelope,
                                  std::function<Vec2(const Point2&)> dir);

    double envelope(const Point2& x) const;
    Vec2 dir(const Point2& x) const;
    /// dK/dmu_j at x: envelope(x) * direction(x).
    Vec2 dk(const Point2& x) const;
};

/// X_mu(x) = base(x) + sum_j mu_j * envelope_j(x) * direction_j(x).
struct PerturbationFamily {
    VectorField2 base;
    std::vector<Deformation> deformations;

    std::size_t size() const { return deformations.size(); }
    Vec2 eval(const Point2& x, std::span<const double> mu) const;

    /// True when every deformation is a polynomial envelope with a
    /// constant direction, so the perturbed field is again polynomial.
    bool polynomial() const;
    VectorField2 materialize(std::span<const double> mu) const;
};

/// The degree-(n-1) edge-envelope family on a built polycycle: one
/// parameter per edge, envelope H_s (product of all lines but l_s),
/// constant direction (-alpha_s, -beta_s).
PerturbationFamily main3_family(const BuiltPolycycle& b);

/// Integrand of the displacement derivative at orbit point x carrying
/// divergence weight w: w * wedge(X(x), dK_j(x)), j in 1..N.
double melnikov_integrand(const PerturbationFamily& fam, int j, const Point2& x,
                          double weight);

struct MelnikovEntry {
    double value = 0;
    double tail_bound = 0;
    double t_minus = 0;  // backward truncation time (positive)
    double t_plus = 0;   // forward truncation time
};

/// Defaults tightened for the improper integrals.
flow::IntegrateOptions melnikov_options();

/// dd_i/dmu_j at mu = 0 for connection i (the edge orbit through section
/// base x_i), computed as a single augmented integration forward and
/// backward from x_i, truncated once the orbit is within 1e-4 of the
/// limiting saddle and the weighted integrand is below 1e-13.
MelnikovEntry melnikov_derivative(const PerturbationFamily& fam,
                                  const BuiltPolycycle& b, int conn, int j,
                                  const flow::IntegrateOptions& opts =
                                      melnikov_options());

struct MelnikovReport {
    std::vector<std::vector<double>> matrix;       // conn x param
    std::vector<std::vector<double>> tail_bounds;  // same shape
    std::vector<std::array<double, 2>> truncation; // per connection (T-, T+)
    bool diagonally_dominant = false;
};

MelnikovReport melnikov_matrix(const PerturbationFamily& fam,
                               const BuiltPolycycle& b,
                               const flow::IntegrateOptions& opts =
                                   melnikov_options());

}  // namespace polycycle::melnikov

#endif
