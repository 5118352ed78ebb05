#ifndef POLYCYCLE_CURVES_HPP
#define POLYCYCLE_CURVES_HPP

#include <vector>

#include "polycycle/poly.hpp"

namespace polycycle {

/// Symmetric Hausdorff distance between two sampled curves, each treated
/// as a closed polyline; point-to-segment distances refine between
/// consecutive samples.
double hausdorff_distance(const std::vector<Point2>& a,
                          const std::vector<Point2>& b);

/// Distance from a point to the closed polyline through the samples.
double point_to_polyline(const Point2& x, const std::vector<Point2>& curve);

enum class ContactDirection { inward, outward };

struct ContactReport {
    bool without_contact = false;
    ContactDirection direction = ContactDirection::outward;
    double min_margin = 0;  // min |<X, n_out>| / |X| over the samples
};

/// Checks whether the field crosses the closed curve strictly one way.
/// The curve is resampled to `samples` points along arc length; at each,
/// the inner product of X with the outward normal (orientation detected
/// by signed area) is tested for one strict sign.
ContactReport check_without_contact(const VectorField2& f,
                                    const std::vector<Point2>& curve,
                                    int samples = 256);

/// Offsets a convex polygon: each edge is translated along its outward
/// normal by `dist` (negative = inward) and adjacent edge lines are
/// re-intersected. Note: a mitered offset of an invariant-line polygon is
/// never without contact near a saddle corner; use product_level_curve
/// for trapping boundaries.
std::vector<Point2> offset_polygon(const std::vector<Point2>& poly,
                                   double dist);

/// Level curve {prod_i l_i(x) = c} sampled by ray bisection from the
/// origin (which must satisfy prod l_i(0) > c > 0). For a polygon of
/// invariant lines this is a smoothed inward offset whose transversality
/// is governed by the sum of the line cofactors.
/// With `weights` (one positive exponent per line) the level set of
/// prod_i l_i^{a_i} is used instead; graded exponents keep the curve
/// transversal when the saddle ratios are mixed.
std::vector<Point2> product_level_curve(const std::vector<LineForm>& lines,
                                        double c, int samples = 512,
                                        const std::vector<double>& weights = {});

/// The level value whose curve has minimal line-distance `depth` (inner
/// offset depth), found by bisection on c.
double level_for_depth(const std::vector<LineForm>& lines, double depth,
                       const std::vector<double>& weights = {});

/// Newton iteration for an equilibrium of the field starting from `seed`.
/// Throws if the iteration stalls away from a zero of the field.
Point2 find_equilibrium(const VectorField2& f, Point2 seed);

/// Boundary of a repelling core around the equilibrium reached from
/// `seed`: the level ellipse x^T P x = scale^2 of the quadratic Lyapunov
/// form solving A^T P + P A = I at the linearization A. When the
/// equilibrium repels (both eigenvalue real parts positive) P is positive
/// definite and the flow crosses every small enough ellipse strictly
/// outward, so the annulus between the ellipse and an outer invariant set
/// traps all interior limit cycles.
std::vector<Point2> repelling_core_boundary(const VectorField2& f, Point2 seed,
                                            double scale, int samples = 256);

}  // namespace polycycle

#endif
