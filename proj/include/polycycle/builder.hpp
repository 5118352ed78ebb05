#ifndef POLYCYCLE_BUILDER_HPP
#define POLYCYCLE_BUILDER_HPP

#include <utility>
#include <vector>

#include "polycycle/poly.hpp"

namespace polycycle {

enum class Orientation { clockwise, counterclockwise };

struct PolycycleSpec {
    int n = 3;
    std::vector<double> ratios;  // r_1..r_n, all > 0
    Orientation orientation = Orientation::clockwise;
};

/// The regular n-gon polycycle construction: a polynomial field of degree
/// <= n whose invariant lines carry the polygon edges and whose vertices
/// are hyperbolic saddles with the prescribed hyperbolicity ratios.
///
/// Indexing is 1-based cyclic in the API (s in 1..n) and 0-based in the
/// stored vectors. Line i passes through vertices p_i and p_{i+1}; the
/// edge orbit from p_{i+1} to p_i lies on it.
struct BuiltPolycycle {
    PolycycleSpec spec;
    VectorField2 field;
    std::vector<Point2> vertices;        // p_i
    std::vector<LineForm> lines;         // l_i, unit normal, l_i(0,0) > 0
    std::vector<AffineForm> affine_factors;  // A_i
    std::vector<Point2> section_bases;   // x_i, edge midpoints
    std::vector<Vec2> section_dirs;      // v_i = X_perp(x_i)/|X_perp(x_i)|
    double sin_theta = 0;                // sin(2*pi/n)
    double m_const = 0;                  // M_n

    int n() const { return spec.n; }
    Point2 vertex(int s) const { return vertices[(s - 1 + n()) % n()]; }
    const LineForm& line(int s) const { return lines[(s - 1 + n()) % n()]; }
    const AffineForm& factor(int s) const
    {
        return affine_factors[(s - 1 + n()) % n()];
    }
};

struct SaddleData {
    double eigen_neg;  // mu_s < 0
    double eigen_pos;  // nu_s > 0
    double ratio;      // |mu_s| / nu_s
};

BuiltPolycycle build_polycycle(const PolycycleSpec& spec);

/// Closed-form saddle eigenvalues at vertex p_s, s in 1..n.
SaddleData saddle_data(const BuiltPolycycle& b, int s);

/// One deformation mu_s * H_s(x) * Y_s of the degree-(n-1) edge-envelope
/// perturbation family, with H_s the product of all lines but l_s and
/// Y_s the constant vector (-alpha_s, -beta_s).
struct EdgeDeformation {
    Poly2 envelope;    // H_s
    Vec2 direction;    // Y_s
};

std::vector<EdgeDeformation> build_main3_family(const BuiltPolycycle& b);

/// Flow endpoints of the edge orbit carrying section i: (source, sink)
/// vertex indices, 1-based. The orbit runs source -> sink.
std::pair<int, int> edge_flow(const BuiltPolycycle& b, int i);

}  // namespace polycycle

#endif
