#ifndef POLYCYCLE_BIFURCATE_HPP
#define POLYCYCLE_BIFURCATE_HPP

#include <span>
#include <vector>

#include "polycycle/builder.hpp"
#include "polycycle/flow.hpp"
#include "polycycle/graphic.hpp"
#include "polycycle/melnikov.hpp"

namespace polycycle::bifurcate {

/// Side of the polycycle carrying the first return map.
enum class Sigma0 : int { inner = -1, outer = +1 };

inline double sign_of(Sigma0 s) { return static_cast<double>(static_cast<int>(s)); }

/// Transversal sections of a built polycycle as flow sections.
std::vector<flow::Section> sections_of(const BuiltPolycycle& b,
                                       double half_width = 0.45);

/// Seeds one circuit from each side of section 1 (offset delta); the side
/// completing a full return defines sigma_0.
Sigma0 detect_sigma0(const BuiltPolycycle& b, double delta = 1e-3);

struct ConnectionDisplacement {
    double b_u = 0;  // unstable-separatrix crossing coordinate
    double b_s = 0;  // stable-separatrix crossing coordinate
    double d = 0;    // b_u - b_s
};

struct DisplacementVector {
    std::vector<double> mu;
    std::vector<ConnectionDisplacement> connections;  // index i-1 = connection i
    Sigma0 sigma0 = Sigma0::inner;

    double d(int i) const { return connections[i - 1].d; }
};

/// Perturbed saddles (Newton-continued from the unperturbed vertices) and
/// all 2n separatrix shots against the fixed unperturbed sections.
/// Passing a known sigma0 skips the circuit-integration detection.
DisplacementVector displacement_vector(const melnikov::PerturbationFamily& fam,
                                       const BuiltPolycycle& b,
                                       std::span<const double> mu,
                                       const Sigma0* sigma0_hint = nullptr);

enum class BypassRegime { unbroken, bypass };

struct BypassDisplacement {
    double value = 0;
    BypassRegime regime = BypassRegime::unbroken;
    bool ratio_above_one = true;  // which piecewise definition applied
};

/// The displacement map past the expelled saddle (default: saddle n).
/// For r_expelled > 1 it is measured on section expelled-1; the bypass
/// branch continues the source separatrix of the incoming edge through
/// the Dulac passage. For r_expelled < 1 the time-reversed analogue is
/// measured on section expelled.
BypassDisplacement bypass_displacement(const melnikov::PerturbationFamily& fam,
                                       const BuiltPolycycle& b,
                                       std::span<const double> mu,
                                       int expelled = 0,
                                       const DisplacementVector* precomputed = nullptr);

struct BreakResult {
    std::vector<double> mu;        // converged parameters (mu_n fixed)
    int iterations = 0;
    double residual = 0;           // max |F| at the solution
    DisplacementVector displacements;
    BypassDisplacement bypass;
};

/// Fixes the expelled saddle's parameter mu_n = free_value and
/// Newton-solves (d_1, ..., d_{n-2}, d^{(1)}_{n-1}) = 0 over
/// (mu_1, ..., mu_{n-1}), seeded and preconditioned by the Melnikov
/// matrix, with Broyden updates afterwards.
BreakResult solve_connection_break(const melnikov::PerturbationFamily& fam,
                                   const BuiltPolycycle& b,
                                   double free_value,
                                   const melnikov::MelnikovReport* matrix = nullptr);

struct CycleRecord {
    double fixed_point = 0;   // section coordinate t*
    double period = 0;
    double multiplier = 0;    // return-map derivative estimate
    double hausdorff_to_polycycle = 0;
    std::vector<Point2> orbit;  // one period, recorded
};

/// Scans the return map of `sec` over the geometric grid in
/// [t_lo, t_hi] (signed section coordinates), brackets sign changes of
/// pi(t) - t and refines them by bisection to 1e-11.
std::vector<CycleRecord> detect_cycles(const VectorField2& f,
                                       const std::vector<flow::Section>& sections,
                                       int sec_index, double t_lo, double t_hi,
                                       int grid,
                                       const std::vector<Point2>& polycycle);

}  // namespace polycycle::bifurcate

#endif
