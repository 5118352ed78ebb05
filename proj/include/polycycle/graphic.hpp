#ifndef POLYCYCLE_GRAPHIC_HPP
#define POLYCYCLE_GRAPHIC_HPP

#include <optional>
#include <vector>

namespace polycycle::graphic {

/// Tolerance for "equals 1" comparisons on ratio products.
inline constexpr double kUnitTol = 1e-9;

enum class Stability { stable, unstable, undetermined };

/// Permutation sigma with its partial ratio products R_{0..n} and the
/// stability alternation count delta.
struct ExpulsionPlan {
    std::vector<int> permutation;        // 1-based entries sigma(1..n)
    std::vector<double> partial_products;  // R_0..R_n (size n+1)
    std::vector<bool> sign_changes;      // per i in 1..n
    int delta = 0;
};

double ratio_from_eigenvalues(double lambda_s, double lambda_u);

double graphic_number(const std::vector<double>& ratios);

Stability stability(const std::vector<double>& ratios);

ExpulsionPlan delta_for_permutation(const std::vector<double>& ratios,
                                    const std::vector<int>& sigma);

/// Exhaustive maximum of delta over all permutations; ties go to the
/// lexicographically smallest permutation. Guarded at n <= 10.
ExpulsionPlan delta_max(const std::vector<double>& ratios);

struct ChVerdict {
    bool pass = false;
    std::vector<int> witness;  // 1-based violating subset, empty when pass
};

/// No nonempty subset product of the ratios may equal 1. Guarded at n <= 20.
ChVerdict check_ch_conditions(const std::vector<double>& ratios);

}  // namespace polycycle::graphic

#endif
