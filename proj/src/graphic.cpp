#include "polycycle/graphic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polycycle::graphic {

namespace {

void validate(const std::vector<double>& ratios)
{
    if (ratios.empty()) throw std::invalid_argument("empty ratio vector");
    for (double r : ratios)
        if (!(r > 0) || !std::isfinite(r))
            throw std::invalid_argument("ratios must be positive and finite");
}

}  // namespace

double ratio_from_eigenvalues(double lambda_s, double lambda_u)
{
    if (!(lambda_s < 0) || !(lambda_u > 0))
        throw std::invalid_argument("not a saddle: need lambda_s < 0 < lambda_u");
    return -lambda_s / lambda_u;
}

double graphic_number(const std::vector<double>& ratios)
{
    validate(ratios);
    double p = 1.0;
    for (double r : ratios) p *= r;
    return p;
}

Stability stability(const std::vector<double>& ratios)
{
    const double g = graphic_number(ratios);
    if (g > 1.0 + kUnitTol) return Stability::stable;
    if (g < 1.0 - kUnitTol) return Stability::unstable;
    return Stability::undetermined;
}

ExpulsionPlan delta_for_permutation(const std::vector<double>& ratios,
                                    const std::vector<int>& sigma)
{
    validate(ratios);
    const int n = static_cast<int>(ratios.size());
    if (static_cast<int>(sigma.size()) != n)
        throw std::invalid_argument("permutation size mismatch");
    std::vector<bool> seen(n, false);
    for (int s : sigma) {
        if (s < 1 || s > n || seen[s - 1])
            throw std::invalid_argument("not a permutation of 1..n");
        seen[s - 1] = true;
    }

    ExpulsionPlan plan;
    plan.permutation = sigma;
    plan.partial_products.resize(n + 1);
    double prod = 1.0;
    for (int i = 1; i <= n; ++i) {
        prod *= ratios[sigma[i - 1] - 1];
        plan.partial_products[i] = prod;
    }
    plan.partial_products[0] = 1.0 / plan.partial_products[1];

    plan.sign_changes.resize(n);
    for (int i = 1; i <= n; ++i) {
        const double a = plan.partial_products[i] - 1.0;
        const double b = plan.partial_products[i - 1] - 1.0;
        const bool change =
            std::abs(a) > kUnitTol && std::abs(b) > kUnitTol && a * b < 0;
        plan.sign_changes[i - 1] = change;
        if (change) ++plan.delta;
    }
    return plan;
}

ExpulsionPlan delta_max(const std::vector<double>& ratios)
{
    validate(ratios);
    const int n = static_cast<int>(ratios.size());
    if (n > 10) throw std::invalid_argument("delta_max: n > 10 not supported");

    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 1);
    ExpulsionPlan best = delta_for_permutation(ratios, sigma);
    while (std::next_permutation(sigma.begin(), sigma.end())) {
        ExpulsionPlan plan = delta_for_permutation(ratios, sigma);
        if (plan.delta > best.delta) best = std::move(plan);
    }
    // std::next_permutation enumerates in lexicographic order and strict
    // improvement keeps the first maximizer, so the tie-break is built in.
    return best;
}

ChVerdict check_ch_conditions(const std::vector<double>& ratios)
{
    validate(ratios);
    const int n = static_cast<int>(ratios.size());
    if (n > 20) throw std::invalid_argument("check_ch_conditions: n > 20");

    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double prod = 1.0;
        for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) prod *= ratios[j];
        if (std::abs(prod - 1.0) <= kUnitTol) {
            ChVerdict v;
            for (int j = 0; j < n; ++j)
                if (mask & (1u << j)) v.witness.push_back(j + 1);
            return v;
        }
    }
    return {true, {}};
}

}  // namespace polycycle::graphic
