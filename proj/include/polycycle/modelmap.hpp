#ifndef POLYCYCLE_MODELMAP_HPP
#define POLYCYCLE_MODELMAP_HPP

#include <stdexcept>
#include <vector>

namespace polycycle {

/// The nested power-plus-offset return-map model
///   Psi(t) = (...((t^{r1} + b1)^{r2} + b2)...)^{rn} + bn,
/// whose fixed points Psi(t) = alpha * t model bifurcating cycles.
struct ModelMapSpec {
    std::vector<double> ratios;
    std::vector<double> offsets;
    double alpha = 1.0;
    double rho = 0.0;        // domain lower end
    double eps_upper = 0.1;  // domain upper end
};

/// Raised when a nested base goes negative under a non-integer power.
struct ModelDomainError : std::domain_error {
    int level;  // 1-based nesting level that failed
    explicit ModelDomainError(int lvl)
        : std::domain_error("model map: negative base at nesting level " +
                            std::to_string(lvl)),
          level(lvl)
    {
    }
};

void validate(const ModelMapSpec& spec);

/// Psi(t) - alpha * t.
double model_map_eval(const ModelMapSpec& spec, double t);

struct ModelRoots {
    std::vector<double> roots;        // sorted, refined to 1e-12
    std::vector<double> tangencies;   // |Psi - alpha t| < 1e-12, no sign change
    int skipped = 0;                  // grid points outside the valid domain
};

ModelRoots model_map_roots(const ModelMapSpec& spec, int grid);

}  // namespace polycycle

#endif
