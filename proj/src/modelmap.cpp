#include "polycycle/modelmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polycycle {

void validate(const ModelMapSpec& spec)
{
    if (spec.ratios.empty())
        throw std::invalid_argument("model map: need at least one ratio");
    if (spec.ratios.size() != spec.offsets.size())
        throw std::invalid_argument("model map: ratios/offsets size mismatch");
    for (double r : spec.ratios)
        if (!(r > 0) || !std::isfinite(r))
            throw std::invalid_argument("model map: ratios must be positive");
    if (!(spec.alpha > 0))
        throw std::invalid_argument("model map: alpha must be positive");
    if (!(spec.rho < spec.eps_upper))
        throw std::invalid_argument("model map: empty domain");
}

double model_map_eval(const ModelMapSpec& spec, double t)
{
    validate(spec);
    double v = t;
    for (std::size_t k = 0; k < spec.ratios.size(); ++k) {
        const double r = spec.ratios[k];
        const bool integer_power = r == std::round(r);
        if (v < 0 && !integer_power)
            throw ModelDomainError(static_cast<int>(k) + 1);
        v = std::pow(v, r) + spec.offsets[k];
    }
    return v - spec.alpha * t;
}

ModelRoots model_map_roots(const ModelMapSpec& spec, int grid)
{
    validate(spec);
    if (grid < 2) throw std::invalid_argument("model map: grid too small");

    const double lo = std::max(spec.rho, 0.0);
    const double hi = spec.eps_upper;

    ModelRoots out;
    std::vector<double> ts, vs;
    for (int k = 0; k <= grid; ++k) {
        // open interval: keep away from the endpoints themselves
        const double t = lo + (hi - lo) * (k + 0.5) / (grid + 1);
        try {
            const double v = model_map_eval(spec, t);
            ts.push_back(t);
            vs.push_back(v);
        } catch (const ModelDomainError&) {
            ++out.skipped;
        }
    }

    auto eval_or_nan = [&](double t) {
        try {
            return model_map_eval(spec, t);
        } catch (const ModelDomainError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double a = vs[k], b = vs[k + 1];
        if (a == 0.0 || std::abs(a) < 1e-12) {
            if ((k == 0 || vs[k - 1] * b > 0) && a * b >= 0)
                out.tangencies.push_back(ts[k]);
            if (a == 0.0) {
                out.roots.push_back(ts[k]);
                continue;
            }
        }
        if (a * b < 0) {
            double tlo = ts[k], thi = ts[k + 1], flo = a;
            while (thi - tlo > 1e-12) {
                const double mid = 0.5 * (tlo + thi);
                const double fm = eval_or_nan(mid);
                if (std::isnan(fm)) break;
                if (fm == 0.0) {
                    tlo = thi = mid;
                    break;
                }
                if ((flo < 0) == (fm < 0)) {
                    tlo = mid;
                    flo = fm;
                } else {
                    thi = mid;
                }
            }
            out.roots.push_back(0.5 * (tlo + thi));
        }
    }
    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end(),
                                [](double x, double y) {
                                    return std::abs(x - y) < 1e-10;
                                }),
                    out.roots.end());
    return out;
}

}  // namespace polycycle
