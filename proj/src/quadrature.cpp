#include "stator/quadrature.hpp"

#include "stator/error.hpp"

#include <cmath>
#include <numbers>

namespace stator {

GaussRule gauss_legendre(int order) {
    if (order < 1 || order > 64) throw DomainError("gauss_legendre: order must be in [1, 64]");
    GaussRule rule;
    rule.points.resize(order);
    rule.weights.resize(order);
    // Newton iteration on P_order from the Chebyshev-like initial guess.
    for (int i = 0; i < order; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double p = order == 1 ? x : p1;
            const double pm1 = order == 1 ? 1.0 : p0;
            dp = order * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        const double p = order == 1 ? x : p1;
        const double pm1 = order == 1 ? 1.0 : p0;
        dp = order * (x * p - pm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[order - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[order - 1 - i] = 0.5 * w;
    }
    return rule;
}

} // namespace stator
