#pragma once

#include <vector>

namespace stator {

struct GaussRule {
    std::vector<double> points;  // on [0, 1]
    std::vector<double> weights; // sum to 1
};

/// Gauss-Legendre rule with `order` points mapped to [0, 1].
GaussRule gauss_legendre(int order);

} // namespace stator
