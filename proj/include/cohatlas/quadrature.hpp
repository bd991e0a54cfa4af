// quadrature.hpp - Gauss rules used by the resolution-of-unity integrator

#pragma once

#include <vector>

namespace cohatlas {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1] (Golub-Welsch).
GaussRule gauss_legendre(int order);

// Gauss rule for the weight e^{-u} restricted to [0, upper]: exact for
// polynomials of degree <= 2*order-1 against that weight. All nodes lie in
// (0, upper) and all weights are positive.
GaussRule truncated_laguerre(int order, double upper);

} // namespace cohatlas
