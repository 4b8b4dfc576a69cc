#pragma once

#include <vector>

namespace ghostsnr {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch). Cached per n.
const QuadratureRule& gauss_legendre(int n);

// Rule on [a, b] split into `panels` equal panels of `n` points each.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int n);

}  // namespace ghostsnr
