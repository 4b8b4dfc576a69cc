#include "ghostsnr/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ghostsnr {

const QuadratureRule& gauss_legendre(int n) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mu;
    if (n < 1) throw std::invalid_argument("quadrature order must be positive");
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        rule.weights[i] = 2.0 * v * v;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int n) {
    const auto& base = gauss_legendre(n);
    QuadratureRule out;
    out.nodes.reserve(static_cast<size_t>(panels) * n);
    out.weights.reserve(static_cast<size_t>(panels) * n);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < n; ++i) {
            out.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
            out.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return out;
}

}  // namespace ghostsnr
