#include "wick_integrals.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <cmath>
#include <numbers>

#include "ghostsnr/quadrature.hpp"

namespace ghostsnr::wick::detail {

namespace {

struct GraphEdge {
    int a;
    int b;
    bool filter;  // h line
    double tau;   // coherence width for non-filter edges
};

}  // namespace

std::optional<double> temporal_factor(const std::vector<Vertex>& vertices, const std::vector<TimeEdge>& edges,
                                      double x, double xn) {
    // Nodes: 0 = fixed external time, 1 = free external time, 2 + i = vertex i.
    std::vector<GraphEdge> E;
    const int nodes = 2 + static_cast<int>(vertices.size());
    std::vector<bool> present(nodes, false);
    present[0] = true;
    for (size_t i = 0; i < vertices.size(); ++i) {
        present[2 + i] = true;
        for (int t : vertices[i].external_times) {
            E.push_back({t, 2 + static_cast<int>(i), true, 0.0});
            present[t] = true;
        }
    }
    for (const auto& e : edges) E.push_back({2 + e.u, 2 + e.v, false, e.tau});

    // Breadth-first spanning tree from node 0.
    std::vector<std::vector<std::pair<int, int>>> adj(nodes);
    for (size_t i = 0; i < E.size(); ++i) {
        adj[E[i].a].emplace_back(E[i].b, static_cast<int>(i));
        adj[E[i].b].emplace_back(E[i].a, static_cast<int>(i));
    }
    std::vector<int> parent(nodes, -2), parent_edge(nodes, -1);
    parent[0] = -1;
    std::vector<int> queue{0};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        const int n = queue[qi];
        for (auto [m, ei] : adj[n]) {
            if (parent[m] != -2) continue;
            parent[m] = n;
            parent_edge[m] = ei;
            queue.push_back(m);
        }
    }
    for (int n = 0; n < nodes; ++n)
        if (present[n] && parent[n] == -2) return std::nullopt;

    std::vector<bool> in_tree(E.size(), false);
    for (int n = 0; n < nodes; ++n)
        if (parent_edge[n] >= 0) in_tree[parent_edge[n]] = true;
    std::vector<int> chords;
    for (size_t i = 0; i < E.size(); ++i)
        if (!in_tree[i]) chords.push_back(static_cast<int>(i));
    const int L = static_cast<int>(chords.size());

    // Loop-flow matrix: column j is the fundamental cycle of chord j.
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(static_cast<long>(E.size()), L);
    auto push = [&](int node, double sign, int col) {
        while (parent[node] >= 0) {
            const int e = parent_edge[node];
            N(e, col) += (E[e].a == node) ? sign : -sign;
            node = parent[node];
        }
    };
    for (int j = 0; j < L; ++j) {
        const int e = chords[j];
        N(e, j) = 1.0;
        push(E[e].b, 1.0, j);
        push(E[e].a, -1.0, j);
    }

    std::vector<int> filters;
    double coef = 1.0;
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(L, L);
    for (size_t i = 0; i < E.size(); ++i) {
        const bool bridge = L == 0 || N.row(static_cast<long>(i)).isZero(0.0);
        if (E[i].filter) {
            if (bridge) return 0.0;
            filters.push_back(static_cast<int>(i));
        } else {
            const double a = E[i].tau * E[i].tau;
            coef *= std::sqrt(2.0 * std::numbers::pi) * E[i].tau;
            if (!bridge) base += a * N.row(static_cast<long>(i)).transpose() * N.row(static_cast<long>(i));
        }
    }
    if (L == 0) return coef;

    const double alpha_b = 4.0 / (x * x);
    const bool notch = xn > 0.0;
    const double alpha_n = notch ? 4.0 / (xn * xn) : 0.0;
    const int combos = notch ? (1 << filters.size()) : 1;
    double total = 0.0;
    for (int c = 0; c < combos; ++c) {
        Eigen::MatrixXd M = base;
        double sign = 1.0;
        for (size_t f = 0; f < filters.size(); ++f) {
            const bool use_notch = (c >> f) & 1;
            const double a = use_notch ? alpha_n : alpha_b;
            if (use_notch) sign = -sign;
            const auto row = N.row(filters[f]);
            M += a * row.transpose() * row;
        }
        const double det = M.determinant();
        total += sign / std::sqrt(det);
    }
    return coef * std::pow(2.0 * std::numbers::pi, -0.5 * L) * total;
}

namespace {

// Quadratic exponent -sum_axes (v^T A v - 2 beta_axis^T v + gamma_axis) over the bucket variables.
struct QuadForm {
    int k = 0;
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d beta[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
    double gamma = 0.0;

    // Adds wt * (coef_u * p_u + coef_v * p_v + c)^2 summed over both axes; p is a variable or constant.
    void add(double wt, const std::vector<std::pair<int, double>>& lin, Vec2 c) {
        Eigen::Vector2d l = Eigen::Vector2d::Zero();
        for (auto [var, cf] : lin) l(var) += cf;
        A += wt * l * l.transpose();
        beta[0] -= wt * c.x * l;
        beta[1] -= wt * c.y * l;
        gamma += wt * (c.x * c.x + c.y * c.y);
    }
};

double disk_gaussian(double a, Vec2 mu, Vec2 center, double radius) {
    // Integral over the disk of exp(-a |rho - mu|^2).
    const double lambda = 2.0 * a * norm2({mu.x - center.x, mu.y - center.y});
    const double limit = 2.0 * a * radius * radius;
    double p;
    if (lambda < 1e-300) {
        p = -std::expm1(-0.5 * limit);
    } else {
        boost::math::non_central_chi_squared_distribution<double> d(2.0, lambda);
        p = boost::math::cdf(d, limit);
    }
    return std::numbers::pi / a * p;
}

double disk_pair(const QuadForm& q, Vec2 c, double R, int panels, int n) {
    const double a11 = q.A(0, 0), a12 = q.A(0, 1), a22 = q.A(1, 1);
    const double aeff = a11 - a12 * a12 / a22;
    const Vec2 beff{q.beta[0](0) - a12 / a22 * q.beta[0](1), q.beta[1](0) - a12 / a22 * q.beta[1](1)};
    const Vec2 mu{beff.x / aeff, beff.y / aeff};
    const double W = 9.0 / std::sqrt(aeff);
    const double xa = std::max(c.x - R, mu.x - W), xb = std::min(c.x + R, mu.x + W);
    if (!(xa < xb)) return 0.0;
    const double ta = std::asin(std::clamp((xa - c.x) / R, -1.0, 1.0));
    const double tb = std::asin(std::clamp((xb - c.x) / R, -1.0, 1.0));
    const auto tx = composite_gauss_legendre(ta, tb, panels, n);
    double sum = 0.0;
    for (size_t i = 0; i < tx.nodes.size(); ++i) {
        const double th = tx.nodes[i];
        const double x = c.x + R * std::sin(th);
        const double jac = R * std::cos(th);
        const double h = R * std::cos(th);
        const double ya = std::max(c.y - h, mu.y - W), yb = std::min(c.y + h, mu.y + W);
        if (!(ya < yb)) continue;
        const auto ty = composite_gauss_legendre(ya, yb, panels, n);
        double inner = 0.0;
        for (size_t j = 0; j < ty.nodes.size(); ++j) {
            const double y = ty.nodes[j];
            const Vec2 b{q.beta[0](1) - a12 * x, q.beta[1](1) - a12 * y};
            const double e = -a11 * (x * x + y * y) + 2.0 * (q.beta[0](0) * x + q.beta[1](0) * y) - q.gamma +
                             norm2(b) / a22;
            inner += ty.weights[j] * std::exp(e) * disk_gaussian(a22, {b.x / a22, b.y / a22}, c, R);
        }
        sum += tx.weights[i] * jac * inner;
    }
    return sum;
}

}  // namespace

SpatialValue spatial_factor(const SpatialSetup& s, const std::vector<SpaceFactor>& factors) {
    const auto& verts = *s.vertices;
    const MaskSpec& mask = *s.mask;
    std::vector<int> var(verts.size(), -1);
    int k = 0;
    for (size_t i = 0; i < verts.size(); ++i)
        if (verts[i].detector != s.pinhole_detector) var[i] = k++;
    if (k > 2) throw std::logic_error("at most two bucket coordinates per term are supported");

    QuadForm q;
    q.k = k;
    auto lin = [&](int v, double sign, std::vector<std::pair<int, double>>& l, Vec2& c) {
        if (var[v] >= 0) {
            l.emplace_back(var[v], sign);
        } else {
            c.x += sign * s.pinhole_pos.x;
            c.y += sign * s.pinhole_pos.y;
        }
    };
    double scale = 1.0;
    for (size_t i = 0; i < verts.size(); ++i) {
        if (var[i] < 0) continue;
        if (mask.shape() == MaskSpec::Shape::GaussianSpot) {
            const double w = mask.size();
            q.add(2.0 / (w * w), {{var[i], 1.0}}, -mask.center());
        } else if (mask.shape() == MaskSpec::Shape::Uniform) {
            scale *= mask.size() * mask.size();
        }
    }
    if (scale == 0.0) return {};
    for (const auto& f : factors) {
        const double ia2 = 1.0 / (f.envelope * f.envelope);
        if (f.u == f.v) {
            std::vector<std::pair<int, double>> l;
            Vec2 c;
            lin(f.u, 1.0, l, c);
            q.add(2.0 * ia2, l, c);
            continue;
        }
        for (int v : {f.u, f.v}) {
            std::vector<std::pair<int, double>> l;
            Vec2 c;
            lin(v, 1.0, l, c);
            q.add(ia2, l, c);
        }
        std::vector<std::pair<int, double>> l;
        Vec2 c;
        lin(f.v, 1.0, l, c);
        lin(f.u, f.inverted ? 1.0 : -1.0, l, c);
        q.add(1.0 / (2.0 * f.coherence * f.coherence), l, c);
    }

    if (k == 0) return {scale * std::exp(-q.gamma), 0.0};

    if (mask.shape() != MaskSpec::Shape::Disk) {
        double value = scale;
        if (k == 1) {
            const double a = q.A(0, 0);
            const double e = (q.beta[0](0) * q.beta[0](0) + q.beta[1](0) * q.beta[1](0)) / a - q.gamma;
            value *= std::numbers::pi / a * std::exp(e);
        } else {
            const Eigen::Matrix2d Ainv = q.A.inverse();
            const double e = q.beta[0].dot(Ainv * q.beta[0]) + q.beta[1].dot(Ainv * q.beta[1]) - q.gamma;
            value *= std::numbers::pi * std::numbers::pi / q.A.determinant() * std::exp(e);
        }
        return {value, 0.0};
    }

    const double R = mask.size();
    const Vec2 c = mask.center();
    if (k == 1) {
        const double a = q.A(0, 0);
        const Vec2 mu{q.beta[0](0) / a, q.beta[1](0) / a};
        const double e = a * norm2(mu) - q.gamma;
        return {std::exp(e) * disk_gaussian(a, mu, c, R), 0.0};
    }
    const double lmax = q.A.selfadjointView<Eigen::Upper>().eigenvalues().maxCoeff();
    const double aeff = q.A(0, 0) - q.A(0, 1) * q.A(0, 1) / q.A(1, 1);
    const double width = std::min(2.0 * R, 18.0 / std::sqrt(aeff));
    const int panels = std::clamp(static_cast<int>(std::ceil(width * std::sqrt(lmax) / 2.0)), 1, 64);
    int n = s.qc.min_nodes;
    double prev = disk_pair(q, c, R, panels, n);
    for (;;) {
        const int n2 = 2 * n;
        const double cur = disk_pair(q, c, R, panels, n2);
        const double err = std::abs(cur - prev);
        if (err <= s.qc.rel_tol * std::abs(cur) || err == 0.0) return {cur, err};
        if (n2 > s.qc.max_nodes)
            throw NonConvergence("disk quadrature did not reach relative tolerance " + std::to_string(s.qc.rel_tol) +
                                 " (last change " + std::to_string(err / std::abs(cur)) + ")");
        prev = cur;
        n = n2;
    }
}

}  // namespace ghostsnr::wick::detail
