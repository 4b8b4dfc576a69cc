#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "ghostsnr/mc.hpp"

namespace ghostsnr::mc {

namespace {

constexpr int kMaxDensePoints = 2500;

struct Kernel1D {
    double a2;  // envelope^2
    double c2;  // coherence^2
    double operator()(double u, double v) const {
        return std::exp(-(u * u + v * v) / a2 - (u - v) * (u - v) / (2.0 * c2));
    }
};

// Modes of sqrt(D) K sqrt(D) on a set of nodes, with weights at the requested points.
struct NodeModes {
    Eigen::VectorXd mu;                      // descending
    std::vector<Eigen::VectorXd> weights;    // per point, per mode
};

template <class KernelFn>
NodeModes node_modes(int count, const std::vector<double>& d, KernelFn&& kernel, int npoints,
                     const std::function<double(int, int)>& kernel_to_point) {
    Eigen::MatrixXd B(count, count);
    const Eigen::VectorXd sd = Eigen::Map<const Eigen::VectorXd>(d.data(), count).cwiseSqrt();
    for (int i = 0; i < count; ++i)
        for (int j = 0; j <= i; ++j) B(i, j) = B(j, i) = sd(i) * kernel(i, j) * sd(j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    const Eigen::VectorXd ev = es.eigenvalues().reverse();
    const Eigen::MatrixXd U = es.eigenvectors().rowwise().reverse();
    int keep = 0;
    const double top = ev.size() ? ev(0) : 0.0;
    while (keep < ev.size() && ev(keep) > 1e-14 * top) ++keep;
    NodeModes out;
    out.mu = ev.head(keep);
    for (int p = 0; p < npoints; ++p) {
        Eigen::VectorXd kp(count);
        for (int i = 0; i < count; ++i) kp(i) = sd(i) * kernel_to_point(i, p);
        Eigen::VectorXd w = U.leftCols(keep).transpose() * kp;
        for (int k = 0; k < keep; ++k) w(k) /= std::sqrt(out.mu(k));
        out.weights.push_back(std::move(w));
    }
    return out;
}

std::vector<double> axis_nodes(double lo, double hi, double h) {
    const double mid = 0.5 * (lo + hi);
    const int m = static_cast<int>(std::ceil(0.5 * (hi - lo) / h));
    std::vector<double> x(2 * m + 1);
    for (int j = 0; j <= 2 * m; ++j) x[j] = mid + (j - m) * h;
    return x;
}

struct Candidate {
    double mu;
    std::vector<double> w;  // per point
};

ModalBasis select(std::vector<Candidate> cands, double total_flux, const std::vector<double>& self_cov,
                  double tolerance, int grid_points) {
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.mu > b.mu; });
    const size_t n = cands.size();
    // suffix sums of flux and of the pinhole-bucket weight mu w^2
    std::vector<double> tail_flux(n + 1, 0.0), tail_g(n + 1, 0.0);
    for (size_t i = n; i-- > 0;) {
        tail_flux[i] = tail_flux[i + 1] + cands[i].mu;
        tail_g[i] = tail_g[i + 1] + cands[i].mu * cands[i].w[0] * cands[i].w[0];
    }
    size_t keep = 0;
    while (keep < n && (tail_flux[keep] > tolerance * total_flux || tail_g[keep] > tolerance * tail_g[0])) ++keep;

    ModalBasis out;
    out.total_flux = total_flux;
    out.grid_points = grid_points;
    out.dropped_flux = std::max(0.0, total_flux - (tail_flux[0] - tail_flux[keep]));
    const size_t npts = self_cov.size();
    std::vector<double> resolved(npts, 0.0);
    std::vector<std::vector<double>> weights(npts);
    for (size_t k = 0; k < keep; ++k) {
        out.flux.push_back(cands[k].mu);
        for (size_t p = 0; p < npts; ++p) {
            weights[p].push_back(cands[k].w[p]);
            resolved[p] += cands[k].w[p] * cands[k].w[p];
        }
    }
    out.pinhole_weight = std::move(weights[0]);
    out.pinhole_residual = std::sqrt(std::max(0.0, self_cov[0] - resolved[0]));
    for (size_t p = 1; p < npts; ++p) {
        out.probe_weight.push_back(std::move(weights[p]));
        out.probe_residual.push_back(std::sqrt(std::max(0.0, self_cov[p] - resolved[p])));
    }
    return out;
}

}  // namespace

ModalBasis build_modes(const PlaneModel& m, Vec2 pinhole_point, const std::vector<Vec2>& probes, double h,
                       double tolerance) {
    const GaussianTerm auto_term = plane_terms(m, KernelKind::PhaseInsensitiveAuto).front();
    const Kernel1D K{auto_term.envelope_radius * auto_term.envelope_radius,
                     auto_term.coherence_radius * auto_term.coherence_radius};
    const double a = auto_term.envelope_radius;
    const MaskSpec& mask = m.mask;

    std::vector<Vec2> points{pinhole_point};
    points.insert(points.end(), probes.begin(), probes.end());
    const int npts = static_cast<int>(points.size());
    std::vector<double> self_cov;
    for (const auto& p : points) self_cov.push_back(K(p.x, p.x) * K(p.y, p.y));

    if (mask.shape() == MaskSpec::Shape::Uniform && mask.size() == 0.0) {
        return select({}, 0.0, self_cov, tolerance, 0);
    }

    if (mask.shape() != MaskSpec::Shape::Disk) {
        double lo[2], hi[2];
        const Vec2 c = mask.center();
        for (int ax = 0; ax < 2; ++ax) {
            const double cc = ax == 0 ? c.x : c.y;
            if (mask.shape() == MaskSpec::Shape::GaussianSpot) {
                lo[ax] = std::max(cc - 4.5 * mask.size(), -4.0 * a);
                hi[ax] = std::min(cc + 4.5 * mask.size(), 4.0 * a);
            } else {
                lo[ax] = -3.0 * a;
                hi[ax] = 3.0 * a;
            }
            if (!(lo[ax] < hi[ax])) return select({}, 0.0, self_cov, tolerance, 0);
        }
        NodeModes axis[2];
        double trace[2] = {0.0, 0.0};
        int sizes[2];
        for (int ax = 0; ax < 2; ++ax) {
            const auto x = axis_nodes(lo[ax], hi[ax], h);
            const double cc = ax == 0 ? c.x : c.y;
            std::vector<double> d(x.size());
            for (size_t j = 0; j < x.size(); ++j) {
                d[j] = h;
                if (mask.shape() == MaskSpec::Shape::GaussianSpot) {
                    const double s = (x[j] - cc) / mask.size();
                    d[j] *= std::exp(-2.0 * s * s);
                } else if (ax == 0) {
                    d[j] *= mask.size() * mask.size();
                }
                trace[ax] += d[j] * K(x[j], x[j]);
            }
            sizes[ax] = static_cast<int>(x.size());
            axis[ax] = node_modes(
                sizes[ax], d, [&](int i, int j) { return K(x[i], x[j]); }, npts,
                [&](int i, int p) { return K(x[i], ax == 0 ? points[p].x : points[p].y); });
        }
        std::vector<Candidate> cands;
        for (int i = 0; i < axis[0].mu.size(); ++i)
            for (int j = 0; j < axis[1].mu.size(); ++j) {
                Candidate cd{axis[0].mu(i) * axis[1].mu(j), std::vector<double>(npts)};
                for (int p = 0; p < npts; ++p) cd.w[p] = axis[0].weights[p](i) * axis[1].weights[p](j);
                cands.push_back(std::move(cd));
            }
        return select(std::move(cands), trace[0] * trace[1], self_cov, tolerance, sizes[0] * sizes[1]);
    }

    // Disk: dense grid over the support.
    const Vec2 c = mask.center();
    const double R = mask.size();
    std::vector<Vec2> nodes;
    const auto xs = axis_nodes(c.x - R, c.x + R, h);
    const auto ys = axis_nodes(c.y - R, c.y + R, h);
    for (double x : xs)
        for (double y : ys) {
            if ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) > R * R) continue;
            if (x * x + y * y > 16.0 * a * a) continue;
            nodes.push_back({x, y});
        }
    if (nodes.size() > static_cast<size_t>(kMaxDensePoints))
        throw ConfigError("mask.size", "disk mask needs " + std::to_string(nodes.size()) +
                                           " grid points; the simulator supports at most " +
                                           std::to_string(kMaxDensePoints));
    const int count = static_cast<int>(nodes.size());
    std::vector<double> d(count, h * h);
    double trace = 0.0;
    for (const auto& p : nodes) trace += h * h * K(p.x, p.x) * K(p.y, p.y);
    const auto nm = node_modes(
        count, d, [&](int i, int j) { return K(nodes[i].x, nodes[j].x) * K(nodes[i].y, nodes[j].y); }, npts,
        [&](int i, int p) { return K(nodes[i].x, points[p].x) * K(nodes[i].y, points[p].y); });
    std::vector<Candidate> cands;
    for (int k = 0; k < nm.mu.size(); ++k) {
        Candidate cd{nm.mu(k), std::vector<double>(npts)};
        for (int p = 0; p < npts; ++p) cd.w[p] = nm.weights[p](k);
        cands.push_back(std::move(cd));
    }
    return select(std::move(cands), trace, self_cov, tolerance, count);
}

}  // namespace ghostsnr::mc
