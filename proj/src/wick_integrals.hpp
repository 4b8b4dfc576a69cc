#pragma once

#include <optional>
#include <vector>

#include "ghostsnr/model.hpp"
#include "ghostsnr/wick.hpp"

namespace ghostsnr::wick::detail {

// Coherence-function line between two vertices, Gaussian in the time difference with width `tau`.
struct TimeEdge {
    int u;
    int v;
    double tau;
};

// Integral over all vertex times and the second external time (the first is fixed at 0) of the
// product of filter responses and coherence lines. Returns nullopt when the graph splits into
// pieces that are not tied to the fixed time (the integral then grows with T_I); returns 0 when
// a filter line is a bridge, because H(0) = 0.
std::optional<double> temporal_factor(const std::vector<Vertex>& vertices, const std::vector<TimeEdge>& edges,
                                      double bandwidth_product, double notch_product);

// One Gaussian factor of the spatial integrand.
struct SpaceFactor {
    int u;            // vertex index
    int v;            // vertex index; equal to u for an intensity (self) factor
    double envelope;  // a
    double coherence; // rho_c
    bool inverted;
};

struct SpatialSetup {
    const std::vector<Vertex>* vertices;
    int pinhole_detector = 1;
    Vec2 pinhole_pos;
    const MaskSpec* mask;
    QuadratureConfig qc;
};

struct SpatialValue {
    double value = 0.0;
    double error = 0.0;
};

// Integral over the bucket-vertex positions of the mask weights |T|^2 times the Gaussian factors.
// Pinhole vertices sit at the pinhole position.
SpatialValue spatial_factor(const SpatialSetup& s, const std::vector<SpaceFactor>& factors);

}  // namespace ghostsnr::wick::detail
