#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "ghostsnr/model.hpp"

namespace ghostsnr::wick {

// One field-operator slot. Slots at the same vertex share a space and time variable.
struct FieldLabel {
    int detector = 1;
    bool daggered = false;
    int vertex = 0;
    std::string time_var;
    std::string space_var;
};

// An integration point of a moment: a detector, a spatial variable and the external times
// (0 = first product time, 1 = second) whose filter responses attach to it.
struct Vertex {
    int detector = 1;
    std::vector<int> external_times;
    std::string time_var;
    std::string space_var;
};

struct DeltaContraction {
    std::string removed_var;
    std::string kept_var;
};

struct MomentExpression {
    std::vector<FieldLabel> labels;  // normal ordered: daggered labels first
    std::vector<Vertex> vertices;
    std::vector<DeltaContraction> commutator_deltas;
    double prefactor = 1.0;

    int order() const { return static_cast<int>(labels.size()); }
};

struct CurrentFactor {
    int detector;
    int external_time;
};

// Normal-orders a product of photocurrents. Every way of merging same-detector currents through
// commutator deltas yields one expression; expressions are listed by decreasing order.
std::vector<MomentExpression> normal_order(const std::vector<CurrentFactor>& product);

// <i1(t) i2(t) i1(u) i2(u)>.
std::vector<MomentExpression> photocurrent_fourth_moment();

enum class PairType { PIAuto, PICross, PSCross, PSCrossConj };
std::string to_string(PairType t);

struct Pairing {
    std::vector<std::pair<int, int>> pairs;  // label indices
    std::vector<PairType> types;
};

std::vector<Pairing> enumerate_pairings(const MomentExpression& m, SourceKind kind);

struct QuadratureConfig {
    double rel_tol = 1e-4;
    int min_nodes = 12;
    int max_nodes = 96;
};

struct LedgerEntry {
    std::string term_class;  // excess x excess, excess x shot, shot x shot, background, disconnected
    int deltas = 0;
    int pairings = 0;
    int killed_by_ac = 0;
    double value = 0.0;
    double imag_residue = 0.0;
};

struct OracleResult {
    double mean = 0.0;
    double variance = 0.0;
    double snr = 0.0;
    std::vector<LedgerEntry> term_ledger;
    double quadrature_error_estimate = 0.0;
    std::vector<std::string> warnings;
};

// Dimensionless oracle on a detection-plane model: mean in units of q^2/T0^2, variance in
// q^4/T0^4 for T_I = averaging_ratio * T0.
struct MeanDetail {
    double mean = 0.0;
    double imag_residue = 0.0;
    std::vector<LedgerEntry> term_ledger;
    double quadrature_error_estimate = 0.0;
};
MeanDetail mean_detail(const PlaneModel& m, const QuadratureConfig& qc = {});
double mean_C(const PlaneModel& m, const QuadratureConfig& qc = {});
OracleResult variance_C(const PlaneModel& m, double averaging_ratio, const QuadratureConfig& qc = {});

// SI entry points: mean in A^2, variance in A^4.
double mean_C(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo, const MaskSpec& mask,
              const QuadratureConfig& qc = {});
OracleResult variance_C(const SourceParams& src, const DetectorParams& det, const GeometryParams& geo,
                        const MaskSpec& mask, double averaging_time, const QuadratureConfig& qc = {});

struct NotchPoint {
    double notch_product;  // Omega_N T0
    double snr;
    double relative_change;  // versus the first requested value
};
std::vector<NotchPoint> notch_sensitivity(const PlaneModel& m, double averaging_ratio,
                                          const std::vector<double>& notch_products,
                                          const QuadratureConfig& qc = {});

}  // namespace ghostsnr::wick
