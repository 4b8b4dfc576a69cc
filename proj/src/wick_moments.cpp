#include <algorithm>
#include <functional>

#include "ghostsnr/wick.hpp"

namespace ghostsnr::wick {

namespace {

std::string var_name(const char* prefix, int index) {
    return std::string(prefix) + static_cast<char>('a' + index);
}

// Restricted-growth enumeration of set partitions whose blocks share a detector.
void partitions(const std::vector<CurrentFactor>& product, size_t i, std::vector<int>& block_of, int blocks,
                const std::function<void(const std::vector<int>&, int)>& emit) {
    if (i == product.size()) {
        emit(block_of, blocks);
        return;
    }
    for (int b = 0; b <= blocks; ++b) {
        if (b < blocks) {
            // A block is identified by its first member; detectors must agree.
            size_t first = 0;
            while (block_of[first] != b) ++first;
            if (product[first].detector != product[i].detector) continue;
        }
        block_of[i] = b;
        partitions(product, i + 1, block_of, std::max(blocks, b + 1), emit);
    }
}

}  // namespace

std::vector<MomentExpression> normal_order(const std::vector<CurrentFactor>& product) {
    std::vector<MomentExpression> out;
    std::vector<int> block_of(product.size(), -1);
    partitions(product, 0, block_of, 0, [&](const std::vector<int>& bo, int nblocks) {
        MomentExpression m;
        std::vector<int> first(nblocks, -1);
        for (size_t i = 0; i < product.size(); ++i) {
            const int b = bo[i];
            if (first[b] < 0) {
                first[b] = static_cast<int>(i);
                m.vertices.push_back({product[i].detector, {product[i].external_time}, var_name("tau_", static_cast<int>(i)),
                                      var_name("rho_", static_cast<int>(i))});
            } else {
                m.vertices[b].external_times.push_back(product[i].external_time);
                m.commutator_deltas.push_back({var_name("rho_", static_cast<int>(i)) + "," + var_name("tau_", static_cast<int>(i)),
                                               var_name("rho_", first[b]) + "," + var_name("tau_", first[b])});
            }
        }
        for (bool dag : {true, false}) {
            for (int v = 0; v < nblocks; ++v)
                m.labels.push_back({m.vertices[v].detector, dag, v, m.vertices[v].time_var, m.vertices[v].space_var});
        }
        out.push_back(std::move(m));
    });
    std::stable_sort(out.begin(), out.end(),
                     [](const MomentExpression& a, const MomentExpression& b) { return a.order() > b.order(); });
    return out;
}

std::vector<MomentExpression> photocurrent_fourth_moment() {
    return normal_order({{1, 0}, {2, 0}, {1, 1}, {2, 1}});
}

std::string to_string(PairType t) {
    switch (t) {
        case PairType::PIAuto: return "PI-auto";
        case PairType::PICross: return "PI-cross";
        case PairType::PSCross: return "PS-cross";
        case PairType::PSCrossConj: return "PS-cross*";
    }
    return "?";
}

namespace {

bool pair_type(const FieldLabel& a, const FieldLabel& b, SourceKind kind, PairType& out) {
    if (a.daggered != b.daggered) {
        if (a.detector == b.detector) {
            out = PairType::PIAuto;
            return true;
        }
        out = PairType::PICross;
        return kind == SourceKind::Thermal;
    }
    // <E E> and <E+ E+> vanish on a single detector for every supported state.
    if (a.detector == b.detector) return false;
    out = a.daggered ? PairType::PSCrossConj : PairType::PSCross;
    return is_phase_sensitive(kind);
}

void match(const MomentExpression& m, SourceKind kind, std::vector<bool>& used, Pairing& cur,
           std::vector<Pairing>& out) {
    int first = -1;
    for (size_t i = 0; i < used.size(); ++i)
        if (!used[i]) {
            first = static_cast<int>(i);
            break;
        }
    if (first < 0) {
        out.push_back(cur);
        return;
    }
    used[first] = true;
    for (size_t j = first + 1; j < used.size(); ++j) {
        if (used[j]) continue;
        PairType t;
        if (!pair_type(m.labels[first], m.labels[j], kind, t)) continue;
        used[j] = true;
        cur.pairs.emplace_back(first, static_cast<int>(j));
        cur.types.push_back(t);
        match(m, kind, used, cur, out);
        cur.pairs.pop_back();
        cur.types.pop_back();
        used[j] = false;
    }
    used[first] = false;
}

}  // namespace

std::vector<Pairing> enumerate_pairings(const MomentExpression& m, SourceKind kind) {
    std::vector<Pairing> out;
    std::vector<bool> used(m.labels.size(), false);
    Pairing cur;
    match(m, kind, used, cur, out);
    return out;
}

}  // namespace ghostsnr::wick
