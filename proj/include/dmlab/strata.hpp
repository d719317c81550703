#pragma once
// Index sets A_l, A_l^+-, A_l^R with their classification, the order extension,
// and the blowup schedules.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dmlab/marks.hpp"
#include "dmlab/trees.hpp"

namespace dmlab {

enum class StratumKind { Complex, H, E, D1, D2, D3, None };

inline const char* kind_name(StratumKind k) {
    switch (k) {
        case StratumKind::Complex: return "C";
        case StratumKind::H: return "H";
        case StratumKind::E: return "E";
        case StratumKind::D1: return "D1";
        case StratumKind::D2: return "D2";
        case StratumKind::D3: return "D3";
        default: return "-";
    }
}

struct StratumLabel {
    MarkSpace space;
    MarkMask rho = 0;
    StratumKind kind = StratumKind::Complex;

    int size() const { return popcount(rho); }
    std::vector<Mark> marks() const { return mask_to_marks(rho); }
    std::string str() const { return space.label_set(rho); }
    friend bool operator==(const StratumLabel& a, const StratumLabel& b) {
        return a.space.ell == b.space.ell && a.space.real == b.space.real && a.rho == b.rho;
    }
};

// (|rho|, sorted mark list) ordering; extends strict inclusion.
inline bool order_less(MarkMask a, MarkMask b) {
    int pa = popcount(a), pb = popcount(b);
    if (pa != pb) return pa < pb;
    return mask_to_marks(a) < mask_to_marks(b);
}

inline MarkMask complement(const MarkSpace& sp, MarkMask rho) { return sp.all() & ~rho; }

// |rho ∩ [3]| >= 2 and |[l] - rho| >= 2
inline bool in_a_ell(int ell, MarkMask rho) {
    return popcount(rho & marks_to_mask({1, 2, 3})) >= 2 &&
           popcount(complement({ell, false}, rho)) >= 2;
}

// |rho ∩ {1+,1-,2+}| >= 2 and |[l^+-] - rho| >= 2
inline bool in_a_ell_pm(int ell, MarkMask rho) {
    return popcount(rho & marks_to_mask({plus(1), minus(1), plus(2)})) >= 2 &&
           popcount(complement({ell, true}, rho)) >= 2;
}

namespace detail {

inline bool proper_subset(MarkMask a, MarkMask b) { return (a & ~b) == 0 && a != b; }

inline StratumKind base_real_kind(int ell, MarkMask rho) {
    MarkSpace sp{ell, true};
    MarkMask rb = bar_mask(rho), rc = complement(sp, rho);
    if (rb == rho) return StratumKind::H;
    if (rb == rc) return StratumKind::E;
    if (proper_subset(rb, rc)) return StratumKind::D1;
    if (proper_subset(rc, rb)) return StratumKind::D3;  // provisional, D2 split off below
    return StratumKind::None;
}

}  // namespace detail

inline StratumKind classify_real(int ell, MarkMask rho) {
    if (!in_a_ell_pm(ell, rho)) return StratumKind::None;
    StratumKind k = detail::base_real_kind(ell, rho);
    if (k != StratumKind::D3) return k;
    // D2 = { bar(rho)^c : rho in D1 }; the candidate preimage is bar(rho^c).
    MarkSpace sp{ell, true};
    MarkMask pre = bar_mask(complement(sp, rho));
    if (in_a_ell_pm(ell, pre) && detail::base_real_kind(ell, pre) == StratumKind::D1)
        return StratumKind::D2;
    return StratumKind::D3;
}

// A_l, sorted by the order extension.
inline std::vector<StratumLabel> build_a_ell(int ell) {
    if (ell < 3) throw InvalidArgument("A_l needs l >= 3");
    MarkSpace sp{ell, false};
    std::vector<StratumLabel> out;
    for (MarkMask r = 0; r <= sp.all(); r += 2)
        if (in_a_ell(ell, r)) out.push_back({sp, r, StratumKind::Complex});
    std::sort(out.begin(), out.end(),
              [](const StratumLabel& a, const StratumLabel& b) { return order_less(a.rho, b.rho); });
    return out;
}

// A_l^+- with kinds; elements outside A_l^R carry kind None.
inline std::vector<StratumLabel> build_a_ell_pm(int ell) {
    if (ell < 1) throw InvalidArgument("A_l^+- needs l >= 1");
    if (2 * ell > 24) throw InvalidArgument("l too large for exhaustive subset scan");
    MarkSpace sp{ell, true};
    std::vector<StratumLabel> out;
    for (MarkMask r = 0; r <= sp.all(); r += 2)
        if (in_a_ell_pm(ell, r)) out.push_back({sp, r, classify_real(ell, r)});
    std::sort(out.begin(), out.end(),
              [](const StratumLabel& a, const StratumLabel& b) { return order_less(a.rho, b.rho); });
    return out;
}

// A_l^R = H ∪ E ∪ D, in schedule order.
inline std::vector<StratumLabel> build_a_ell_real(int ell) {
    std::vector<StratumLabel> out;
    for (auto& s : build_a_ell_pm(ell))
        if (s.kind != StratumKind::None) out.push_back(s);
    return out;
}

struct KindCounts {
    int H = 0, E = 0, D1 = 0, D2 = 0, D3 = 0;
    int total() const { return H + E + D1 + D2 + D3; }
    // Distinct boundary divisors: D1 and D2 labels name the same divisor in pairs,
    // and D3 labels pair with their conjugates.
    int divisors() const { return D1 + D3 / 2; }
};

inline KindCounts count_kinds(const std::vector<StratumLabel>& labels) {
    KindCounts c;
    for (auto& s : labels) {
        switch (s.kind) {
            case StratumKind::H: ++c.H; break;
            case StratumKind::E: ++c.E; break;
            case StratumKind::D1: ++c.D1; break;
            case StratumKind::D2: ++c.D2; break;
            case StratumKind::D3: ++c.D3; break;
            default: break;
        }
    }
    return c;
}

// ---------------------------------------------------------------- schedules

enum class BlowupType { Holomorphic, Real, Complex, Augmented };

inline const char* blowup_name(BlowupType t) {
    switch (t) {
        case BlowupType::Holomorphic: return "holomorphic";
        case BlowupType::Real: return "real";
        case BlowupType::Complex: return "complex";
        default: return "augmented";
    }
}

struct BlowupStep {
    StratumLabel label;
    BlowupType type;
    int predecessor;  // rank of rho-1 (0 is the bottom element)
};

// Steps are ranked 1..N; rank 0 is the bottom element 0.
struct BlowupSchedule {
    int ell = 0;
    bool real = false;
    std::vector<BlowupStep> steps;

    int size() const { return int(steps.size()); }
    // rank of rho in the order, or -1 when rho is not an index.
    int rank(MarkMask rho) const {
        for (int k = 0; k < size(); ++k)
            if (steps[k].label.rho == rho) return k + 1;
        return -1;
    }
    const StratumLabel& at_rank(int r) const { return steps.at(r - 1).label; }
    // Labels rho > rho*, for rho* given by rank.
    std::vector<StratumLabel> above(int rank_star) const {
        std::vector<StratumLabel> out;
        for (int k = rank_star; k < size(); ++k) out.push_back(steps[k].label);
        return out;
    }
};

inline BlowupType blowup_type_for(StratumKind k) {
    switch (k) {
        case StratumKind::Complex: return BlowupType::Holomorphic;
        case StratumKind::H: return BlowupType::Real;
        case StratumKind::E: return BlowupType::Augmented;
        case StratumKind::D1:
        case StratumKind::D2:
        case StratumKind::D3: return BlowupType::Complex;
        default: throw InvalidArgument("label outside A_l^R has no blowup");
    }
}

inline BlowupSchedule schedule(int ell, bool real) {
    if (real && ell < 2) throw InvalidArgument("real schedule needs l >= 2");
    if (!real && ell < 3) throw InvalidArgument("complex schedule needs l >= 3");
    BlowupSchedule s;
    s.ell = ell;
    s.real = real;
    auto labels = real ? build_a_ell_real(ell) : build_a_ell(ell);
    for (std::size_t k = 0; k < labels.size(); ++k)
        s.steps.push_back({labels[k], blowup_type_for(labels[k].kind), int(k)});
    return s;
}

// Every strict inclusion among indices is respected by the order.
inline bool is_linear_extension(const BlowupSchedule& s) {
    for (int a = 0; a < s.size(); ++a)
        for (int b = 0; b < s.size(); ++b)
            if (detail::proper_subset(s.steps[a].label.rho, s.steps[b].label.rho) && !(a < b))
                return false;
    return true;
}

// ---------------------------------------------------------------- trees and nesting

// The oriented edge e with mu^{-1}(Ver_e) = rho, if any.
inline std::optional<OrientedEdge> stratum_edge(const MarkedTree& t, MarkMask rho) {
    for (auto e : oriented_edges(t))
        if (split_marks(t, e.tail, e.head) == rho) return e;
    return std::nullopt;
}

enum class NestMode { Ell, EllPlusOne, Real };

// Ell: rho ⊃ rho', rho ⊂ rho', or rho ⊃ [l] - rho'. Other modes: nested only.
inline bool neighbor_compat(const MarkSpace& sp, MarkMask a, MarkMask b, NestMode mode) {
    bool nested = (a & ~b) == 0 || (b & ~a) == 0;
    if (nested) return true;
    if (mode == NestMode::Ell) return (complement(sp, b) & ~a) == 0;
    return false;
}

}  // namespace dmlab
