#pragma once
// Stable nodal marked curves with exact coordinates on every component.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmlab/exactfield.hpp"
#include "dmlab/sampling.hpp"
#include "dmlab/strata.hpp"
#include "dmlab/trees.hpp"

namespace dmlab {

struct StableCurve {
    MarkedTree tree;
    std::vector<ProjPoint> mark_pos;                    // mark m sits on component mu[m]
    std::map<std::pair<int, int>, ProjPoint> node_pos;  // (v, w): node {v, w} on component v

    bool is_real() const { return tree.is_real(); }
    const MarkSpace& space() const { return tree.space; }
    const ProjPoint& node(int v, int w) const {
        auto it = node_pos.find({v, w});
        if (it == node_pos.end()) throw InvalidArgument("no node between these components");
        return it->second;
    }
    // Special points of component v: (key, point); key > 0 is a mark, key < 0 is -(w+1).
    std::vector<std::pair<int, ProjPoint>> special_points(int v) const {
        std::vector<std::pair<int, ProjPoint>> out;
        for (Mark m : mask_to_marks(tree.marks_at(v))) out.push_back({m, mark_pos[m]});
        for (auto& [key, p] : node_pos)
            if (key.first == v) out.push_back({-(key.second + 1), p});
        return out;
    }
};

// ---------------------------------------------------------------- validation

inline std::vector<std::string> validate(const StableCurve& c) {
    std::vector<std::string> out = tree_violations(c.tree);
    if (!out.empty()) return out;
    const MarkedTree& t = c.tree;
    if (c.mark_pos.size() != t.mu.size()) out.push_back("coordinate table has wrong size");
    for (const Edge& e : t.edges)
        for (auto key : {std::pair{e[0], e[1]}, std::pair{e[1], e[0]}})
            if (!c.node_pos.count(key)) out.push_back("missing node coordinate");
    if (c.node_pos.size() != 2 * t.edges.size()) out.push_back("stray node coordinate");
    if (!out.empty()) return out;
    for (int v = 0; v < t.nv; ++v) {
        auto sp = c.special_points(v);
        for (std::size_t a = 0; a < sp.size(); ++a)
            for (std::size_t b = a + 1; b < sp.size(); ++b)
                if (sp[a].second == sp[b].second)
                    out.push_back("coincident special points on component " + std::to_string(v));
    }
    if (t.is_real()) {
        for (std::size_t m = 1; m < t.mu.size(); ++m)
            if (c.mark_pos[bar(int(m))] != c.mark_pos[m].conj())
                out.push_back("mark " + t.space.label(int(m)) + " breaks conjugation symmetry");
        for (auto& [key, p] : c.node_pos)
            if (c.node(t.phi[key.first], t.phi[key.second]) != p.conj())
                out.push_back("node breaks conjugation symmetry");
    }
    return out;
}

inline MarkedTree dual_graph(const StableCurve& c) { return c.tree; }

// ---------------------------------------------------------------- serialization

// Canonical text: canonical tree form followed by coordinates in canonical
// vertex order. Equal strings <=> identical marked curves up to relabeling
// of components.
inline std::string canonical_serialization(const StableCurve& c) {
    auto [enc, order] = detail::canonical_order(c.tree);
    std::vector<int> pos(c.tree.nv);
    for (int k = 0; k < c.tree.nv; ++k) pos[order[k]] = k;
    std::string s = canonical_form(c.tree);
    for (int k = 0; k < c.tree.nv; ++k) {
        int v = order[k];
        s += "|" + std::to_string(k) + ":";
        for (Mark m : mask_to_marks(c.tree.marks_at(v)))
            s += c.tree.space.label(m) + "=" + c.mark_pos[m].str() + ";";
        std::vector<std::pair<int, std::string>> nodes;
        for (auto& [key, p] : c.node_pos)
            if (key.first == v) nodes.push_back({pos[key.second], p.str()});
        std::sort(nodes.begin(), nodes.end());
        for (auto& [w, p] : nodes) s += "n" + std::to_string(w) + "=" + p + ";";
    }
    return s;
}

// ---------------------------------------------------------------- cross ratios

// Precomputed projections of every mark onto every component.
class CurveGeometry {
public:
    explicit CurveGeometry(const StableCurve& c) : c_(&c), paths_(c.tree) {
        int nv = c.tree.nv;
        int nm = int(c.tree.mu.size());
        proj_.assign(nv, std::vector<const ProjPoint*>(nm, nullptr));
        dir_.assign(nv, std::vector<int>(nm, 0));
        for (int v = 0; v < nv; ++v)
            for (int m = 1; m < nm; ++m) {
                if (c.tree.mu[m] < 0) continue;
                int d = paths_.dir(v, m);
                dir_[v][m] = d;
                proj_[v][m] = d < 0 ? &c.mark_pos[m] : &c.node(v, d);
            }
    }

    const StableCurve& curve() const { return *c_; }
    const TreePaths& paths() const { return paths_; }
    int dir(int v, Mark m) const { return dir_[v][m]; }
    const ProjPoint& projection(int v, Mark m) const { return *proj_[v][m]; }

    // Vertex where i, j, k reach through pairwise distinct directions.
    int pivot(Mark i, Mark j, Mark k) const {
        for (int v = 0; v < int(dir_.size()); ++v) {
            int a = dir_[v][i], b = dir_[v][j], d = dir_[v][k];
            if (a != b && a != d && b != d) return v;
        }
        throw InvalidArgument("no pivot: marks not distinct");
    }

    // Projections of q onto a component where at least three directions differ.
    std::array<const ProjPoint*, 4> projected(const std::array<Mark, 4>& q) const {
        int v = pivot(q[0], q[1], q[2]);
        return {proj_[v][q[0]], proj_[v][q[1]], proj_[v][q[2]], proj_[v][q[3]]};
    }

    ProjPoint cr(const std::array<Mark, 4>& q) const {
        check_distinct(q);
        auto z = projected(q);
        return cross_ratio(*z[0], *z[1], *z[2], *z[3]);
    }

private:
    const StableCurve* c_;
    TreePaths paths_;
    std::vector<std::vector<const ProjPoint*>> proj_;
    std::vector<std::vector<int>> dir_;

    static void check_distinct(const std::array<Mark, 4>& q) {
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (q[a] == q[b]) throw InvalidArgument("quadruple marks must be distinct");
    }
};

inline ProjPoint cross_ratio_q(const StableCurve& c, const std::array<Mark, 4>& q) {
    return CurveGeometry(c).cr(q);
}

// ---------------------------------------------------------------- divisors

// Some node splits the present marks as rho | rest.
inline bool in_divisor(const StableCurve& c, MarkMask rho) {
    MarkMask all = c.tree.present_marks();
    MarkMask rc = all & ~rho;
    for (auto e : oriented_edges(c.tree)) {
        MarkMask s = split_marks(c.tree, e.tail, e.head);
        if (s == rho || s == rc) return true;
    }
    return false;
}

enum class Bullet { Plus, Zero, Minus, Prime, DoublePrime };

inline const char* bullet_name(Bullet b) {
    switch (b) {
        case Bullet::Plus: return "+";
        case Bullet::Zero: return "0";
        case Bullet::Minus: return "-";
        case Bullet::Prime: return "'";
        default: return "''";
    }
}

// D~_rho^bullet for a real curve over [(l+1)^+-]. rho is a subset of [l^+-]
// (a label of A_l^R or [l^+-]-{i}); the kind decides the case table.
inline bool in_D_tilde(const StableCurve& ct, MarkMask rho, Bullet b) {
    if (!ct.space().real) throw InvalidArgument("D~ strata live on real curves");
    int l1 = ct.space().ell;
    int ell = l1 - 1;
    MarkSpace base{ell, true};
    MarkMask p = bit(plus(l1)), m = bit(minus(l1));
    auto D = [&](MarkMask s) { return in_divisor(ct, s); };
    if (b == Bullet::Prime) return D(rho | p) || D(rho | p | m);
    if (b == Bullet::DoublePrime) return D(rho) || D(rho | m);
    bool whole_minus_one = popcount(complement(base, rho)) == 1 && (rho & ~base.all()) == 0;
    if (whole_minus_one) {
        if (b == Bullet::Plus) return false;
        return D(rho | m);
    }
    StratumKind k = classify_real(ell, rho);
    switch (k) {
        case StratumKind::E:
        case StratumKind::D1:
            if (b == Bullet::Plus) return D(rho | p);
            if (b == Bullet::Zero) return D(rho);
            return D(rho | m);
        case StratumKind::H:
            if (b == Bullet::Plus) return D(rho | p | m);
            return D(rho);
        case StratumKind::D2:
        case StratumKind::D3:
            if (b == Bullet::Plus) return D(rho | p | m);
            return D(rho | m);
        default: throw InvalidArgument("rho is not a real stratum label");
    }
}

// ---------------------------------------------------------------- forgetting

namespace detail {

struct MutableCurve {
    MarkSpace space;
    std::vector<int> alive;
    std::vector<int> mu;
    std::vector<ProjPoint> mark_pos;
    std::map<std::pair<int, int>, ProjPoint> node_pos;
    std::vector<int> phi;

    std::vector<int> neighbours(int v) const {
        std::vector<int> out;
        for (auto& [key, p] : node_pos)
            if (key.first == v) out.push_back(key.second);
        return out;
    }
    std::vector<Mark> marks(int v) const {
        std::vector<Mark> out;
        for (std::size_t m = 1; m < mu.size(); ++m)
            if (mu[m] == v) out.push_back(int(m));
        return out;
    }
};

inline StableCurve compact(const MutableCurve& mc) {
    std::vector<int> id(mc.alive.size(), -1);
    int n = 0;
    for (std::size_t v = 0; v < mc.alive.size(); ++v)
        if (mc.alive[v]) id[v] = n++;
    StableCurve c;
    c.tree.space = mc.space;
    c.tree.nv = n;
    c.tree.mu.assign(mc.mu.size(), -1);
    c.mark_pos.assign(mc.mu.size(), ProjPoint());
    for (std::size_t m = 1; m < mc.mu.size(); ++m)
        if (mc.mu[m] >= 0) {
            c.tree.mu[m] = id[mc.mu[m]];
            c.mark_pos[m] = mc.mark_pos[m];
        }
    for (auto& [key, p] : mc.node_pos) {
        c.node_pos[{id[key.first], id[key.second]}] = p;
        if (key.first < key.second) c.tree.edges.push_back({id[key.first], id[key.second]});
    }
    c.tree.normalize_edges();
    if (!mc.phi.empty()) {
        c.tree.phi.assign(n, -1);
        for (std::size_t v = 0; v < mc.alive.size(); ++v)
            if (mc.alive[v]) c.tree.phi[id[v]] = id[mc.phi[v]];
    }
    return c;
}

}  // namespace detail

// Drop the marks outside `keep` and contract unstable components, lowest index first.
// The result lives on the same mark space with the forgotten marks absent.
inline StableCurve forget(const StableCurve& c, MarkMask keep) {
    const MarkMask present = c.tree.present_marks();
    keep &= present;
    if (c.is_real()) {
        if (bar_mask(keep) != keep) throw InvalidArgument("real forget needs a conjugation-closed set");
        if (popcount(keep) < 4) throw InvalidArgument("keep too small: need two conjugate pairs");
    } else if (popcount(keep) < 3) {
        throw InvalidArgument("keep too small: need three marks");
    }
    detail::MutableCurve mc;
    mc.space = c.tree.space;
    mc.alive.assign(c.tree.nv, 1);
    mc.mu = c.tree.mu;
    mc.mark_pos = c.mark_pos;
    mc.node_pos = c.node_pos;
    mc.phi = c.tree.phi;
    for (std::size_t m = 1; m < mc.mu.size(); ++m)
        if (!(keep >> m & 1)) mc.mu[m] = -1;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < mc.alive.size() && !changed; ++v) {
            if (!mc.alive[v]) continue;
            auto nb = mc.neighbours(int(v));
            auto mk = mc.marks(int(v));
            if (nb.size() + mk.size() >= 3) continue;
            if (nb.empty()) throw InvalidArgument("keep too small: curve collapses");
            int w = nb[0];
            if (nb.size() == 2) {
                int w2 = nb[1];
                ProjPoint a = mc.node_pos.at({w, int(v)}), b = mc.node_pos.at({w2, int(v)});
                mc.node_pos.erase({w, int(v)});
                mc.node_pos.erase({w2, int(v)});
                mc.node_pos.erase({int(v), w});
                mc.node_pos.erase({int(v), w2});
                mc.node_pos[{w, w2}] = a;
                mc.node_pos[{w2, w}] = b;
            } else {
                ProjPoint a = mc.node_pos.at({w, int(v)});
                mc.node_pos.erase({w, int(v)});
                mc.node_pos.erase({int(v), w});
                if (mk.size() == 1) {
                    mc.mu[mk[0]] = w;
                    mc.mark_pos[mk[0]] = a;
                }
            }
            mc.alive[v] = 0;
            changed = true;
        }
    }
    StableCurve out = detail::compact(mc);
    // shrink the label space when the kept marks form an initial segment
    int top = 0;
    for (Mark m : mask_to_marks(keep)) top = std::max(top, m);
    int ell = c.is_real() ? pair_index(top) : top;
    MarkSpace sp{ell, c.is_real()};
    if (sp.all() == keep) {
        out.tree.space = sp;
        out.tree.mu.resize(sp.count() + 1);
        out.mark_pos.resize(sp.count() + 1);
    }
    return out;
}

// ---------------------------------------------------------------- conjugation

// Psi: conjugate all coordinates and swap i+ <-> i-.
inline StableCurve conjugate_curve(const StableCurve& c) {
    if (!c.space().real) throw InvalidArgument("conjugation needs a curve over [l^+-]");
    StableCurve r = c;
    for (std::size_t m = 1; m < c.tree.mu.size(); ++m) {
        r.tree.mu[m] = c.tree.mu[bar(int(m))];
        r.mark_pos[m] = c.mark_pos[bar(int(m))].conj();
    }
    for (auto& [key, p] : r.node_pos) p = p.conj();
    return r;
}

// ---------------------------------------------------------------- sampling

namespace detail {

inline bool all_distinct(const std::vector<ProjPoint>& pts) {
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            if (pts[a] == pts[b]) return false;
    return true;
}

}  // namespace detail

// Exact coordinates with |num|, den <= bound, rejection-resampled until every
// component has distinct special points. Real trees are sampled symmetrically.
inline StableCurve sample_curve(const MarkedTree& t, long long bound, Rng& rng) {
    if (bound < 1) throw InvalidArgument("coefficient bound must be >= 1");
    StableCurve c;
    c.tree = t;
    c.mark_pos.assign(t.mu.size(), ProjPoint());
    auto adj = t.adjacency();
    const int max_tries = 2000;
    for (int v = 0; v < t.nv; ++v) {
        bool real = t.is_real();
        if (real && t.phi[v] < v) continue;  // filled from its partner
        std::vector<Mark> mk = mask_to_marks(t.marks_at(v));
        std::vector<int> nb = adj[v];
        bool fixed = real && t.phi[v] == v;
        int tries = 0;
        for (;; ++tries) {
            if (tries == max_tries) throw InvalidArgument("bound too small for distinct points");
            std::vector<ProjPoint> pts;
            std::map<Mark, ProjPoint> mp;
            std::map<int, ProjPoint> np;
            if (!fixed) {
                for (Mark m : mk) mp[m] = random_point(rng, bound, 8);
                for (int w : nb) np[w] = random_point(rng, bound, 8);
            } else {
                // pairs (m, bar m) and (w, phi w) are conjugate; phi-fixed nodes are real
                for (Mark m : mk)
                    if (is_plus(m)) {
                        ProjPoint z = random_point(rng, bound, 0);
                        mp[m] = z;
                        mp[bar(m)] = z.conj();
                    }
                for (int w : nb) {
                    if (np.count(w)) continue;
                    if (t.phi[w] == w) {
                        np[w] = random_point(rng, bound, 8, true);
                    } else {
                        ProjPoint z = random_point(rng, bound, 0);
                        np[w] = z;
                        np[t.phi[w]] = z.conj();
                    }
                }
            }
            for (auto& [m, z] : mp) pts.push_back(z);
            for (auto& [w, z] : np) pts.push_back(z);
            if (!detail::all_distinct(pts)) continue;
            for (auto& [m, z] : mp) c.mark_pos[m] = z;
            for (auto& [w, z] : np) c.node_pos[{v, w}] = z;
            if (real && !fixed) {
                int u = t.phi[v];
                for (auto& [m, z] : mp) c.mark_pos[bar(m)] = z.conj();
                for (auto& [w, z] : np) c.node_pos[{u, t.phi[w]}] = z.conj();
            }
            break;
        }
    }
    return c;
}

inline StableCurve sample_curve(const MarkedTree& t, long long bound, std::uint64_t seed) {
    Rng rng(seed);
    return sample_curve(t, bound, rng);
}

}  // namespace dmlab
