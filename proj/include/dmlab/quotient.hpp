#pragma once
// The relations ~rho on curves with one extra mark (or conjugate pair), class
// keys from extended chart tuples, and the injectivity oracle.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmlab/charts.hpp"
#include "dmlab/curves.hpp"
#include "dmlab/sampling.hpp"
#include "dmlab/strata.hpp"

namespace dmlab {

// l+1, or (l+1)^+ over a real base space.
inline Mark new_mark(const MarkSpace& base) { return base.real ? plus(base.ell + 1) : base.ell + 1; }

inline MarkSpace base_space(const MarkSpace& lifted) { return {lifted.ell - 1, lifted.real}; }

inline StableCurve base_of(const StableCurve& ct) { return forget(ct, base_space(ct.space()).all()); }

// ---------------------------------------------------------------- insertion

namespace detail {

inline StableCurve lifted(const StableCurve& b) {
    if (b.tree.present_marks() != b.space().all()) throw InvalidArgument("base must carry every mark");
    StableCurve c = b;
    MarkSpace sp{b.space().ell + 1, b.space().real};
    c.tree.space = sp;
    c.tree.mu.resize(sp.count() + 1, -1);
    c.mark_pos.resize(sp.count() + 1);
    return c;
}

inline int add_vertex(StableCurve& c) {
    if (c.is_real()) c.tree.phi.push_back(-1);
    return c.tree.nv++;
}

inline void add_edge(StableCurve& c, int v, int w, const ProjPoint& on_v, const ProjPoint& on_w) {
    c.tree.edges.push_back({std::min(v, w), std::max(v, w)});
    c.node_pos[{v, w}] = on_v;
    c.node_pos[{w, v}] = on_w;
}

inline void remove_edge(StableCurve& c, int v, int w) {
    Edge e{std::min(v, w), std::max(v, w)};
    c.tree.edges.erase(std::remove(c.tree.edges.begin(), c.tree.edges.end(), e), c.tree.edges.end());
    c.node_pos.erase({v, w});
    c.node_pos.erase({w, v});
}

inline void place(StableCurve& c, Mark m, int v, const ProjPoint& z) {
    c.tree.mu[m] = v;
    c.mark_pos[m] = z;
}

inline bool is_special(const StableCurve& c, int v, const ProjPoint& z) {
    for (auto& [key, p] : c.special_points(v))
        if (p == z) return true;
    return false;
}

inline StableCurve finish(StableCurve c) {
    c.tree.normalize_edges();
    auto bad = validate(c);
    if (!bad.empty()) throw InvalidArgument("insertion produced an invalid curve: " + bad.front());
    return c;
}

// Bubble u off component v at old position p, carrying mark m at 0 and mark n at 1.
inline void bubble_marks(StableCurve& c, int u, int v, const ProjPoint& p, Mark m, Mark n) {
    add_edge(c, v, u, p, ProjPoint::inf());
    place(c, m, u, ProjPoint(0));
    place(c, n, u, ProjPoint(1));
}

}  // namespace detail

// The new mark at z on component v. Real: the conjugate mark at conj z on phi(v);
// on a phi-fixed component z must be non-real.
inline StableCurve insert_free(const StableCurve& b, int v, const ProjPoint& z) {
    if (v < 0 || v >= b.tree.nv) throw InvalidArgument("no such component");
    if (detail::is_special(b, v, z)) throw InvalidArgument("position is a special point");
    StableCurve c = detail::lifted(b);
    Mark n = new_mark(b.space());
    detail::place(c, n, v, z);
    if (b.is_real()) {
        if (b.tree.phi[v] == v && z == z.conj())
            throw InvalidArgument("real point of a fixed component: use insert_real_point");
        detail::place(c, bar(n), b.tree.phi[v], z.conj());
    }
    return detail::finish(std::move(c));
}

// The new mark collides with mark m: a bubble with m at 0, the new mark at 1, node at inf.
// Real: `which` (plus or minus of the new pair) joins m and its conjugate joins bar(m).
inline StableCurve insert_at_mark(const StableCurve& b, Mark m, bool with_plus = true) {
    StableCurve c = detail::lifted(b);
    Mark n = new_mark(b.space());
    if (b.is_real() && !with_plus) n = bar(n);
    int v = b.tree.mu.at(m);
    if (v < 0) throw InvalidArgument("mark absent");
    int u = detail::add_vertex(c);
    detail::bubble_marks(c, u, v, b.mark_pos[m], m, n);
    if (b.is_real()) {
        int ub = detail::add_vertex(c);
        c.tree.phi[u] = ub;
        c.tree.phi[ub] = u;
        detail::bubble_marks(c, ub, b.tree.mu[bar(m)], b.mark_pos[bar(m)], bar(m), bar(n));
    }
    return detail::finish(std::move(c));
}

// The new mark at the node {v, w}: a bubble u with node to v at 0, to w at inf,
// new mark at 1. Real, phi-invariant edge: one fixed bubble carrying the pair at
// z and conj z (nodes at 0, inf if v, w are fixed; at i, -i if phi swaps them).
inline StableCurve insert_at_node(const StableCurve& b, int v, int w,
                                  const ProjPoint& z = ProjPoint(GaussRat(Rational(1), Rational(2)))) {
    if (!b.tree.has_edge(v, w)) throw InvalidArgument("no edge between these components");
    StableCurve c = detail::lifted(b);
    Mark n = new_mark(b.space());
    ProjPoint pv = b.node(v, w), pw = b.node(w, v);
    detail::remove_edge(c, v, w);
    int u = detail::add_vertex(c);
    if (!b.is_real()) {
        detail::add_edge(c, v, u, pv, ProjPoint(0));
        detail::add_edge(c, w, u, pw, ProjPoint::inf());
        detail::place(c, n, u, ProjPoint(1));
        return detail::finish(std::move(c));
    }
    const auto& phi = b.tree.phi;
    bool invariant = (phi[v] == v && phi[w] == w) || (phi[v] == w && phi[w] == v);
    if (invariant) {
        if (z == z.conj()) throw InvalidArgument("the pair needs a non-real position");
        c.tree.phi[u] = u;
        ProjPoint a = ProjPoint(0), bb = ProjPoint::inf();
        if (phi[v] == w) {
            a = ProjPoint(GaussRat::i());
            bb = a.conj();
        }
        if (z == a || z == bb) throw InvalidArgument("position is a special point");
        detail::add_edge(c, v, u, pv, a);
        detail::add_edge(c, w, u, pw, bb);
        detail::place(c, n, u, z);
        detail::place(c, bar(n), u, z.conj());
        return detail::finish(std::move(c));
    }
    int vb = phi[v], wb = phi[w];
    ProjPoint pvb = b.node(vb, wb), pwb = b.node(wb, vb);
    detail::remove_edge(c, vb, wb);
    int ub = detail::add_vertex(c);
    c.tree.phi[u] = ub;
    c.tree.phi[ub] = u;
    detail::add_edge(c, v, u, pv, ProjPoint(0));
    detail::add_edge(c, w, u, pw, ProjPoint::inf());
    detail::place(c, n, u, ProjPoint(1));
    detail::add_edge(c, vb, ub, pvb, ProjPoint(0));
    detail::add_edge(c, wb, ub, pwb, ProjPoint::inf());
    detail::place(c, bar(n), ub, ProjPoint(1));
    return detail::finish(std::move(c));
}

// Real base, edge {v, w} with phi(v) = w: the pair splits at the node into a chain
// v - B - C - w with phi(B) = C, the plus mark on B when plus_near_v.
inline StableCurve insert_node_chain(const StableCurve& b, int v, int w, bool plus_near_v) {
    if (!b.is_real() || b.tree.phi[v] != w) throw InvalidArgument("chain insertion needs an edge swapped by phi");
    if (!b.tree.has_edge(v, w)) throw InvalidArgument("no edge between these components");
    StableCurve c = detail::lifted(b);
    Mark n = new_mark(b.space());
    if (!plus_near_v) n = bar(n);
    ProjPoint pv = b.node(v, w), pw = b.node(w, v);
    detail::remove_edge(c, v, w);
    int bv = detail::add_vertex(c), cw = detail::add_vertex(c);
    c.tree.phi[bv] = cw;
    c.tree.phi[cw] = bv;
    detail::add_edge(c, v, bv, pv, ProjPoint(0));
    detail::add_edge(c, w, cw, pw, ProjPoint(0));
    detail::add_edge(c, bv, cw, ProjPoint::inf(), ProjPoint::inf());
    detail::place(c, n, bv, ProjPoint(1));
    detail::place(c, bar(n), cw, ProjPoint(1));
    return detail::finish(std::move(c));
}

// Real base, phi-fixed component v, real non-special x: the pair meets at x and
// bubbles off a fixed component with the node at inf and the pair at i, -i.
inline StableCurve insert_real_point(const StableCurve& b, int v, const ProjPoint& x) {
    if (!b.is_real()) throw InvalidArgument("real points need a real base");
    if (b.tree.phi[v] != v) throw InvalidArgument("component is not fixed by the involution");
    if (x != x.conj()) throw InvalidArgument("position is not real");
    if (detail::is_special(b, v, x)) throw InvalidArgument("position is a special point");
    StableCurve c = detail::lifted(b);
    Mark n = new_mark(b.space());
    int u = detail::add_vertex(c);
    c.tree.phi[u] = u;
    detail::add_edge(c, v, u, x, ProjPoint::inf());
    detail::place(c, n, u, ProjPoint(GaussRat::i()));
    detail::place(c, bar(n), u, ProjPoint(-GaussRat::i()));
    return detail::finish(std::move(c));
}

// ---------------------------------------------------------------- relations

// D_{l+1;rho} (complex) or D~''_rho = D_{l+1;rho} u D_{l+1;rho u {(l+1)^-}} (real).
inline bool in_relation_locus(const StableCurve& ct, MarkMask rho) {
    if (ct.space().real) return in_D_tilde(ct, rho, Bullet::DoublePrime);
    return in_divisor(ct, rho);
}

inline void check_real_flag(const StableCurve& c, bool real) {
    if (c.space().real != real) throw InvalidArgument("real flag disagrees with the curve");
}

inline bool equivalent(const StableCurve& c1, const StableCurve& c2, MarkMask rho, bool real) {
    check_real_flag(c1, real);
    check_real_flag(c2, real);
    if (canonical_serialization(c1) == canonical_serialization(c2)) return true;
    if (canonical_serialization(base_of(c1)) != canonical_serialization(base_of(c2))) return false;
    return in_relation_locus(c1, rho) && in_relation_locus(c2, rho);
}

// The labels rho > rho*, rho* given by its schedule rank (0 is the bottom).
inline std::vector<MarkMask> relation_labels(int ell, bool real, int rank_star) {
    std::vector<MarkMask> out;
    for (auto& s : schedule(ell, real).above(rank_star)) out.push_back(s.rho);
    return out;
}

// Class index per sample (classes numbered by first occurrence).
using Partition = std::vector<int>;

inline Partition relation_closure(const std::vector<StableCurve>& samples, int rank_star, bool real) {
    int n = int(samples.size());
    Partition out(n);
    if (n == 0) return out;
    for (auto& c : samples) check_real_flag(c, real);
    int ell = samples[0].space().ell - 1;
    auto labels = relation_labels(ell, real, rank_star);

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

    // identical curves, then shared locus over a shared base
    std::map<std::string, int> same;
    std::map<std::pair<std::string, MarkMask>, int> locus;
    for (int k = 0; k < n; ++k) {
        auto [it, fresh] = same.emplace(canonical_serialization(samples[k]), k);
        if (!fresh) unite(k, it->second);
        std::string base = canonical_serialization(base_of(samples[k]));
        for (MarkMask rho : labels) {
            if (!in_relation_locus(samples[k], rho)) continue;
            auto [jt, first] = locus.emplace(std::pair{base, rho}, k);
            if (!first) unite(k, jt->second);
        }
    }
    std::map<int, int> id;
    for (int k = 0; k < n; ++k) {
        int r = find(k);
        auto it = id.emplace(r, int(id.size())).first;
        out[k] = it->second;
    }
    return out;
}

// ---------------------------------------------------------------- keys

struct ClassKey {
    std::string base;                              // canonical serialization of the base curve
    std::vector<std::pair<Quad, ProjPoint>> chart;  // sorted by quadruple

    std::string str() const {
        std::string s = base + "#";
        for (auto& [q, x] : chart)
            s += std::to_string(q[0]) + "," + std::to_string(q[1]) + "," + std::to_string(q[2]) + "," +
                 std::to_string(q[3]) + "=" + x.str() + ";";
        return s;
    }
    friend bool operator==(const ClassKey& a, const ClassKey& b) {
        return a.base == b.base && a.chart == b.chart;
    }
};

// Keys on the chart domain attached to the base tree t, rho* and v+ in V_t(rho*).
class ChartKeyer {
public:
    ChartKeyer(const MarkedTree& t, int rank_star, int v_plus)
        : tree_(t), form_(canonical_form(t)), rank_star_(rank_star), v_plus_(v_plus) {
        auto sched = schedule(t.space.ell, t.space.real);
        basis_ = extended_basis(t, systematic_marking(t), v_plus, sched, rank_star);
        auto kept = a_gamma(t, sched, rank_star);
        for (auto e : oriented_edges(t)) {
            auto side = side_vertices(t, e.tail, e.head);
            if (!std::count(side.begin(), side.end(), v_plus)) continue;
            MarkMask rho = split_marks(t, e.tail, e.head);
            if (!std::count(kept.begin(), kept.end(), rho) && !std::count(excluded_.begin(), excluded_.end(), rho))
                excluded_.push_back(rho);
        }
        std::sort(excluded_.begin(), excluded_.end(), order_less);
    }

    const ChartBasis& basis() const { return basis_; }
    const std::vector<MarkMask>& excluded() const { return excluded_; }
    int v_plus() const { return v_plus_; }

    // Empty when the curve lies in the chart domain, else the offending locus.
    std::string domain_violation(const StableCurve& ct) const {
        StableCurve base = base_of(ct);
        if (canonical_form(base.tree) != form_) return "base tree differs from the chart tree";
        const MarkSpace& sp = tree_.space;
        for (MarkMask rho : excluded_)
            if (in_relation_locus(ct, rho))
                return std::string(sp.real ? "Y''" : "Y0") + " locus for rho = " + sp.label_set(rho);
        return {};
    }

    ClassKey key(const StableCurve& ct) const {
        if (ct.space().real != tree_.space.real || ct.space().ell != tree_.space.ell + 1)
            throw InvalidArgument("curve does not live over the chart's mark space");
        std::string bad = domain_violation(ct);
        if (!bad.empty()) throw ChartDomainError("outside the chart domain: " + bad);
        ClassKey k;
        k.base = canonical_serialization(base_of(ct));
        CurveGeometry g(ct);
        for (const Quad& q : basis_.all_quads()) k.chart.push_back({q, g.cr(q)});
        for (const Quad& q : basis_.extension) k.chart.push_back({q, g.cr(q)});
        std::sort(k.chart.begin(), k.chart.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return k;
    }

private:
    MarkedTree tree_;
    std::string form_;
    int rank_star_;
    int v_plus_;
    ChartBasis basis_;
    std::vector<MarkMask> excluded_;
};

// v_plus indexes a component of base_of(ct).
inline ClassKey class_key(const StableCurve& ct, int rank_star, int v_plus, bool real) {
    check_real_flag(ct, real);
    return ChartKeyer(base_of(ct).tree, rank_star, v_plus).key(ct);
}

// ---------------------------------------------------------------- Y membership

// Representative-level membership. Complex: + is D_{l+1;rho u {l+1}}, 0 is D_{l+1;rho}.
inline bool y_membership(const StableCurve& ct, MarkMask rho, Bullet b) {
    if (ct.space().real) return in_D_tilde(ct, rho, b);
    MarkMask n = bit(ct.space().ell);
    switch (b) {
        case Bullet::Plus: return in_divisor(ct, rho | n);
        case Bullet::Zero: return in_divisor(ct, rho);
        default: throw InvalidArgument("complex Y strata carry only + and 0");
    }
}

// ---------------------------------------------------------------- fibers

struct FiberSample {
    StableCurve curve;
    std::string how;
};

namespace detail {

inline ProjPoint fresh_point(const StableCurve& b, int v, Rng& rng, long long bound, bool real_only,
                             bool nonreal) {
    for (int tries = 0; tries < 4000; ++tries) {
        ProjPoint z = random_point(rng, bound, 0, real_only);
        if (nonreal && z == z.conj()) continue;
        if (!is_special(b, v, z)) return z;
    }
    throw InvalidArgument("bound too small for a fresh point");
}

}  // namespace detail

// Every placement type of the new mark over one base: free points on each
// component (one repeated), every mark, every node, and real points of fixed components.
inline std::vector<FiberSample> engineered_fiber(const StableCurve& b, Rng& rng, long long bound = 6,
                                                 int free_per_component = 2) {
    std::vector<FiberSample> out;
    const MarkedTree& t = b.tree;
    bool real = b.is_real();
    for (int v = 0; v < t.nv; ++v) {
        for (int k = 0; k < free_per_component; ++k) {
            bool fixed = real && t.phi[v] == v;
            ProjPoint z = detail::fresh_point(b, v, rng, bound, false, fixed);
            out.push_back({insert_free(b, v, z), "free@" + std::to_string(v)});
            if (k == 0) out.push_back({insert_free(b, v, z), "free@" + std::to_string(v) + " again"});
            if (fixed) {
                ProjPoint x = detail::fresh_point(b, v, rng, bound, true, false);
                out.push_back({insert_real_point(b, v, x), "real@" + std::to_string(v)});
            }
        }
    }
    for (Mark m : t.space.marks()) {
        out.push_back({insert_at_mark(b, m, true), "mark " + t.space.label(m)});
    }
    for (const Edge& e : t.edges) {
        std::string tag = "node " + std::to_string(e[0]) + "-" + std::to_string(e[1]);
        if (!real) {
            out.push_back({insert_at_node(b, e[0], e[1]), tag});
            continue;
        }
        const auto& phi = t.phi;
        bool invariant = (phi[e[0]] == e[0] && phi[e[1]] == e[1]) || (phi[e[0]] == e[1]);
        if (!invariant) {
            out.push_back({insert_at_node(b, e[0], e[1]), tag});
            continue;
        }
        if (phi[e[0]] == e[1]) {
            out.push_back({insert_node_chain(b, e[0], e[1], true), tag + " chain"});
            out.push_back({insert_node_chain(b, e[0], e[1], false), tag + " chain"});
        }
        for (ProjPoint z : {ProjPoint(GaussRat(Rational(1), Rational(2))), ProjPoint(GaussRat(Rational(1), Rational(3)))})
            out.push_back({insert_at_node(b, e[0], e[1], z), tag});
    }
    return out;
}

// ---------------------------------------------------------------- injectivity

struct InjectivityReport {
    int samples = 0;
    int excluded = 0;
    int classes = 0;
    int key_collisions_across_classes = 0;
    int intra_class_key_splits = 0;
    std::vector<std::string> counterexamples;

    bool ok() const { return key_collisions_across_classes == 0 && intra_class_key_splits == 0; }
    void merge(const InjectivityReport& o) {
        samples += o.samples;
        excluded += o.excluded;
        classes += o.classes;
        key_collisions_across_classes += o.key_collisions_across_classes;
        intra_class_key_splits += o.intra_class_key_splits;
        for (auto& s : o.counterexamples)
            if (counterexamples.size() < 20) counterexamples.push_back(s);
    }
};

// Compares keys against the closure partition on the in-domain samples.
inline InjectivityReport compare_keys(const std::vector<StableCurve>& samples, int rank_star,
                                      const ChartKeyer& keyer) {
    InjectivityReport r;
    std::vector<StableCurve> kept;
    std::vector<std::string> keys;
    for (auto& c : samples) {
        ++r.samples;
        try {
            keys.push_back(keyer.key(c).str());
            kept.push_back(c);
        } catch (const ChartDomainError&) {
            ++r.excluded;
        }
    }
    if (kept.empty()) return r;
    Partition p = relation_closure(kept, rank_star, kept[0].space().real);
    std::map<std::string, std::set<int>> by_key;
    std::map<int, std::set<std::string>> by_class;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        by_key[keys[k]].insert(p[k]);
        by_class[p[k]].insert(keys[k]);
    }
    r.classes = int(by_class.size());
    for (auto& [key, cls] : by_key)
        if (cls.size() > 1) {
            r.key_collisions_across_classes += int(cls.size()) - 1;
            if (r.counterexamples.size() < 20) r.counterexamples.push_back("collision: " + key);
        }
    for (auto& [cls, ks] : by_class)
        if (ks.size() > 1) {
            r.intra_class_key_splits += int(ks.size()) - 1;
            if (r.counterexamples.size() < 20) r.counterexamples.push_back("split: " + *ks.begin());
        }
    return r;
}

// Engineered fibers over `bases` sampled bases of tree t plus n_random free placements.
inline InjectivityReport verify_injectivity(const MarkedTree& t, int rank_star, int v_plus, int n_random,
                                            std::uint64_t seed, bool real, int bases = 2,
                                            long long bound = 6) {
    if (t.space.real != real) throw InvalidArgument("real flag disagrees with the tree");
    ChartKeyer keyer(t, rank_star, v_plus);
    Rng rng(seed);
    InjectivityReport total;
    for (int k = 0; k < bases; ++k) {
        StableCurve b = sample_curve(t, bound, rng);
        std::vector<StableCurve> samples;
        for (auto& s : engineered_fiber(b, rng, bound)) samples.push_back(std::move(s.curve));
        int share = n_random / bases + (k < n_random % bases ? 1 : 0);
        std::uniform_int_distribution<int> pick(0, t.nv - 1);
        for (int j = 0; j < share; ++j) {
            int v = pick(rng);
            bool fixed = real && t.phi[v] == v;
            samples.push_back(insert_free(b, v, detail::fresh_point(b, v, rng, bound, false, fixed)));
        }
        total.merge(compare_keys(samples, rank_star, keyer));
    }
    return total;
}

}  // namespace dmlab
