#pragma once
// Gamma-bases of cross ratios and reconstruction of every cross ratio from a basis.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmlab/curves.hpp"
#include "dmlab/errors.hpp"
#include "dmlab/exactfield.hpp"
#include "dmlab/strata.hpp"
#include "dmlab/trees.hpp"

namespace dmlab {

using Quad = std::array<Mark, 4>;

inline MarkMask quad_mask(const Quad& q) { return bit(q[0]) | bit(q[1]) | bit(q[2]) | bit(q[3]); }

inline Quad bar_quad(const Quad& q) { return {bar(q[0]), bar(q[1]), bar(q[2]), bar(q[3])}; }

inline std::string quad_str(const MarkSpace& sp, const Quad& q) {
    std::string s = "(";
    for (int a = 0; a < 4; ++a) s += (a ? "," : "") + sp.label(q[a]);
    return s + ")";
}

// ---------------------------------------------------------------- symmetries

namespace detail {

// Adjacent swaps turning q into its sorted order.
inline std::vector<int> sorting_swaps(Quad q) {
    std::vector<int> sw;
    for (int pass = 0; pass < 3; ++pass)
        for (int p = 0; p + 1 < 4 - pass; ++p)
            if (q[p] > q[p + 1]) { std::swap(q[p], q[p + 1]); sw.push_back(p); }
    return sw;
}

// Swapping positions (0,1) or (2,3) inverts the cross ratio; (1,2) sends x to 1-x.
inline ProjPoint swap_action(int p, const ProjPoint& x) { return p == 1 ? x.one_minus() : x.inverse(); }

}  // namespace detail

// CR_q from the value on the sorted quadruple.
inline ProjPoint from_sorted(const Quad& q, const ProjPoint& sorted_value) {
    auto sw = detail::sorting_swaps(q);
    ProjPoint x = sorted_value;
    for (auto it = sw.rbegin(); it != sw.rend(); ++it) x = detail::swap_action(*it, x);
    return x;
}

// Value on the sorted quadruple from CR_q.
inline ProjPoint to_sorted(const Quad& q, const ProjPoint& value) {
    ProjPoint x = value;
    for (int p : detail::sorting_swaps(q)) x = detail::swap_action(p, x);
    return x;
}

// ---------------------------------------------------------------- marking maps

struct MarkingMap {
    std::map<OrientedEdge, Mark> eta;

    Mark at(int tail, int head) const {
        auto it = eta.find({tail, head});
        if (it == eta.end()) throw InvalidArgument("marking map undefined on edge");
        return it->second;
    }
    friend bool operator==(const MarkingMap&, const MarkingMap&) = default;
};

// eta(e) = min mu^{-1}(Ver_e^c)
inline MarkingMap systematic_marking(const MarkedTree& t) {
    MarkingMap m;
    for (auto e : oriented_edges(t)) {
        MarkMask far = split_marks(t, e.head, e.tail);
        if (far == 0) throw InvalidArgument("edge side without marks");
        m.eta[e] = std::countr_zero(far);
    }
    return m;
}

// [Gamma]_{eta;v}, sorted.
inline std::vector<Mark> gamma_set(const MarkedTree& t, const MarkingMap& eta, int v) {
    MarkMask s = t.marks_at(v);
    auto adj = t.adjacency();
    for (int w : adj[v]) s |= bit(eta.at(v, w));
    return mask_to_marks(s);
}

inline std::vector<std::string> marking_violations(const MarkedTree& t, const MarkingMap& eta,
                                                   bool require_systematic = true) {
    std::vector<std::string> out;
    auto oe = oriented_edges(t);
    if (eta.eta.size() != oe.size()) out.push_back("marking map domain is not the oriented edges");
    for (auto e : oe) {
        auto it = eta.eta.find(e);
        if (it == eta.eta.end()) continue;
        Mark m = it->second;
        MarkMask far = split_marks(t, e.head, e.tail);
        if (m < 1 || m >= int(t.mu.size()) || !(far & bit(m)))
            out.push_back("eta(" + std::to_string(e.tail) + "->" + std::to_string(e.head) +
                          ") is not on the far side");
    }
    if (!out.empty() || !require_systematic) return out;
    for (auto e : oe) {
        auto g = gamma_set(t, eta, e.head);
        if (!std::binary_search(g.begin(), g.end(), eta.at(e.tail, e.head)))
            out.push_back("eta(" + std::to_string(e.tail) + "->" + std::to_string(e.head) +
                          ") not in [Gamma]_head");
    }
    return out;
}

inline bool is_systematic(const MarkedTree& t, const MarkingMap& eta) {
    return marking_violations(t, eta, true).empty();
}

// Recovers eta from the sets [Gamma]_{eta;v}: eta(vw) is the element of [Gamma]_v beyond w.
inline MarkingMap marking_from_sets(const MarkedTree& t, const std::vector<std::vector<Mark>>& sets) {
    if (int(sets.size()) != t.nv) throw InvalidArgument("one set per vertex required");
    TreePaths p(t);
    MarkingMap m;
    for (int v = 0; v < t.nv; ++v) {
        for (int w : p.adj[v]) {
            std::optional<Mark> pick;
            for (Mark x : sets[v]) {
                if (x < 1 || x >= int(t.mu.size()) || t.mu[x] < 0)
                    throw InvalidArgument("set element is not a mark");
                if (p.dir(v, x) == w) {
                    if (pick) throw InvalidArgument("two elements in one direction");
                    pick = x;
                }
            }
            if (!pick) throw InvalidArgument("no element in some direction");
            m.eta[{v, w}] = *pick;
        }
        MarkMask own = t.marks_at(v), given = marks_to_mask(sets[v]);
        if ((own & ~given) || int(sets[v].size()) != t.valence(v))
            throw InvalidArgument("set at vertex " + std::to_string(v) + " is not mu^-1(v) plus one mark per edge");
    }
    return m;
}

// ---------------------------------------------------------------- bases

struct EdgeQuad {
    OrientedEdge e;  // v -> v', v the child in the spanning order
    Quad q;          // (eta(v'v), eta(vv'), k_e, m_e)
};

// One step of the reconstruction: target = product of factors (a factor (i,j,k,k) is 1),
// or a basis value when basis >= 0.
struct PlanStep {
    Quad target;
    int basis = -1;
    std::vector<Quad> factors;
    int edge = -1;  // index into edge_quads, -1 for a vertex seed
};

struct ChartBasis {
    MarkedTree tree;
    MarkingMap eta;
    int root = 0;
    std::vector<int> order;   // spanning order
    std::vector<int> parent;  // -1 at the root
    std::vector<std::vector<Mark>> gamma;
    std::vector<std::vector<Quad>> vertex_quads;
    std::vector<EdgeQuad> edge_quads;
    int v_plus = -1;
    std::vector<Quad> extension;  // q~ and, for real trees, its conjugate
    std::vector<PlanStep> plan;

    // Q_Gamma: vertex quadruples in spanning order, then edge quadruples.
    std::vector<Quad> quads() const {
        std::vector<Quad> out;
        for (int v : order)
            for (auto& q : vertex_quads[v]) out.push_back(q);
        for (auto& e : edge_quads) out.push_back(e.q);
        return out;
    }
    std::vector<Quad> all_quads() const {
        auto out = quads();
        out.insert(out.end(), extension.begin(), extension.end());
        return out;
    }
    int size() const { return int(quads().size()); }
};

namespace detail {

// True when some edge separates {a,b} from {c,d}.
inline bool split_realized(const TreePaths& p, Mark a, Mark b, Mark c, Mark d) {
    int va = p.mu[a], vb = p.mu[b], vc = p.mu[c], vd = p.mu[d];
    auto on_path = [&](int x, int y) {
        std::vector<int> vs{x};
        while (x != y) { x = p.toward[x][y]; vs.push_back(x); }
        return vs;
    };
    auto p1 = on_path(va, vb), p2 = on_path(vc, vd);
    for (int x : p1)
        if (std::find(p2.begin(), p2.end(), x) != p2.end()) return false;
    return true;
}

inline void add_subsets(const std::vector<Mark>& pool, std::vector<MarkMask>& out) {
    int n = int(pool.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int d = c + 1; d < n; ++d)
                    out.push_back(bit(pool[a]) | bit(pool[b]) | bit(pool[c]) | bit(pool[d]));
}

// Intra-vertex relations, given the basis quadruples (i1,i2,i3,ir).
inline void seed_vertex(const std::vector<Mark>& g, int first_basis, int edge,
                        std::vector<PlanStep>& plan) {
    if (g.size() < 4) return;
    Mark i1 = g[0], i2 = g[1], i3 = g[2];
    for (std::size_t r = 3; r < g.size(); ++r)
        plan.push_back({{i1, i2, i3, g[r]}, first_basis + int(r) - 3, {}, edge});
    std::vector<MarkMask> sets;
    add_subsets(g, sets);
    auto rest_of = [](MarkMask s, std::initializer_list<Mark> drop) {
        for (Mark m : drop) s &= ~bit(m);
        return mask_to_marks(s);
    };
    std::vector<std::pair<int, PlanStep>> steps;
    for (MarkMask s : sets) {
        bool h1 = s & bit(i1), h2 = s & bit(i2);
        if (h1 && h2) {
            if (s & bit(i3)) continue;
            auto r = rest_of(s, {i1, i2});
            steps.push_back({0, {{i1, i2, r[0], r[1]}, -1, {{i1, i2, r[0], i3}, {i1, i2, i3, r[1]}}, edge}});
        } else if (h1 || h2) {
            Mark a = h1 ? i1 : i2, o = h1 ? i2 : i1;
            auto r = rest_of(s, {a});
            steps.push_back({1, {{a, r[0], r[1], r[2]}, -1, {{a, r[0], r[1], o}, {a, r[0], o, r[2]}}, edge}});
        } else {
            auto r = mask_to_marks(s);
            steps.push_back({2, {{r[0], r[1], r[2], r[3]}, -1, {{r[0], r[1], r[2], i1}, {r[0], r[1], i1, r[3]}}, edge}});
        }
    }
    std::stable_sort(steps.begin(), steps.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (auto& st : steps) plan.push_back(st.second);
}

inline void build_plan(ChartBasis& b) {
    const MarkedTree& t = b.tree;
    TreePaths paths(t);
    std::vector<Mark> span;  // [Gamma]_{Ver'}
    int basis_index = 0;
    std::vector<int> first_basis(t.nv, 0);
    for (int v : b.order) { first_basis[v] = basis_index; basis_index += int(b.vertex_quads[v].size()); }
    int edge_base = basis_index;

    auto in_span = [&](Mark m) { return std::find(span.begin(), span.end(), m) != span.end(); };

    seed_vertex(b.gamma[b.root], first_basis[b.root], -1, b.plan);
    span = b.gamma[b.root];

    for (std::size_t ei = 0; ei < b.edge_quads.size(); ++ei) {
        const auto& eq = b.edge_quads[ei];
        int v = eq.e.tail;
        Mark ie = eq.q[0], je = eq.q[1];
        if (!in_span(ie) || !in_span(je)) throw InvalidArgument("spanning order broken");
        std::vector<Mark> fresh;
        for (Mark m : b.gamma[v])
            if (!in_span(m)) fresh.push_back(m);
        for (Mark m : b.gamma[v])
            if (m != ie && m != je && in_span(m))
                throw InvalidArgument("marking map is not systematic along the spanning tree");
        seed_vertex(b.gamma[v], first_basis[v], int(ei), b.plan);
        Mark ke = eq.q[2], me = eq.q[3];
        b.plan.push_back({eq.q, edge_base + int(ei), {}, int(ei)});

        MarkMask nmask = marks_to_mask(fresh);
        std::vector<Mark> pool = span;
        pool.insert(pool.end(), fresh.begin(), fresh.end());
        std::sort(pool.begin(), pool.end());
        std::vector<MarkMask> sets;
        add_subsets(pool, sets);
        MarkMask gv = marks_to_mask(b.gamma[v]);

        std::vector<std::pair<int, PlanStep>> steps;
        for (MarkMask s : sets) {
            if (!(s & nmask) || (s & ~gv) == 0) continue;
            int tn = popcount(s & nmask);
            bool hi = s & bit(ie), hj = s & bit(je);
            auto ks = mask_to_marks(s & nmask);
            auto ps = mask_to_marks(s & ~nmask & ~bit(ie) & ~bit(je));  // parent-side others
            if (tn == 1 && hi && hj) {
                Mark k = ks[0], m = ps[0];
                steps.push_back({0, {{ie, je, k, m}, -1,
                                     {{ie, je, k, ke}, eq.q, {ie, je, me, m}}, int(ei)}});
            } else if (tn == 1 && hi) {
                Mark k = ks[0];
                steps.push_back({1, {{ie, k, ps[0], ps[1]}, -1,
                                     {{ie, k, ps[0], je}, {ie, k, je, ps[1]}}, int(ei)}});
            } else if (tn == 1) {
                std::vector<Mark> three = ps;
                if (hj) three.push_back(je);
                std::sort(three.begin(), three.end());
                Mark k = ks[0];
                int pick = -1;
                for (int a = 0; a < 3 && pick < 0; ++a) {
                    Mark x = three[a], y = three[(a + 1) % 3], z = three[(a + 2) % 3];
                    if (!split_realized(paths, ie, x, y, z)) pick = a;
                }
                Mark j = three[pick], m = three[(pick + 1) % 3], m2 = three[(pick + 2) % 3];
                steps.push_back({2, {{j, m, m2, k}, -1, {{j, m, m2, ie}, {j, m, ie, k}}, int(ei)}});
            } else if (tn == 2 && !hi) {
                std::vector<Mark> two = ps;
                if (hj) two.push_back(je);
                std::sort(two.begin(), two.end());
                steps.push_back({3, {{two[0], two[1], ks[0], ks[1]}, -1,
                                     {{two[0], two[1], ks[0], ie}, {two[0], two[1], ie, ks[1]}},
                                     int(ei)}});
            } else if (tn == 2 && hi) {
                Mark m = ps[0];
                steps.push_back({4, {{ks[0], ks[1], ie, m}, -1,
                                     {{ks[0], ks[1], ie, je}, {ks[0], ks[1], je, m}}, int(ei)}});
            } else if (tn == 3) {
                Mark m = ps[0];
                steps.push_back({5, {{ks[0], ks[1], ks[2], m}, -1,
                                     {{ks[0], ks[1], ks[2], je}, {ks[0], ks[1], je, m}}, int(ei)}});
            } else {
                throw InvalidArgument("unexpected quadruple shape in reconstruction");
            }
        }
        std::stable_sort(steps.begin(), steps.end(), [](auto& a, auto& b) { return a.first < b.first; });
        for (auto& st : steps) b.plan.push_back(st.second);
        span = pool;
    }
}

}  // namespace detail

// The Gamma-basis compatible with a systematic eta; spanning order is BFS from mu(min mark).
inline ChartBasis gamma_basis(const MarkedTree& t, const MarkingMap& eta) {
    auto bad = tree_violations(t);
    if (!bad.empty()) throw InvalidArgument("tree not trivalent: " + bad.front());
    if (t.present_marks() != t.space.all()) throw InvalidArgument("tree must carry every mark");
    auto mv = marking_violations(t, eta, true);
    if (!mv.empty()) throw InvalidArgument("marking map not systematic: " + mv.front());

    ChartBasis b;
    b.tree = t;
    b.eta = eta;
    b.root = t.mu[std::countr_zero(t.present_marks())];
    auto adj = t.adjacency();
    b.parent.assign(t.nv, -1);
    std::vector<int> seen(t.nv, 0);
    std::queue<int> qu;
    qu.push(b.root);
    seen[b.root] = 1;
    while (!qu.empty()) {
        int v = qu.front();
        qu.pop();
        b.order.push_back(v);
        for (int w : adj[v])
            if (!seen[w]) { seen[w] = 1; b.parent[w] = v; qu.push(w); }
    }
    b.gamma.resize(t.nv);
    b.vertex_quads.resize(t.nv);
    for (int v = 0; v < t.nv; ++v) {
        b.gamma[v] = gamma_set(t, eta, v);
        auto& g = b.gamma[v];
        for (std::size_t r = 3; r < g.size(); ++r) b.vertex_quads[v].push_back({g[0], g[1], g[2], g[r]});
    }
    for (int v : b.order) {
        int vp = b.parent[v];
        if (vp < 0) continue;
        Mark ie = eta.at(vp, v), je = eta.at(v, vp);
        auto pick = [&](const std::vector<Mark>& g) {
            for (Mark m : g)
                if (m != ie && m != je) return m;
            throw InvalidArgument("vertex set too small");
        };
        b.edge_quads.push_back({{v, vp}, {ie, je, pick(b.gamma[v]), pick(b.gamma[vp])}});
    }
    detail::build_plan(b);
    return b;
}

inline ChartBasis gamma_basis(const MarkedTree& t) { return gamma_basis(t, systematic_marking(t)); }

// ---------------------------------------------------------------- reconstruction

// All cross ratios of a point given by its basis values.
class Reconstructor {
public:
    Reconstructor(const ChartBasis& b, const std::vector<ProjPoint>& values) : sp_(b.tree.space) {
        auto qs = b.quads();
        if (values.size() < qs.size()) throw InvalidArgument("missing basis values");
        table_.reserve(b.plan.size() * 2);
        for (const PlanStep& st : b.plan) {
            ProjPoint x;
            if (st.basis >= 0) {
                x = values[st.basis];
            } else {
                try {
                    x = get(st.factors[0]);
                    for (std::size_t f = 1; f < st.factors.size(); ++f) x = proj_mul(x, get(st.factors[f]));
                } catch (const Indeterminate&) {
                    std::string where = "vertex seed";
                    if (st.edge >= 0) {
                        auto e = b.edge_quads[st.edge].e;
                        where = "edge with rho = " +
                                sp_.label_set(split_marks(b.tree, e.tail, e.head));
                    }
                    throw ChartDomainError("indeterminate product 0*inf reconstructing " +
                                           quad_str(sp_, st.target) + " across " + where);
                }
            }
            table_[quad_mask(st.target)] = to_sorted(st.target, x);
        }
    }

    // CR_q; a quadruple (i,j,k,k) has value 1.
    ProjPoint value(const Quad& q) const { return get(q); }
    const ProjPoint& sorted_value(MarkMask four) const {
        auto it = table_.find(four);
        if (it == table_.end()) throw InvalidArgument("quadruple outside the reconstructed range");
        return it->second;
    }
    std::size_t size() const { return table_.size(); }

private:
    MarkSpace sp_;
    std::unordered_map<MarkMask, ProjPoint> table_;

    ProjPoint get(const Quad& q) const {
        if (q[2] == q[3]) return ProjPoint(1);
        MarkMask m = quad_mask(q);
        if (popcount(m) != 4) throw InvalidArgument("quadruple marks must be distinct");
        return from_sorted(q, sorted_value(m));
    }
};

inline std::vector<ProjPoint> basis_values(const ChartBasis& b, const StableCurve& c) {
    CurveGeometry g(c);
    std::vector<ProjPoint> out;
    for (auto& q : b.all_quads()) out.push_back(g.cr(q));
    return out;
}

inline ProjPoint reconstruct_cr(const std::map<Quad, ProjPoint>& values, const MarkedTree& t,
                                const MarkingMap& eta, const Quad& q) {
    ChartBasis b = gamma_basis(t, eta);
    std::vector<ProjPoint> vals;
    for (auto& bq : b.quads()) {
        auto it = values.find(bq);
        if (it == values.end()) throw InvalidArgument("no value for basis quadruple " + quad_str(t.space, bq));
        vals.push_back(it->second);
    }
    return Reconstructor(b, vals).value(q);
}

// CR_q(curve) == x, by cross-multiplication on the pivot component.
inline bool cr_matches(const CurveGeometry& g, const Quad& q, const ProjPoint& x) {
    auto z = g.projected(q);
    GaussRat num = proj_det(*z[0], *z[2]) * proj_det(*z[1], *z[3]);
    GaussRat den = proj_det(*z[0], *z[3]) * proj_det(*z[1], *z[2]);
    if (num.is_zero() && den.is_zero()) return x.is_one();
    if (x.is_inf()) return den.is_zero();
    return x.a() * den == num;
}

// Every ordered quadruple of the curve against its reconstruction; returns the mismatches.
inline std::vector<Quad> reconstruction_mismatches(const ChartBasis& b, const StableCurve& c) {
    CurveGeometry g(c);
    Reconstructor r(b, basis_values(b, c));
    std::vector<Quad> bad;
    auto marks = b.tree.space.marks();
    std::vector<MarkMask> sets;
    detail::add_subsets(marks, sets);
    for (MarkMask s : sets) {
        auto m = mask_to_marks(s);
        const ProjPoint& x = r.sorted_value(s);
        Quad q{m[0], m[1], m[2], m[3]};
        std::sort(q.begin(), q.end());
        do {
            if (!cr_matches(g, q, from_sorted(q, x))) bad.push_back(q);
        } while (std::next_permutation(q.begin(), q.end()));
    }
    return bad;
}

// ---------------------------------------------------------------- extended charts

// A_Gamma(rho*) for rho* given by its rank in the schedule (0 = bottom).
inline std::vector<MarkMask> a_gamma(const MarkedTree& t, const BlowupSchedule& s, int rank_star) {
    std::vector<MarkMask> out;
    for (auto e : oriented_edges(t)) {
        MarkMask rho = split_marks(t, e.tail, e.head);
        int r = s.rank(rho);
        if (r > rank_star) out.push_back(rho);
    }
    std::sort(out.begin(), out.end(), order_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// V_Gamma(rho*) = intersection of Ver_{e_rho} over rho in A_Gamma(rho*).
inline std::vector<int> v_gamma(const MarkedTree& t, const BlowupSchedule& s, int rank_star) {
    std::vector<int> in(t.nv, 1);
    for (MarkMask rho : a_gamma(t, s, rank_star)) {
        auto e = stratum_edge(t, rho);
        std::vector<int> keep(t.nv, 0);
        for (int v : side_vertices(t, e->tail, e->head)) keep[v] = 1;
        for (int v = 0; v < t.nv; ++v) in[v] &= keep[v];
    }
    std::vector<int> out;
    for (int v = 0; v < t.nv; ++v)
        if (in[v]) out.push_back(v);
    return out;
}

// Adds q~ = (i,j,k,l+1) (real: (i,j,k,(l+1)^+) and its conjugate) with i,j,k in [Gamma]_{v+}.
inline ChartBasis extended_basis(const MarkedTree& t, const MarkingMap& eta, int v_plus,
                                 const BlowupSchedule& s, int rank_star) {
    auto vs = v_gamma(t, s, rank_star);
    if (!std::binary_search(vs.begin(), vs.end(), v_plus))
        throw InvalidArgument("v+ = " + std::to_string(v_plus) + " lies outside V_Gamma(rho*)");
    ChartBasis b = gamma_basis(t, eta);
    b.v_plus = v_plus;
    const auto& g = b.gamma[v_plus];
    Mark extra = t.space.real ? plus(t.space.ell + 1) : t.space.ell + 1;
    Quad q{g[0], g[1], g[2], extra};
    b.extension.push_back(q);
    if (t.space.real) b.extension.push_back(bar_quad(q));
    return b;
}

// ---------------------------------------------------------------- real slice

// conj(c_q) = CR_{q bar} for every basis quadruple q.
inline bool real_slice_check(const ChartBasis& b, const std::vector<ProjPoint>& values) {
    if (!b.tree.space.real) throw InvalidArgument("real slice needs a real tree");
    Reconstructor r(b, values);
    auto qs = b.quads();
    for (std::size_t n = 0; n < qs.size(); ++n)
        if (values[n].conj() != r.value(bar_quad(qs[n]))) return false;
    return true;
}

}  // namespace dmlab
