#pragma once
// Marked trees (dual graphs of stable rational curves) and real marked trees.
//
// A real tree is a MarkedTree over [l^+-] whose phi vector is non-empty.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmlab/errors.hpp"
#include "dmlab/marks.hpp"

namespace dmlab {

using Edge = std::array<int, 2>;  // unordered, stored with e[0] < e[1]

struct MarkedTree {
    MarkSpace space;
    int nv = 0;
    std::vector<Edge> edges;  // sorted
    std::vector<int> mu;      // mu[m] = vertex of mark m, -1 if absent; size count()+1
    std::vector<int> phi;     // involution on vertices; empty for complex trees

    bool is_real() const { return !phi.empty(); }
    int ell() const { return space.ell; }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(nv);
        for (const Edge& e : edges) {
            adj[e[0]].push_back(e[1]);
            adj[e[1]].push_back(e[0]);
        }
        for (auto& a : adj) std::sort(a.begin(), a.end());
        return adj;
    }
    MarkMask marks_at(int v) const {
        MarkMask m = 0;
        for (std::size_t i = 1; i < mu.size(); ++i)
            if (mu[i] == v) m |= bit(int(i));
        return m;
    }
    MarkMask present_marks() const {
        MarkMask m = 0;
        for (std::size_t i = 1; i < mu.size(); ++i)
            if (mu[i] >= 0) m |= bit(int(i));
        return m;
    }
    int degree(int v) const {
        int d = 0;
        for (const Edge& e : edges) d += (e[0] == v) + (e[1] == v);
        return d;
    }
    int valence(int v) const { return popcount(marks_at(v)) + degree(v); }
    bool has_edge(int u, int v) const {
        Edge e{std::min(u, v), std::max(u, v)};
        return std::binary_search(edges.begin(), edges.end(), e);
    }
    void normalize_edges() {
        for (Edge& e : edges)
            if (e[0] > e[1]) std::swap(e[0], e[1]);
        std::sort(edges.begin(), edges.end());
    }

    friend bool operator==(const MarkedTree& a, const MarkedTree& b) {
        return a.space.ell == b.space.ell && a.space.real == b.space.real && a.nv == b.nv &&
               a.edges == b.edges && a.mu == b.mu && a.phi == b.phi;
    }
};

inline MarkedTree one_vertex_tree(const MarkSpace& sp) {
    MarkedTree t;
    t.space = sp;
    t.nv = 1;
    t.mu.assign(sp.count() + 1, 0);
    t.mu[0] = -1;
    if (sp.real) t.phi = {0};
    return t;
}

// Structural checks; returns a list of violations (empty when valid).
inline std::vector<std::string> tree_violations(const MarkedTree& t) {
    std::vector<std::string> out;
    if (t.nv <= 0) { out.push_back("no vertices"); return out; }
    if (int(t.edges.size()) != t.nv - 1) out.push_back("edge count is not nv-1");
    for (const Edge& e : t.edges)
        if (e[0] < 0 || e[1] >= t.nv || e[0] >= e[1]) out.push_back("bad edge");
    if (!out.empty()) return out;
    auto adj = t.adjacency();
    std::vector<int> seen(t.nv, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) { seen[w] = 1; ++cnt; stack.push_back(w); }
    }
    if (cnt != t.nv) out.push_back("not connected");
    if (int(t.mu.size()) != t.space.count() + 1) out.push_back("mark map has wrong size");
    // mu = -1 marks an absent label (a curve after forgetting some marks)
    for (std::size_t m = 1; m < t.mu.size(); ++m)
        if (t.mu[m] < -1 || t.mu[m] >= t.nv)
            out.push_back("mark " + t.space.label(int(m)) + " placed off the tree");
    if (t.present_marks() == 0) out.push_back("no marks");
    for (int v = 0; v < t.nv; ++v)
        if (t.valence(v) < 3) out.push_back("vertex " + std::to_string(v) + " has valence < 3");
    if (t.space.real) {
        if (int(t.phi.size()) != t.nv) {
            out.push_back("real tree without involution");
        } else {
            for (int v = 0; v < t.nv; ++v)
                if (t.phi[v] < 0 || t.phi[v] >= t.nv || t.phi[t.phi[v]] != v)
                    out.push_back("phi is not an involution");
            if (out.empty()) {
                for (const Edge& e : t.edges)
                    if (!t.has_edge(t.phi[e[0]], t.phi[e[1]])) out.push_back("phi breaks an edge");
                for (std::size_t m = 1; m < t.mu.size(); ++m)
                    if (t.mu[m] >= 0 && t.phi[t.mu[m]] != t.mu[bar(int(m))])
                        out.push_back("phi(mu(i)) != mu(bar i)");
            }
        }
    }
    return out;
}

// Path data: toward[v][w] is the neighbour of v on the path to w (-1 if v == w).
struct TreePaths {
    std::vector<std::vector<int>> adj;
    std::vector<std::vector<int>> toward;
    std::vector<int> mu;

    explicit TreePaths(const MarkedTree& t) : adj(t.adjacency()), mu(t.mu) {
        toward.assign(t.nv, std::vector<int>(t.nv, -1));
        for (int w = 0; w < t.nv; ++w) {
            std::vector<int> stack{w};
            std::vector<int> seen(t.nv, 0);
            seen[w] = 1;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int x : adj[v])
                    if (!seen[x]) { seen[x] = 1; toward[x][w] = v; stack.push_back(x); }
            }
        }
    }
    // Direction of mark m seen from v: -m if the mark sits at v, else the neighbour toward it.
    int dir(int v, Mark m) const {
        int w = mu[m];
        return w == v ? -m : toward[v][w];
    }
    bool independent(int v, Mark i, Mark j) const { return i != j && dir(v, i) != dir(v, j); }
};

// Vertices of the component containing `tail` once the edge {tail, head} is removed.
inline std::vector<int> side_vertices(const MarkedTree& t, int tail, int head) {
    auto adj = t.adjacency();
    std::vector<int> seen(t.nv, 0), out;
    std::vector<int> stack{tail};
    seen[tail] = 1;
    seen[head] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (int w : adj[v])
            if (!seen[w]) { seen[w] = 1; stack.push_back(w); }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// (Ver_e, Ver_e^c) for the oriented edge e = tail->head; the tail lies in Ver_e.
inline std::pair<std::vector<int>, std::vector<int>> subtree_split(const MarkedTree& t, int tail,
                                                                   int head) {
    if (tail < 0 || head < 0 || tail >= t.nv || head >= t.nv || !t.has_edge(tail, head))
        throw InvalidArgument("edge absent");
    auto a = side_vertices(t, tail, head);
    auto b = side_vertices(t, head, tail);
    return {a, b};
}

inline MarkMask vertices_marks(const MarkedTree& t, const std::vector<int>& vs) {
    MarkMask m = 0;
    for (int v : vs) m |= t.marks_at(v);
    return m;
}

// mu^{-1}(Ver_e) for e = tail->head.
inline MarkMask split_marks(const MarkedTree& t, int tail, int head) {
    return vertices_marks(t, side_vertices(t, tail, head));
}

struct OrientedEdge {
    int tail, head;
    friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
    friend auto operator<=>(const OrientedEdge&, const OrientedEdge&) = default;
};

inline std::vector<OrientedEdge> oriented_edges(const MarkedTree& t) {
    std::vector<OrientedEdge> out;
    for (const Edge& e : t.edges) {
        out.push_back({e[0], e[1]});
        out.push_back({e[1], e[0]});
    }
    return out;
}

inline bool independence(const MarkedTree& t, int v, Mark i, Mark j) {
    return TreePaths(t).independent(v, i, j);
}

inline int pivot_vertex(const MarkedTree& t, Mark i, Mark j, Mark k) {
    TreePaths p(t);
    for (int v = 0; v < t.nv; ++v)
        if (p.independent(v, i, j) && p.independent(v, i, k) && p.independent(v, j, k)) return v;
    throw InvalidArgument("no pivot vertex");
}

// Kinds of edges of a real tree.
enum class EdgeKind { H, E, C };

inline EdgeKind edge_kind(const MarkedTree& t, const Edge& e) {
    int a = t.phi[e[0]], b = t.phi[e[1]];
    if (a == e[0] && b == e[1]) return EdgeKind::H;
    if (a == e[1] && b == e[0]) return EdgeKind::E;
    return EdgeKind::C;
}

// ---------------------------------------------------------------- canonical forms

namespace detail {

inline std::string encode_rooted(const MarkedTree& t, const std::vector<std::vector<int>>& adj,
                                 int v, int parent) {
    std::string s = "(";
    bool first = true;
    for (Mark m : mask_to_marks(t.marks_at(v))) {
        if (!first) s += ",";
        s += t.space.label(m);
        first = false;
    }
    s += ";";
    std::vector<std::string> kids;
    for (int w : adj[v])
        if (w != parent) kids.push_back(encode_rooted(t, adj, w, v));
    std::sort(kids.begin(), kids.end());
    for (auto& k : kids) s += k;
    return s + ")";
}

inline void preorder(const MarkedTree& t, const std::vector<std::vector<int>>& adj, int v,
                     int parent, std::vector<int>& order) {
    order.push_back(v);
    std::vector<std::pair<std::string, int>> kids;
    for (int w : adj[v])
        if (w != parent) kids.push_back({encode_rooted(t, adj, w, v), w});
    std::sort(kids.begin(), kids.end());
    for (auto& k : kids) preorder(t, adj, k.second, v, order);
}

inline std::vector<int> centroids(const MarkedTree& t, const std::vector<std::vector<int>>& adj) {
    int n = t.nv;
    std::vector<int> size(n, 1), parent(n, -1), order;
    std::vector<int> stack{0};
    parent[0] = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int w : adj[v])
            if (parent[w] == -1) { parent[w] = v; stack.push_back(w); }
    }
    for (int k = n - 1; k > 0; --k) size[parent[order[k]]] += size[order[k]];
    std::vector<int> out;
    for (int v = 0; v < n; ++v) {
        int worst = n - size[v];
        for (int w : adj[v])
            if (w != v && parent[w] == v) worst = std::max(worst, size[w]);
        if (2 * worst <= n) out.push_back(v);
    }
    return out;
}

// Root choice and canonical vertex order.
inline std::pair<std::string, std::vector<int>> canonical_order(const MarkedTree& t) {
    auto adj = t.adjacency();
    std::string best;
    int root = -1;
    for (int c : centroids(t, adj)) {
        std::string s = encode_rooted(t, adj, c, -1);
        if (root < 0 || s < best) { best = s; root = c; }
    }
    std::vector<int> order;
    preorder(t, adj, root, -1, order);
    return {best, order};
}

}  // namespace detail

// Relabel vertices into canonical order.
inline MarkedTree canonicalize(const MarkedTree& t) {
    auto [enc, order] = detail::canonical_order(t);
    std::vector<int> pos(t.nv);
    for (int k = 0; k < t.nv; ++k) pos[order[k]] = k;
    MarkedTree r;
    r.space = t.space;
    r.nv = t.nv;
    for (const Edge& e : t.edges) r.edges.push_back({pos[e[0]], pos[e[1]]});
    r.normalize_edges();
    r.mu = t.mu;
    for (std::size_t m = 1; m < r.mu.size(); ++m)
        if (r.mu[m] >= 0) r.mu[m] = pos[r.mu[m]];
    if (!t.phi.empty()) {
        r.phi.assign(t.nv, 0);
        for (int v = 0; v < t.nv; ++v) r.phi[pos[v]] = pos[t.phi[v]];
    }
    return r;
}

// "C<l>:" or "R<l>:" followed by the centroid-rooted nested encoding; real trees
// append "|phi:" and the involution in canonical vertex order.
inline std::string canonical_form(const MarkedTree& t) {
    auto [enc, order] = detail::canonical_order(t);
    std::string s = std::string(t.space.real ? "R" : "C") + std::to_string(t.space.ell) + ":" + enc;
    if (!t.phi.empty()) {
        std::vector<int> pos(t.nv);
        for (int k = 0; k < t.nv; ++k) pos[order[k]] = k;
        s += "|phi:";
        for (int k = 0; k < t.nv; ++k) {
            if (k) s += ",";
            s += std::to_string(pos[t.phi[order[k]]]);
        }
    }
    return s;
}

// ---------------------------------------------------------------- real structure

// Direction masks at v, sorted: the partition of marks induced by v.
inline std::vector<MarkMask> vertex_partition(const MarkedTree& t, const TreePaths& p, int v) {
    std::map<int, MarkMask> by_dir;
    for (std::size_t m = 1; m < t.mu.size(); ++m)
        if (t.mu[m] >= 0) by_dir[p.dir(v, int(m))] |= bit(int(m));
    std::vector<MarkMask> out;
    for (auto& [d, mask] : by_dir) out.push_back(mask);
    std::sort(out.begin(), out.end());
    return out;
}

// The involution phi compatible with conjugation of marks, if the tree admits one.
inline std::optional<std::vector<int>> find_real_structure(const MarkedTree& t) {
    TreePaths p(t);
    std::map<std::vector<MarkMask>, int> index;
    std::vector<std::vector<MarkMask>> parts(t.nv);
    for (int v = 0; v < t.nv; ++v) {
        parts[v] = vertex_partition(t, p, v);
        index[parts[v]] = v;
    }
    std::vector<int> phi(t.nv, -1);
    for (int v = 0; v < t.nv; ++v) {
        std::vector<MarkMask> c;
        for (MarkMask m : parts[v]) c.push_back(bar_mask(m));
        std::sort(c.begin(), c.end());
        auto it = index.find(c);
        if (it == index.end()) return std::nullopt;
        phi[v] = it->second;
    }
    for (int v = 0; v < t.nv; ++v)
        if (phi[phi[v]] != v) return std::nullopt;
    for (const Edge& e : t.edges)
        if (!t.has_edge(phi[e[0]], phi[e[1]])) return std::nullopt;
    for (std::size_t m = 1; m < t.mu.size(); ++m)
        if (t.mu[m] >= 0 && phi[t.mu[m]] != t.mu[bar(int(m))]) return std::nullopt;
    return phi;
}

// ---------------------------------------------------------------- attachments

namespace detail {

inline MarkedTree grow_space(const MarkedTree& t, int new_ell) {
    MarkedTree r = t;
    r.space.ell = new_ell;
    r.mu.resize(r.space.count() + 1, -1);
    return r;
}

// Raw single-mark operations used by enumeration and the public attachments.
inline MarkedTree put_mark_at_vertex(MarkedTree t, Mark m, int v) {
    t.mu[m] = v;
    return t;
}

inline MarkedTree put_mark_on_edge(MarkedTree t, Mark m, const Edge& e) {
    int nv = t.nv++;
    auto it = std::find(t.edges.begin(), t.edges.end(), e);
    if (it == t.edges.end()) throw InvalidArgument("edge absent");
    t.edges.erase(it);
    t.edges.push_back({e[0], nv});
    t.edges.push_back({e[1], nv});
    t.normalize_edges();
    t.mu[m] = nv;
    if (!t.phi.empty()) t.phi.push_back(nv);
    return t;
}

// New vertex carrying marks `old` and `m`, attached where `old` was.
inline MarkedTree put_mark_on_mark(MarkedTree t, Mark m, Mark old) {
    int nv = t.nv++;
    t.edges.push_back({t.mu[old], nv});
    t.normalize_edges();
    t.mu[old] = nv;
    t.mu[m] = nv;
    if (!t.phi.empty()) t.phi.push_back(nv);
    return t;
}

}  // namespace detail

// Gamma v_+: the next mark (or conjugate pair) placed at vertex v.
inline MarkedTree attach_point(const MarkedTree& t, int v) {
    if (v < 0 || v >= t.nv) throw InvalidArgument("vertex absent");
    MarkedTree r = detail::grow_space(t, t.space.ell + 1);
    if (!t.space.real) return detail::put_mark_at_vertex(r, t.space.ell + 1, v);
    int l1 = t.space.ell + 1;
    r.mu[plus(l1)] = v;
    r.mu[minus(l1)] = t.phi.empty() ? v : t.phi[v];
    return r;
}

// Gamma e_+: edge e subdivided by a new vertex carrying the next mark. For a real
// tree and a phi-invariant edge the new vertex is phi-fixed and carries both
// conjugate marks; otherwise the conjugate edge is subdivided too.
inline MarkedTree attach_at_edge(const MarkedTree& t, Edge e) {
    if (e[0] > e[1]) std::swap(e[0], e[1]);
    if (!t.has_edge(e[0], e[1])) throw InvalidArgument("edge absent");
    MarkedTree r = detail::grow_space(t, t.space.ell + 1);
    int l1 = t.space.ell + 1;
    if (!t.space.real) return detail::put_mark_on_edge(r, l1, e);
    if (t.phi.empty()) throw InvalidArgument("real attachment needs an involution");
    Edge fe{std::min(t.phi[e[0]], t.phi[e[1]]), std::max(t.phi[e[0]], t.phi[e[1]])};
    if (fe == e) {
        r = detail::put_mark_on_edge(r, plus(l1), e);
        r.mu[minus(l1)] = r.nv - 1;
        return r;
    }
    r = detail::put_mark_on_edge(r, plus(l1), e);
    int a = r.nv - 1;
    r.phi.pop_back();
    r = detail::put_mark_on_edge(r, minus(l1), fe);
    int b = r.nv - 1;
    r.phi.pop_back();
    r.phi.push_back(b);
    r.phi.push_back(a);
    return r;
}

// New bubble carrying mark m together with the next mark (its conjugate mirrored).
inline MarkedTree attach_at_mark(const MarkedTree& t, Mark m) {
    MarkedTree r = detail::grow_space(t, t.space.ell + 1);
    int l1 = t.space.ell + 1;
    if (!t.space.real) return detail::put_mark_on_mark(r, l1, m);
    if (t.phi.empty()) throw InvalidArgument("real attachment needs an involution");
    r = detail::put_mark_on_mark(r, plus(l1), m);
    int a = r.nv - 1;
    r.phi.pop_back();
    r = detail::put_mark_on_mark(r, minus(l1), bar(m));
    int b = r.nv - 1;
    r.phi.pop_back();
    r.phi.push_back(b);
    r.phi.push_back(a);
    return r;
}

// ---------------------------------------------------------------- contractions

struct Contraction {
    MarkedTree tree;
    std::vector<int> kappa;  // vertex map Ver -> Ver'
    std::uint64_t collapsed = 0;  // bit k set <=> edges[k] contracted
};

inline Contraction contract_edges(const MarkedTree& t, std::uint64_t subset) {
    std::vector<int> parent(t.nv);
    for (int v = 0; v < t.nv; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (std::size_t k = 0; k < t.edges.size(); ++k)
        if (subset >> k & 1) {
            int a = find(t.edges[k][0]), b = find(t.edges[k][1]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::map<int, int> ids;
    Contraction c;
    c.collapsed = subset;
    c.kappa.resize(t.nv);
    for (int v = 0; v < t.nv; ++v) {
        int r = find(v);
        auto it = ids.find(r);
        if (it == ids.end()) it = ids.emplace(r, int(ids.size())).first;
        c.kappa[v] = it->second;
    }
    c.tree.space = t.space;
    c.tree.nv = int(ids.size());
    for (std::size_t k = 0; k < t.edges.size(); ++k)
        if (!(subset >> k & 1)) c.tree.edges.push_back({c.kappa[t.edges[k][0]], c.kappa[t.edges[k][1]]});
    c.tree.normalize_edges();
    c.tree.mu = t.mu;
    for (std::size_t m = 1; m < c.tree.mu.size(); ++m)
        if (c.tree.mu[m] >= 0) c.tree.mu[m] = c.kappa[t.mu[m]];
    if (!t.phi.empty()) {
        c.tree.phi.assign(c.tree.nv, -1);
        for (int v = 0; v < t.nv; ++v) c.tree.phi[c.kappa[v]] = c.kappa[t.phi[v]];
    }
    return c;
}

// The collection T(Gamma): one contraction per edge subset (phi-invariant subsets
// for real trees, so that kappa commutes with the involutions).
inline std::vector<Contraction> contractions(const MarkedTree& t) {
    std::size_t n = t.edges.size();
    if (n > 30) throw InvalidArgument("too many edges to enumerate contractions");
    std::vector<Contraction> out;
    std::vector<int> edge_image(n, -1);
    if (!t.phi.empty())
        for (std::size_t k = 0; k < n; ++k) {
            Edge fe{std::min(t.phi[t.edges[k][0]], t.phi[t.edges[k][1]]),
                    std::max(t.phi[t.edges[k][0]], t.phi[t.edges[k][1]])};
            edge_image[k] = int(std::find(t.edges.begin(), t.edges.end(), fe) - t.edges.begin());
        }
    for (std::uint64_t s = 0; s < (std::uint64_t(1) << n); ++s) {
        if (!t.phi.empty()) {
            bool closed = true;
            for (std::size_t k = 0; k < n && closed; ++k)
                if ((s >> k & 1) && !(s >> edge_image[k] & 1)) closed = false;
            if (!closed) continue;
        }
        out.push_back(contract_edges(t, s));
    }
    return out;
}

// ---------------------------------------------------------------- enumeration

namespace detail {

inline std::vector<MarkedTree> single_extensions(const MarkedTree& t, Mark m) {
    std::vector<MarkedTree> out;
    for (int v = 0; v < t.nv; ++v) out.push_back(put_mark_at_vertex(t, m, v));
    for (const Edge& e : t.edges) out.push_back(put_mark_on_edge(t, m, e));
    for (std::size_t old = 1; old < t.mu.size(); ++old)
        if (t.mu[old] >= 0 && int(old) != m) out.push_back(put_mark_on_mark(t, m, int(old)));
    return out;
}

inline bool tree_key_less(const MarkedTree& a, const MarkedTree& b, const std::string& ka,
                          const std::string& kb) {
    if (a.nv != b.nv) return a.nv < b.nv;
    return ka < kb;
}

inline std::vector<MarkedTree> sorted_unique(std::map<std::string, MarkedTree>& pool) {
    std::vector<std::pair<std::string, MarkedTree>> v(pool.begin(), pool.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
        return tree_key_less(x.second, y.second, x.first, y.first);
    });
    std::vector<MarkedTree> out;
    for (auto& [k, t] : v) out.push_back(t);
    return out;
}

}  // namespace detail

// All trivalent trees up to label-preserving isomorphism, ordered by vertex count
// then canonical form. Complex: l >= 3. Real: l >= 2, over [l^+-].
inline std::vector<MarkedTree> enumerate_trees(int ell, bool real) {
    if (!real) {
        if (ell < 3) throw InvalidArgument("need l >= 3 for stable complex trees");
        std::vector<MarkedTree> cur{one_vertex_tree({3, false})};
        for (int l = 3; l < ell; ++l) {
            std::map<std::string, MarkedTree> pool;
            for (const MarkedTree& t : cur)
                for (MarkedTree& x : detail::single_extensions(detail::grow_space(t, l + 1), l + 1)) {
                    MarkedTree c = canonicalize(x);
                    pool.emplace(canonical_form(c), c);
                }
            cur = detail::sorted_unique(pool);
        }
        return cur;
    }
    if (ell < 2) throw InvalidArgument("need l >= 2 for stable real trees");
    // base: the four-marked trees over [2^+-] admitting an involution
    std::vector<MarkedTree> base;
    {
        MarkedTree t = one_vertex_tree({1, false});
        t.space = {2, true};
        t.mu = {-1, 0, 0, 0, -1};
        t.phi.clear();
        std::map<std::string, MarkedTree> pool;
        for (MarkedTree& x : detail::single_extensions(t, minus(2))) {
            auto phi = find_real_structure(x);
            if (!phi) continue;
            x.phi = *phi;
            MarkedTree c = canonicalize(x);
            pool.emplace(canonical_form(c), c);
        }
        base = detail::sorted_unique(pool);
    }
    std::vector<MarkedTree> cur = base;
    for (int l = 2; l < ell; ++l) {
        std::map<std::string, MarkedTree> pool;
        for (const MarkedTree& t0 : cur) {
            MarkedTree t = detail::grow_space(t0, l + 1);
            t.phi.clear();
            for (MarkedTree& a : detail::single_extensions(t, plus(l + 1)))
                for (MarkedTree& b : detail::single_extensions(a, minus(l + 1))) {
                    auto phi = find_real_structure(b);
                    if (!phi) continue;
                    b.phi = *phi;
                    MarkedTree c = canonicalize(b);
                    pool.emplace(canonical_form(c), c);
                }
        }
        cur = detail::sorted_unique(pool);
    }
    return cur;
}

}  // namespace dmlab
