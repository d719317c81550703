#include <gtest/gtest.h>

#include "dmlab/curves.hpp"
#include "fixtures.hpp"
#include "smoothing_oracle.hpp"

using namespace dmlab;
using Q = std::array<Mark, 4>;

namespace {

ProjPoint P(long long n, long long d = 1) { return ProjPoint(GaussRat(Rational(n, d))); }

StableCurve smooth(std::vector<ProjPoint> pts) {
    StableCurve c;
    c.tree = one_vertex_tree({int(pts.size()), false});
    c.mark_pos.assign(pts.size() + 1, ProjPoint());
    for (std::size_t k = 0; k < pts.size(); ++k) c.mark_pos[k + 1] = pts[k];
    return c;
}

// Two components: marks `left` on 0 at positions 1, 2, ..., node at 0 on both sides;
// remaining marks on 1 at positions 1, 2, ...
StableCurve two_components(int ell, std::vector<int> left) {
    StableCurve c;
    c.tree = fixtures::split_tree(ell, left);
    c.mark_pos.assign(ell + 1, ProjPoint());
    long long a = 1, b = 1;
    for (int m = 1; m <= ell; ++m) c.mark_pos[m] = c.tree.mu[m] == 0 ? P(a++) : P(b++);
    c.node_pos[{0, 1}] = P(0);
    c.node_pos[{1, 0}] = P(0);
    return c;
}

// Value after stabilizing down to the four marks of q.
ProjPoint cr_by_forgetting(const StableCurve& c, const Q& q) {
    StableCurve f = forget(c, marks_to_mask({q[0], q[1], q[2], q[3]}));
    if (f.tree.nv == 1)
        return cross_ratio(f.mark_pos[q[0]], f.mark_pos[q[1]], f.mark_pos[q[2]], f.mark_pos[q[3]]);
    auto side = [&](Mark m) { return f.tree.mu[m]; };
    if (side(q[0]) == side(q[1])) return ProjPoint(1);
    if (side(q[0]) == side(q[2])) return ProjPoint(0);
    return ProjPoint::inf();
}

std::vector<Q> all_quadruples(const MarkSpace& sp) {
    std::vector<Q> out;
    auto ms = sp.marks();
    for (Mark a : ms)
        for (Mark b : ms)
            for (Mark c : ms)
                for (Mark d : ms)
                    if (a != b && a != c && a != d && b != c && b != d && c != d) out.push_back({a, b, c, d});
    return out;
}

}  // namespace

TEST(Validate, Examples) {
    EXPECT_TRUE(validate(smooth({P(0), P(1), ProjPoint::inf(), P(5)})).empty());
    StableCurve bad = two_components(4, {1, 2});
    bad.tree.mu[2] = 1;  // component 0 keeps mark 1 and the node only
    EXPECT_FALSE(validate(bad).empty());
    StableCurve dup = smooth({P(0), P(1), P(1), P(5)});
    EXPECT_FALSE(validate(dup).empty());
}

TEST(Validate, RealSymmetry) {
    auto trees = enumerate_trees(2, true);
    StableCurve c = sample_curve(trees[0], 10, std::uint64_t(1));
    EXPECT_TRUE(validate(c).empty());
    c.mark_pos[plus(1)] = ProjPoint(GaussRat(Rational(7), Rational(3)));
    auto v = validate(c);
    ASSERT_FALSE(v.empty());
    EXPECT_NE(v[0].find("symmetry"), std::string::npos);
}

TEST(DualGraph, Examples) {
    StableCurve c = two_components(5, {1, 2});
    EXPECT_EQ(dual_graph(c).nv, 2);
    EXPECT_EQ(dual_graph(c), c.tree);
    for (const auto& t : enumerate_trees(3, true)) {
        StableCurve r = sample_curve(t, 10, std::uint64_t(4));
        EXPECT_EQ(dual_graph(r).phi, t.phi);
    }
}

TEST(Forget, Examples) {
    StableCurve s = smooth({P(0), P(1), P(2), P(3), P(9)});
    StableCurve f = forget(s, marks_to_mask({1, 2, 3, 4}));
    EXPECT_EQ(f.tree.nv, 1);
    for (int m = 1; m <= 4; ++m) EXPECT_EQ(f.mark_pos[m], s.mark_pos[m]);
    EXPECT_EQ(f.tree.mu[5], -1);

    StableCurve c = two_components(5, {1, 2});
    c.node_pos[{1, 0}] = P(7);
    StableCurve g = forget(c, marks_to_mask({1, 3, 4, 5}));
    EXPECT_EQ(g.tree.nv, 1);
    EXPECT_EQ(g.mark_pos[1], P(7));
    EXPECT_TRUE(validate(g).empty());
    EXPECT_THROW(forget(s, marks_to_mask({1, 2})), InvalidArgument);
}

TEST(Forget, RealStaysSymmetric) {
    for (const auto& t : enumerate_trees(3, true)) {
        StableCurve c = sample_curve(t, 12, std::uint64_t(9));
        MarkSpace sp{2, true};
        StableCurve f = forget(c, sp.all());
        EXPECT_TRUE(validate(f).empty()) << canonical_form(t);
    }
}

TEST(CrossRatioQ, Examples) {
    EXPECT_EQ(cross_ratio_q(smooth({P(0), P(1), P(2), P(3)}), {1, 2, 3, 4}), P(4, 3));
    EXPECT_EQ(cross_ratio_q(two_components(4, {1, 2}), {1, 2, 3, 4}), P(1));
    EXPECT_EQ(cross_ratio_q(two_components(4, {1, 3}), {1, 2, 3, 4}), P(0));
    EXPECT_EQ(cross_ratio_q(two_components(4, {1, 4}), {1, 2, 3, 4}), ProjPoint::inf());
    EXPECT_EQ(cross_ratio_q(two_components(4, {2, 3}), {1, 2, 3, 4}), ProjPoint::inf());
}

// The three nodal curves of M_4-bar against the limit of a smoothing family.
TEST(CrossRatioQ, BoundaryValuesMatchSmoothingLimit) {
    Rng rng(41);
    for (auto left : std::vector<std::vector<int>>{{1, 2}, {1, 3}, {1, 4}, {2, 3}})
        for (int k = 0; k < 50; ++k) {
            StableCurve c = sample_curve(fixtures::split_tree(4, left), 20, rng);
            if (c.node(0, 1).is_inf() || c.node(1, 0).is_inf()) continue;
            bool finite = true;
            for (int m = 1; m <= 4; ++m) finite &= !c.mark_pos[m].is_inf();
            if (!finite) continue;
            for (const Q& q : all_quadruples(c.space()))
                EXPECT_EQ(cross_ratio_q(c, q), oracle::smoothing_limit(c, q));
        }
}

TEST(CrossRatioQ, AgreesWithForgetfulImage) {
    for (int ell : {5, 6}) {
        auto trees = enumerate_trees(ell, false);
        auto qs = all_quadruples({ell, false});
        for (std::size_t k = 0; k < trees.size(); k += (ell == 6 ? 7 : 1)) {
            StableCurve c = sample_curve(trees[k], 15, derive_seed(5, k));
            CurveGeometry g(c);
            for (const Q& q : qs) EXPECT_EQ(g.cr(q), cr_by_forgetting(c, q));
        }
    }
}

TEST(CrossRatioQ, RelationsOnNodalCurves) {
    auto trees = enumerate_trees(5, false);
    for (std::size_t k = 0; k < trees.size(); ++k) {
        StableCurve c = sample_curve(trees[k], 15, derive_seed(6, k));
        CurveGeometry g(c);
        for (const Q& q : all_quadruples(c.space())) {
            auto [i, j, kk, m] = q;
            ProjPoint x = g.cr(q);
            EXPECT_EQ(g.cr({kk, m, i, j}), x);
            EXPECT_EQ(g.cr({j, i, kk, m}), x.inverse());
            EXPECT_EQ(g.cr({m, j, kk, i}), x.one_minus());
            for (Mark n = 1; n <= 5; ++n) {
                if (n == i || n == j || n == kk || n == m) continue;
                ProjPoint a = g.cr({i, j, kk, m}), b = g.cr({i, j, m, n});
                if ((a.is_zero() && b.is_inf()) || (a.is_inf() && b.is_zero())) continue;
                EXPECT_EQ(proj_mul(a, b), g.cr({i, j, kk, n}));
            }
        }
    }
}

TEST(CrossRatioQ, MobiusOnOneComponent) {
    auto trees = enumerate_trees(5, false);
    Rng rng(8);
    for (const auto& t : trees) {
        StableCurve c = sample_curve(t, 15, rng);
        StableCurve d = c;
        int v = t.nv - 1;
        GaussRat a(2), b(Rational(1), Rational(1)), cc(Rational(0), Rational(1)), dd(3);
        auto f = [&](const ProjPoint& p) { return ProjPoint(a * p.a() + b * p.b(), cc * p.a() + dd * p.b()); };
        for (Mark m : mask_to_marks(t.marks_at(v))) d.mark_pos[m] = f(c.mark_pos[m]);
        for (auto& [key, p] : d.node_pos)
            if (key.first == v) p = f(p);
        for (const Q& q : all_quadruples(c.space())) EXPECT_EQ(cross_ratio_q(c, q), cross_ratio_q(d, q));
    }
}

TEST(Divisors, Examples) {
    StableCurve c = two_components(4, {1, 2});
    EXPECT_TRUE(in_divisor(c, marks_to_mask({1, 2})));
    EXPECT_TRUE(in_divisor(c, marks_to_mask({3, 4})));
    EXPECT_FALSE(in_divisor(c, marks_to_mask({1, 3})));
}

TEST(Divisors, RealFigureExample) {
    // fixed component with 3+,3-; conjugate bubbles {1+,2+} and {1-,2-}
    MarkedTree t;
    t.space = {3, true};
    t.nv = 3;
    t.edges = {{0, 1}, {0, 2}};
    t.mu = {-1, 1, 2, 1, 2, 0, 0};
    t.phi = {0, 2, 1};
    ASSERT_TRUE(tree_violations(t).empty());
    StableCurve c = sample_curve(t, 10, std::uint64_t(2));
    MarkMask a = bit(plus(1)) | bit(plus(2));
    EXPECT_TRUE(in_divisor(c, a));
    EXPECT_TRUE(in_divisor(c, a | bit(plus(3)) | bit(minus(3))));
    EXPECT_EQ(classify_real(3, a), StratumKind::D1);
}

TEST(Divisors, AgreesWithStratumEdge) {
    for (const auto& t : enumerate_trees(5, false)) {
        StableCurve c = sample_curve(t, 10, std::uint64_t(3));
        for (auto& lab : build_a_ell(5))
            EXPECT_EQ(in_divisor(c, lab.rho),
                      stratum_edge(t, lab.rho).has_value() ||
                          stratum_edge(t, complement(t.space, lab.rho)).has_value());
    }
}

TEST(Divisors, HyperbolicMinusStratumIsEmpty) {
    // D_{l+1; rho ∪ {(l+1)-}} never occurs for rho in A^H
    for (const auto& t : enumerate_trees(3, true)) {
        StableCurve c = sample_curve(t, 10, std::uint64_t(5));
        for (auto& lab : build_a_ell_real(2))
            if (lab.kind == StratumKind::H) EXPECT_FALSE(in_divisor(c, lab.rho | bit(minus(3))));
    }
}

TEST(Real, ConjugationOfCrossRatios) {
    for (int ell : {2, 3}) {
        auto trees = enumerate_trees(ell, true);
        for (std::size_t k = 0; k < trees.size(); ++k) {
            StableCurve c = sample_curve(trees[k], 12, derive_seed(7, k));
            StableCurve psi = conjugate_curve(c);
            EXPECT_EQ(canonical_serialization(psi), canonical_serialization(c));
            EXPECT_EQ(canonical_serialization(conjugate_curve(psi)), canonical_serialization(c));
            CurveGeometry g(c), gp(psi);
            for (const Q& q : all_quadruples(c.space())) {
                Q qb{bar(q[0]), bar(q[1]), bar(q[2]), bar(q[3])};
                EXPECT_EQ(g.cr(q).conj(), g.cr(qb));
                EXPECT_EQ(gp.cr(q), g.cr(qb).conj());
            }
        }
    }
}

TEST(Real, ConjugationIsAnInvolutionOnNonRealCurves) {
    MarkedTree t = one_vertex_tree({2, true});
    t.phi.clear();
    StableCurve c;
    c.tree = t;
    c.mark_pos = {ProjPoint(), P(0), P(1), P(2), ProjPoint::inf()};
    StableCurve twice = conjugate_curve(conjugate_curve(c));
    EXPECT_EQ(twice.mark_pos, c.mark_pos);
}

TEST(Sampling, DeterministicAndBounded) {
    auto t = one_vertex_tree({4, false});
    StableCurve a = sample_curve(t, 10, std::uint64_t(77)), b = sample_curve(t, 10, std::uint64_t(77));
    EXPECT_EQ(canonical_serialization(a), canonical_serialization(b));
    EXPECT_TRUE(validate(a).empty());
    for (int m = 1; m <= 4; ++m)
        if (!a.mark_pos[m].is_inf()) {
            EXPECT_LE(a.mark_pos[m].a().re().height(), 10);
            EXPECT_LE(a.mark_pos[m].a().im().height(), 10);
        }
    StableCurve r = sample_curve(one_vertex_tree({2, true}), 10, std::uint64_t(3));
    EXPECT_EQ(r.mark_pos[minus(1)], r.mark_pos[plus(1)].conj());
    EXPECT_THROW(sample_curve(one_vertex_tree({40, false}), 1, std::uint64_t(1)), InvalidArgument);
}
