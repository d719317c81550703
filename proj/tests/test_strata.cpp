#include <gtest/gtest.h>

#include <set>

#include "dmlab/strata.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dmlab;

namespace {

MarkMask real_set(std::initializer_list<std::pair<int, char>> xs) {
    MarkMask m = 0;
    for (auto [i, s] : xs) m |= bit(s == '+' ? plus(i) : minus(i));
    return m;
}

}  // namespace

TEST(Strata, ComplexExamples) {
    auto a4 = build_a_ell(4);
    ASSERT_EQ(a4.size(), 3u);
    EXPECT_EQ(a4[0].rho, marks_to_mask({1, 2}));
    EXPECT_EQ(a4[1].rho, marks_to_mask({1, 3}));
    EXPECT_EQ(a4[2].rho, marks_to_mask({2, 3}));
    EXPECT_EQ(build_a_ell(5).size(), 10u);
}

TEST(Strata, ClosedFormsAgainstBruteForce) {
    for (int ell = 3; ell <= 8; ++ell) {
        EXPECT_EQ((long long)build_a_ell(ell).size(), (1LL << (ell - 1)) - ell - 1);
        EXPECT_EQ((long long)build_a_ell(ell).size(), oracle::brute_count(ell, false));
        EXPECT_EQ((long long)build_a_ell_pm(ell).size(), (1LL << (2 * ell - 1)) - 2 * ell - 1);
        EXPECT_EQ((long long)build_a_ell_pm(ell).size(), oracle::brute_count(ell, true));
    }
}

TEST(Strata, ComplementPairing) {
    for (int ell = 4; ell <= 8; ++ell) {
        MarkSpace sp{ell, false};
        for (MarkMask r = 0; r <= sp.all(); r += 2) {
            int k = popcount(r);
            if (k < 2 || k > ell - 2) continue;
            EXPECT_NE(in_a_ell(ell, r), in_a_ell(ell, complement(sp, r)));
        }
    }
}

TEST(Strata, RealTwoClassification) {
    auto r = build_a_ell_real(2);
    ASSERT_EQ(r.size(), 3u);
    std::set<std::pair<MarkMask, StratumKind>> got;
    for (auto& s : r) got.insert({s.rho, s.kind});
    std::set<std::pair<MarkMask, StratumKind>> want{
        {real_set({{1, '+'}, {1, '-'}}), StratumKind::H},
        {real_set({{1, '+'}, {2, '+'}}), StratumKind::E},
        {real_set({{1, '-'}, {2, '+'}}), StratumKind::E}};
    EXPECT_EQ(got, want);
    auto c = count_kinds(r);
    EXPECT_EQ(c.H, 1);
    EXPECT_EQ(c.E, 2);
}

TEST(Strata, RealThreeCounts) {
    auto c = count_kinds(build_a_ell_real(3));
    EXPECT_EQ(c.H, 3);
    EXPECT_EQ(c.E, 4);
    EXPECT_EQ(c.D1, 2);
    EXPECT_EQ(c.D2, 2);
    EXPECT_EQ(c.D3, 8);
    EXPECT_EQ(c.divisors(), 6);
}

TEST(Strata, RealKindIdentities) {
    for (int ell = 2; ell <= 5; ++ell) {
        MarkSpace sp{ell, true};
        auto labels = build_a_ell_real(ell);
        std::set<MarkMask> d1, d2, d3;
        for (auto& s : labels) {
            MarkMask rb = bar_mask(s.rho), rc = complement(sp, s.rho);
            switch (s.kind) {
                case StratumKind::H: EXPECT_EQ(rb, s.rho); break;
                case StratumKind::E: EXPECT_EQ(rb, rc); break;
                case StratumKind::D1: d1.insert(s.rho); EXPECT_TRUE((rb & ~rc) == 0 && rb != rc); break;
                case StratumKind::D2: d2.insert(s.rho); break;
                case StratumKind::D3: d3.insert(s.rho); EXPECT_TRUE((rc & ~rb) == 0 && rb != rc); break;
                default: ADD_FAILURE();
            }
        }
        std::set<MarkMask> img;
        for (MarkMask r : d1) img.insert(complement(sp, bar_mask(r)));
        EXPECT_EQ(img, d2);
        for (MarkMask r : d3) EXPECT_TRUE(d3.count(bar_mask(r)));
        EXPECT_EQ(d3.size() % 2, 0u);
    }
}

TEST(Schedule, Examples) {
    auto s5 = schedule(5, false);
    EXPECT_EQ(s5.size(), 10);
    for (auto& st : s5.steps) EXPECT_EQ(st.type, BlowupType::Holomorphic);
    auto count = [](const BlowupSchedule& s, BlowupType t) {
        int n = 0;
        for (auto& st : s.steps) n += st.type == t;
        return n;
    };
    auto r2 = schedule(2, true);
    EXPECT_EQ(r2.size(), 3);
    EXPECT_EQ(count(r2, BlowupType::Real), 1);
    EXPECT_EQ(count(r2, BlowupType::Augmented), 2);
    auto r3 = schedule(3, true);
    EXPECT_EQ(r3.size(), 19);
    EXPECT_EQ(count(r3, BlowupType::Real), 3);
    EXPECT_EQ(count(r3, BlowupType::Augmented), 4);
    EXPECT_EQ(count(r3, BlowupType::Complex), 12);
}

TEST(Schedule, LinearExtension) {
    for (int ell = 3; ell <= 8; ++ell) EXPECT_TRUE(is_linear_extension(schedule(ell, false)));
    for (int ell = 2; ell <= 5; ++ell) EXPECT_TRUE(is_linear_extension(schedule(ell, true)));
    auto s = schedule(5, false);
    for (int k = 0; k < s.size(); ++k) EXPECT_EQ(s.steps[k].predecessor, k);
}

TEST(StratumEdge, Examples) {
    auto s = fixtures::split_tree(4, {1, 2});
    auto e = stratum_edge(s, marks_to_mask({1, 2}));
    ASSERT_TRUE(e);
    EXPECT_EQ(e->tail, 0);
    EXPECT_FALSE(stratum_edge(one_vertex_tree({5, false}), marks_to_mask({1, 2})));
    auto f = stratum_edge(fixtures::fig2_tree(), marks_to_mask({1, 2, 3}));
    ASSERT_TRUE(f);
    EXPECT_EQ(f->tail, fixtures::V);
    EXPECT_EQ(f->head, fixtures::VP);
}

TEST(NeighborCompat, Examples) {
    MarkSpace sp{5, false};
    EXPECT_TRUE(neighbor_compat(sp, marks_to_mask({1, 2}), marks_to_mask({1, 2, 4}), NestMode::EllPlusOne));
    EXPECT_FALSE(neighbor_compat(sp, marks_to_mask({1, 2}), marks_to_mask({1, 3}), NestMode::EllPlusOne));
    MarkSpace s4{4, false};
    MarkMask a = marks_to_mask({1, 2}), b = marks_to_mask({1, 3, 4});
    EXPECT_TRUE(neighbor_compat(s4, a, b, NestMode::Ell));
    EXPECT_FALSE(neighbor_compat(s4, a, b, NestMode::EllPlusOne));
}

// Stratum edges of indices above any rho* point into a common subtree.
TEST(StratumEdge, CommonSubtreeOnEveryTree) {
    for (bool real : {false, true}) {
        int ell = real ? 3 : 6;
        auto sched = schedule(ell, real);
        for (const auto& t : enumerate_trees(ell, real))
            for (int rs = 0; rs <= sched.size(); ++rs) {
                std::vector<int> common(t.nv, 1);
                for (auto& lab : sched.above(rs)) {
                    auto e = stratum_edge(t, lab.rho);
                    if (!e) continue;
                    std::vector<int> in(t.nv, 0);
                    for (int v : side_vertices(t, e->tail, e->head)) in[v] = 1;
                    for (int v = 0; v < t.nv; ++v) common[v] &= in[v];
                }
                EXPECT_GT(std::count(common.begin(), common.end(), 1), 0);
            }
    }
}
