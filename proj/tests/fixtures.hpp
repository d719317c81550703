#pragma once

#include "dmlab/trees.hpp"

namespace fixtures {

// The 11-marked tree of the worked example: v carries 1,2,3; v' is central;
// a carries 4,5; b carries 6; c carries 7,8; d carries 9,10,11.
enum { V = 0, VP = 1, A = 2, B = 3, C = 4, D = 5 };

inline dmlab::MarkedTree fig2_tree() {
    dmlab::MarkedTree t;
    t.space = {11, false};
    t.nv = 6;
    t.edges = {{V, VP}, {VP, A}, {VP, B}, {B, C}, {B, D}};
    t.normalize_edges();
    t.mu = {-1, V, V, V, A, A, B, C, C, D, D, D};
    return t;
}

// Two vertices: marks in `left` at vertex 0, the rest at vertex 1.
inline dmlab::MarkedTree split_tree(int ell, std::vector<int> left) {
    dmlab::MarkedTree t;
    t.space = {ell, false};
    t.nv = 2;
    t.edges = {{0, 1}};
    t.mu.assign(ell + 1, 1);
    t.mu[0] = -1;
    for (int m : left) t.mu[m] = 0;
    return t;
}

}  // namespace fixtures
