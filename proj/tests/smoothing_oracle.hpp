#pragma once
// Boundary values of M_4-bar as limits of an explicit smoothing family.

#include <array>
#include <vector>

#include "dmlab/curves.hpp"

namespace oracle {

using dmlab::GaussRat;
using dmlab::ProjPoint;
using dmlab::StableCurve;
using Q = std::array<dmlab::Mark, 4>;

// Polynomials in a smoothing parameter t with Gaussian-rational coefficients.
using Poly = std::vector<GaussRat>;

inline Poly pmul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, GaussRat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}
inline Poly psub(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), GaussRat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}
inline std::size_t order(const Poly& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!p[i].is_zero()) return i;
    return p.size();
}

// Limit t -> 0 of the cross ratio of a one-parameter family of finite points.
inline ProjPoint limit_cr(const std::array<Poly, 4>& z) {
    Poly num = pmul(psub(z[0], z[2]), psub(z[1], z[3]));
    Poly den = pmul(psub(z[0], z[3]), psub(z[1], z[2]));
    std::size_t a = order(num), b = order(den);
    if (a > b) return ProjPoint(0);
    if (a < b) return ProjPoint::inf();
    return ProjPoint(num[a] / den[b]);
}

// Smoothing of a two-component curve: component 0 is rescaled into a disc around
// the node of component 1. On component 0 the node is moved to infinity, on
// component 1 to the origin; then z = t * u.
inline ProjPoint smoothing_limit(const StableCurve& c, const Q& q) {
    const ProjPoint& n0 = c.node(0, 1);
    const ProjPoint& n1 = c.node(1, 0);
    std::array<Poly, 4> z;
    for (int k = 0; k < 4; ++k) {
        const ProjPoint& p = c.mark_pos[q[k]];
        if (c.tree.mu[q[k]] == 0) {
            GaussRat u = (p.a() - n0.a()).inverse();
            z[k] = {GaussRat(0), u};
        } else {
            z[k] = {p.a() - n1.a()};
        }
    }
    return limit_cr(z);
}

}  // namespace oracle
