#pragma once
// Seeded exact samplers. All randomness flows through an explicit engine.

#include <cstdint>
#include <random>

#include "dmlab/exactfield.hpp"

namespace dmlab {

using Rng = std::mt19937_64;

// Per-case seed derived from a master seed and a case id (splitmix64 mixing).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t case_id) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (case_id + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// n/d with |n| <= bound and 1 <= d <= bound.
inline Rational random_rational(Rng& rng, long long bound) {
    if (bound < 1) throw InvalidArgument("coefficient bound must be >= 1");
    std::uniform_int_distribution<long long> num(-bound, bound), den(1, bound);
    long long n = num(rng), d = den(rng);
    return Rational(n, d);
}

inline GaussRat random_gauss(Rng& rng, long long bound, bool real_only = false) {
    Rational re = random_rational(rng, bound);
    if (real_only) return GaussRat(re);
    return GaussRat(re, random_rational(rng, bound));
}

// Finite point, or infinity with probability 1/inf_weight (0 disables infinity).
inline ProjPoint random_point(Rng& rng, long long bound, int inf_weight = 0, bool real_only = false) {
    if (inf_weight > 0 && std::uniform_int_distribution<int>(0, inf_weight - 1)(rng) == 0)
        return ProjPoint::inf();
    return ProjPoint(random_gauss(rng, bound, real_only));
}

}  // namespace dmlab
