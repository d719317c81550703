#pragma once
// Verification suites shared by the CLI and the acceptance runner.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dmlab/charts.hpp"
#include "dmlab/curves.hpp"
#include "dmlab/localmodels.hpp"
#include "dmlab/quotient.hpp"
#include "dmlab/sampling.hpp"
#include "dmlab/strata.hpp"
#include "dmlab/trees.hpp"

namespace dmlab {

// DM_LAB_THREADS caps the pool; default is the hardware concurrency.
inline int worker_count() {
    int hw = int(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("DM_LAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return std::min(n, hw * 4);
    }
    return hw;
}

// Runs job(k) for k in [0, n) on the pool. Results must be written by index.
inline void parallel_for(int n, const std::function<void(int)>& job, int threads = worker_count()) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int k = 0; k < n; ++k) job(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int k; (k = next++) < n;) {
                try {
                    job(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------- cross ratios

struct CrReport {
    int quintuples = 0;
    int relations = 0;
    int failures = 0;
    std::vector<std::string> counterexamples;
    bool ok() const { return failures == 0 && quintuples > 0; }
};

// Symmetries, complement, 1 - x, x/(x-1) and the product rule on distinct random quintuples.
inline CrReport cr_relation_suite(int n, std::uint64_t seed, long long bound = 30) {
    Rng rng(seed);
    CrReport rep;
    for (int k = 0; k < n; ++k) {
        std::array<ProjPoint, 5> z;
        for (bool ok = false; !ok;) {
            for (auto& p : z) p = random_point(rng, bound, 8);
            ok = true;
            for (int a = 0; a < 5; ++a)
                for (int b = a + 1; b < 5; ++b) ok &= z[a] != z[b];
        }
        const ProjPoint &i = z[0], &j = z[1], &kk = z[2], &m = z[3], &nn = z[4];
        ProjPoint x = cross_ratio(i, j, kk, m);
        ProjPoint mobius = ProjPoint(-x.a() / x.one_minus().a());
        std::vector<std::pair<const char*, bool>> checks = {
            {"CR(k,m,i,j) = x", cross_ratio(kk, m, i, j) == x},
            {"CR(j,i,k,m) = 1/x", cross_ratio(j, i, kk, m) == x.inverse()},
            {"CR(i,j,m,k) = 1/x", cross_ratio(i, j, m, kk) == x.inverse()},
            {"CR(m,j,k,i) = 1-x", cross_ratio(m, j, kk, i) == x.one_minus()},
            {"CR(i,k,j,m) = 1-x", cross_ratio(i, kk, j, m) == x.one_minus()},
            {"CR(k,j,i,m) = x/(x-1)", cross_ratio(kk, j, i, m) == mobius},
            {"CR(i,m,k,j) = x/(x-1)", cross_ratio(i, m, kk, j) == mobius},
            {"CR(i,j,k,m) CR(i,j,m,n) = CR(i,j,k,n)",
             proj_mul(x, cross_ratio(i, j, m, nn)) == cross_ratio(i, j, kk, nn)},
        };
        ++rep.quintuples;
        for (auto& [name, ok] : checks) {
            ++rep.relations;
            if (!ok) {
                ++rep.failures;
                if (rep.counterexamples.size() < 10)
                    rep.counterexamples.push_back(std::string(name) + " at (" + i.str() + "," + j.str() + "," +
                                                  kk.str() + "," + m.str() + "," + nn.str() + ")");
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------- bases

struct BasisCase {
    std::string tree;
    int basis_size = 0;
    int expected_size = 0;
    int curves = 0;
    int quadruples = 0;
    int mismatches = 0;
    int domain_errors = 0;
    bool ok() const { return basis_size == expected_size && mismatches == 0 && domain_errors == 0; }
};

struct BasisReport {
    int ell = 0;
    bool real = false;
    std::vector<BasisCase> cases;
    int mismatches() const {
        int n = 0;
        for (auto& c : cases) n += c.mismatches + c.domain_errors + (c.basis_size != c.expected_size);
        return n;
    }
    bool ok() const { return !cases.empty() && mismatches() == 0; }
};

// Every tree: |Q_Gamma| = dim, and every ordered quadruple of `samples` curves is reconstructed.
inline BasisReport basis_suite(int ell, bool real, int samples, std::uint64_t seed, long long bound = 7) {
    BasisReport rep;
    rep.ell = ell;
    rep.real = real;
    auto trees = enumerate_trees(ell, real);
    rep.cases.resize(trees.size());
    parallel_for(int(trees.size()), [&](int k) {
        const MarkedTree& t = trees[k];
        BasisCase& bc = rep.cases[k];
        bc.tree = canonical_form(t);
        ChartBasis b = gamma_basis(t);
        bc.basis_size = b.size();
        bc.expected_size = t.space.count() - 3;
        Rng rng(derive_seed(seed, k));
        for (int s = 0; s < samples; ++s) {
            StableCurve c = sample_curve(t, bound, rng);
            ++bc.curves;
            try {
                bc.mismatches += int(reconstruction_mismatches(b, c).size());
            } catch (const ChartDomainError&) {
                ++bc.domain_errors;
            }
        }
        int n = t.space.count();
        bc.quadruples = bc.curves * n * (n - 1) * (n - 2) * (n - 3);
    });
    return rep;
}

// ---------------------------------------------------------------- quotient

struct YIdentityReport {
    int checked = 0;
    int failures = 0;
    std::map<std::string, int> hits;  // rows with a nonempty left-hand side
    std::vector<std::string> counterexamples;
    bool ok() const { return failures == 0 && checked > 0; }
    void fail(const std::string& what) {
        ++failures;
        if (counterexamples.size() < 10) counterexamples.push_back(what);
    }
};

namespace detail {

inline std::map<int, bool> class_meets(const Partition& p, const std::vector<StableCurve>& cs,
                                       const std::function<bool(const StableCurve&)>& pred) {
    std::map<int, bool> out;
    for (std::size_t k = 0; k < cs.size(); ++k) out[p[k]] = out[p[k]] || pred(cs[k]);
    return out;
}

}  // namespace detail

// On engineered fibers over one base curve per tree: the class-level splitting
// Y^0_rho = Y^+_rho ∩ Y^0_{[l]-{i}} for i outside rho, and for real curves the kind coincidences
// Y^0 = Y^+ of the complement of the conjugate (D1) and Y^0 = Y^- (H, D2, D3).
inline YIdentityReport y_identity_suite(int ell, bool real, std::uint64_t seed, long long bound = 6) {
    YIdentityReport rep;
    auto sched = schedule(ell, real);
    MarkSpace sp{ell, real};
    Rng rng(seed);
    for (auto& t : enumerate_trees(ell, real)) {
        std::vector<StableCurve> f;
        for (auto& s : engineered_fiber(sample_curve(t, bound, rng), rng, bound)) f.push_back(std::move(s.curve));
        for (int r = 0; r <= sched.size(); ++r) {
            auto p = relation_closure(f, r, real);
            for (auto& lab : sched.above(r)) {
                MarkMask rho = lab.rho;
                auto y0 = detail::class_meets(p, f, [&](auto& c) { return y_membership(c, rho, Bullet::Zero); });
                auto yp = detail::class_meets(p, f, [&](auto& c) { return y_membership(c, rho, Bullet::Plus); });
                for (Mark i : mask_to_marks(complement(sp, rho))) {
                    MarkMask hat = sp.all() & ~bit(i);
                    auto yi = detail::class_meets(p, f, [&](auto& c) { return y_membership(c, hat, Bullet::Zero); });
                    for (auto& [cls, in0] : y0) {
                        ++rep.checked;
                        if (in0) rep.hits["split"]++;
                        if (in0 != (yp[cls] && yi[cls]))
                            rep.fail("Y0 split " + sp.label_set(rho) + " i=" + sp.label(i) + " on " + canonical_form(t));
                    }
                }
            }
        }
        if (!real) continue;
        for (auto& c : f)
            for (auto& lab : build_a_ell_real(ell)) {
                MarkMask rho = lab.rho;
                bool zero = y_membership(c, rho, Bullet::Zero);
                bool ok = true;
                std::string row;
                switch (lab.kind) {
                    case StratumKind::D1:
                        row = "D1";
                        ok = zero == y_membership(c, complement(sp, bar_mask(rho)), Bullet::Plus);
                        break;
                    case StratumKind::H:
                    case StratumKind::D2:
                    case StratumKind::D3:
                        row = kind_name(lab.kind);
                        ok = zero == y_membership(c, rho, Bullet::Minus) &&
                             zero == in_D_tilde(c, rho, Bullet::DoublePrime);
                        break;
                    default: continue;
                }
                ++rep.checked;
                if (zero) rep.hits[row]++;
                if (!ok) rep.fail(row + " coincidence " + sp.label_set(rho) + " on " + canonical_serialization(c));
            }
    }
    return rep;
}

struct QuotientSuiteReport {
    int ell = 0;
    bool real = false;
    int configurations = 0;
    int random_samples = 0;
    InjectivityReport injectivity;
    YIdentityReport y;
    bool ok() const { return injectivity.ok() && y.ok() && configurations > 0; }
};

// Every tree, every rho* (rank 0 = bottom through the top index) and every v+ in V_Gamma(rho*).
inline QuotientSuiteReport quotient_suite(int ell, bool real, int n_random, std::uint64_t seed,
                                          long long bound = 6) {
    QuotientSuiteReport rep;
    rep.ell = ell;
    rep.real = real;
    auto sched = schedule(ell, real);
    struct Config {
        MarkedTree t;
        int rank, v;
    };
    std::vector<Config> configs;
    for (auto& t : enumerate_trees(ell, real))
        for (int r = 0; r <= sched.size(); ++r)
            for (int v : v_gamma(t, sched, r)) configs.push_back({t, r, v});
    std::vector<InjectivityReport> parts(configs.size());
    parallel_for(int(configs.size()), [&](int k) {
        parts[k] = verify_injectivity(configs[k].t, configs[k].rank, configs[k].v, n_random, derive_seed(seed, k),
                                      real, 2, bound);
    });
    for (auto& p : parts) rep.injectivity.merge(p);
    rep.configurations = int(configs.size());
    rep.random_samples = rep.configurations * n_random;
    rep.y = y_identity_suite(ell, real, derive_seed(seed, 1u << 20), bound);
    return rep;
}

}  // namespace dmlab
