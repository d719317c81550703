// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "closure_oracle.hpp"
#include "dmlab/suites.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "slice_oracle.hpp"
#include "smoothing_oracle.hpp"

using namespace dmlab;

namespace {

// Wall-clock budgets in seconds.
constexpr double kCrBudget = 5.0;
constexpr double kReconstructBudget = 120.0;
constexpr double kQuotientBudget = 300.0;

// Sample sizes.
constexpr int kCrQuintuples = 1000;
constexpr int kCurvesPerTree = 200;
constexpr int kRandomPerConfig = 50;  // 22 configurations each for l=4 complex and l=2 real
constexpr int kRandomMinimum = 1000;
constexpr int kLocalPoints = 500;

struct Outcome {
    bool pass = true;
    std::string note;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            if (note.size() < 400) note += (note.empty() ? "" : "; ") + what;
        }
    }
};

int failures = 0;

void run(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs,
                o.note.empty() ? "" : " -- ", o.note.c_str());
    std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

oracle::Cx to_cx(const ProjPoint& p) {
    if (p.is_inf()) return oracle::infinity();
    return oracle::mk(p.a().re().to_mpq(), p.a().im().to_mpq());
}

std::vector<Quad> ordered_quads(const MarkSpace& sp) {
    std::vector<Quad> out;
    auto ms = sp.marks();
    for (Mark a : ms)
        for (Mark b : ms)
            for (Mark c : ms)
                for (Mark d : ms)
                    if (a != b && a != c && a != d && b != c && b != d && c != d) out.push_back({a, b, c, d});
    return out;
}

}  // namespace

int main() {
    run(1, "cross-ratio relations on 10^3 random quintuples", [](Outcome& o) {
        auto t0 = std::chrono::steady_clock::now();
        auto rep = cr_relation_suite(kCrQuintuples, 20260101);
        o.require(rep.ok(), std::to_string(rep.failures) + " relation failures");
        o.require(rep.quintuples == kCrQuintuples, "sample count");
        // the cross ratio itself against the classical formula
        Rng rng(20260102);
        for (int k = 0; k < kCrQuintuples; ++k) {
            std::array<ProjPoint, 4> z;
            for (bool ok = false; !ok;) {
                for (auto& p : z) p = random_point(rng, 30, 8);
                ok = z[0] != z[1] && z[0] != z[2] && z[0] != z[3] && z[1] != z[2] && z[1] != z[3] && z[2] != z[3];
            }
            auto want = oracle::cross_ratio(to_cx(z[0]), to_cx(z[1]), to_cx(z[2]), to_cx(z[3]));
            if (!oracle::same(to_cx(cross_ratio(z[0], z[1], z[2], z[3])), want)) {
                o.require(false, "classical formula disagrees");
                break;
            }
        }
        o.require(elapsed(t0) < kCrBudget, "over the 5 s budget");
    });

    run(2, "M4-bar boundary values {1, 0, inf} against the smoothing limit", [](Outcome& o) {
        struct Case {
            std::vector<int> left;
            ProjPoint want;
        };
        std::vector<Case> cases = {{{1, 2}, ProjPoint(1)}, {{1, 3}, ProjPoint(0)},
                                   {{1, 4}, ProjPoint::inf()}, {{2, 3}, ProjPoint::inf()}};
        Rng rng(41);
        auto qs = ordered_quads({4, false});
        int compared = 0;
        for (auto& cs : cases) {
            int used = 0;
            for (int k = 0; k < 200 && used < 50; ++k) {
                StableCurve c = sample_curve(fixtures::split_tree(4, cs.left), 20, rng);
                if (c.node(0, 1).is_inf() || c.node(1, 0).is_inf()) continue;
                bool finite = true;
                for (int m = 1; m <= 4; ++m) finite &= !c.mark_pos[m].is_inf();
                if (!finite) continue;
                ++used;
                o.require(cross_ratio_q(c, {1, 2, 3, 4}) == cs.want, "CR_1234 on split " + std::to_string(cs.left[0]) +
                                                                         std::to_string(cs.left[1]));
                for (auto& q : qs) {
                    ++compared;
                    if (cross_ratio_q(c, q) != oracle::smoothing_limit(c, q)) {
                        o.require(false, "smoothing limit mismatch");
                        return;
                    }
                }
            }
            o.require(used > 0, "no usable sample");
        }
        o.note += o.pass ? std::to_string(compared) + " ordered quadruples" : "";
    });

    run(3, "|Q_Gamma| = l-3 on every tree (l=3..7); 4 and 26 trees for l=4,5", [](Outcome& o) {
        for (int ell = 3; ell <= 7; ++ell) {
            auto trees = enumerate_trees(ell, false);
            o.require((long long)trees.size() == oracle::compatible_split_sets(ell, false),
                      "tree count l=" + std::to_string(ell));
            for (auto& t : trees)
                if (gamma_basis(t).size() != ell - 3) o.require(false, "basis size on " + canonical_form(t));
        }
        o.require(enumerate_trees(4, false).size() == 4, "l=4 count");
        o.require(enumerate_trees(5, false).size() == 26, "l=5 count");
    });

    run(4, "reconstruction equals cross_ratio_q, l=4,5,6, 200 curves per tree", [](Outcome& o) {
        auto t0 = std::chrono::steady_clock::now();
        long long quads = 0;
        for (int ell = 4; ell <= 6; ++ell) {
            auto rep = basis_suite(ell, false, kCurvesPerTree, 4000 + ell);
            o.require(rep.ok(), std::to_string(rep.mismatches()) + " mismatches at l=" + std::to_string(ell));
            for (auto& c : rep.cases) {
                quads += c.quadruples;
                o.require(c.curves == kCurvesPerTree, "curve count");
            }
        }
        // direct evaluation path on a subsample
        for (auto& t : enumerate_trees(5, false)) {
            auto b = gamma_basis(t);
            auto c = sample_curve(t, 7, 77);
            Reconstructor r(b, basis_values(b, c));
            for (auto& q : ordered_quads({5, false}))
                if (r.value(q) != cross_ratio_q(c, q)) o.require(false, "direct path on " + canonical_form(t));
        }
        o.require(elapsed(t0) < kReconstructBudget, "over the 2 min budget");
        if (o.pass) o.note = std::to_string(quads) + " ordered quadruples";
    });

    run(5, "|A_l| and |A_l^+-| closed forms, l=3..8", [](Outcome& o) {
        for (int ell = 3; ell <= 8; ++ell) {
            long long a = (long long)build_a_ell(ell).size(), pm = (long long)build_a_ell_pm(ell).size();
            o.require(a == (1LL << (ell - 1)) - ell - 1 && a == oracle::brute_count(ell, false),
                      "A_l at l=" + std::to_string(ell));
            o.require(pm == (1LL << (2 * ell - 1)) - 2 * ell - 1 && pm == oracle::brute_count(ell, true),
                      "A_l^+- at l=" + std::to_string(ell));
        }
    });

    run(6, "real classification: (H,E)=(1,2) at l=2, 6 divisors at l=3, D1/D2/D3 pairing", [](Outcome& o) {
        auto k2 = count_kinds(build_a_ell_real(2));
        o.require(k2.H == 1 && k2.E == 2 && k2.total() == 3, "l=2 kinds");
        auto k3 = count_kinds(build_a_ell_real(3));
        o.require(k3.divisors() == 6, "l=3 divisors = " + std::to_string(k3.divisors()));
        for (int ell = 2; ell <= 5; ++ell) {
            MarkSpace sp{ell, true};
            std::set<MarkMask> d1, d2, d3;
            for (auto& s : build_a_ell_real(ell)) {
                MarkMask rb = bar_mask(s.rho), rc = complement(sp, s.rho);
                switch (s.kind) {
                    case StratumKind::H: o.require(rb == s.rho, "H label"); break;
                    case StratumKind::E: o.require(rb == rc, "E label"); break;
                    case StratumKind::D1: d1.insert(s.rho); break;
                    case StratumKind::D2: d2.insert(s.rho); break;
                    case StratumKind::D3: d3.insert(s.rho); break;
                    default: o.require(false, "unclassified label");
                }
            }
            std::set<MarkMask> img;
            for (MarkMask r : d1) img.insert(complement(sp, bar_mask(r)));
            o.require(img == d2, "D1 -> D2 pairing at l=" + std::to_string(ell));
            for (MarkMask r : d3) o.require(d3.count(bar_mask(r)) > 0, "D3 conjugate pairing");
        }
    });

    run(7, "schedules: 10 holomorphic (l=5), (1,2) real l=2, (3,4,12) real l=3, linear extensions", [](Outcome& o) {
        auto count = [](const BlowupSchedule& s, BlowupType t) {
            int n = 0;
            for (auto& st : s.steps) n += st.type == t;
            return n;
        };
        auto c5 = schedule(5, false);
        o.require(c5.size() == 10 && count(c5, BlowupType::Holomorphic) == 10, "l=5 complex");
        auto r2 = schedule(2, true);
        o.require(r2.size() == 3 && count(r2, BlowupType::Real) == 1 && count(r2, BlowupType::Augmented) == 2,
                  "l=2 real");
        auto r3 = schedule(3, true);
        o.require(count(r3, BlowupType::Real) == 3 && count(r3, BlowupType::Augmented) == 4 &&
                      count(r3, BlowupType::Complex) == 12 && r3.size() == 19,
                  "l=3 real");
        for (int ell = 3; ell <= 8; ++ell) o.require(is_linear_extension(schedule(ell, false)), "complex order");
        for (int ell = 2; ell <= 5; ++ell) o.require(is_linear_extension(schedule(ell, true)), "real order");
    });

    run(8, "quotient injectivity: l=4 complex and l=2 real, all rho*, zero discrepancies", [](Outcome& o) {
        auto t0 = std::chrono::steady_clock::now();
        std::string summary;
        for (auto [ell, real] : {std::pair{4, false}, std::pair{2, true}}) {
            auto rep = quotient_suite(ell, real, kRandomPerConfig, 8000 + ell);
            const auto& in = rep.injectivity;
            std::string tag = std::to_string(ell) + (real ? "R" : "C");
            o.require(in.ok(), tag + ": " + std::to_string(in.key_collisions_across_classes) + " collisions, " +
                                   std::to_string(in.intra_class_key_splits) + " splits");
            o.require(rep.random_samples >= kRandomMinimum, tag + ": too few random samples");
            summary += tag + " " + std::to_string(rep.configurations) + " cases/" + std::to_string(in.samples) +
                       " samples/" + std::to_string(in.classes) + " classes ";
            // the closure itself against the brute-force pairwise oracle
            auto sched = schedule(ell, real);
            Rng rng(8100 + ell);
            for (auto& t : enumerate_trees(ell, real)) {
                std::vector<StableCurve> f;
                for (auto& s : engineered_fiber(sample_curve(t, 6, rng), rng)) f.push_back(s.curve);
                for (int r = 0; r <= sched.size(); ++r)
                    if (!oracle::same_partition(relation_closure(f, r, real), oracle::pairwise_closure(f, r, real)))
                        o.require(false, tag + ": closure differs from pairwise oracle");
            }
        }
        o.require(elapsed(t0) < kQuotientBudget, "over the 5 min budget");
        if (o.pass) o.note = summary;
    });

    run(9, "Y identities on engineered boundary samples", [](Outcome& o) {
        std::string summary;
        for (auto [ell, real] : {std::pair{4, false}, std::pair{5, false}, std::pair{2, true}, std::pair{3, true}}) {
            auto rep = y_identity_suite(ell, real, 9000 + ell);
            std::string tag = std::to_string(ell) + (real ? "R" : "C");
            o.require(rep.ok(), tag + ": " + (rep.counterexamples.empty() ? "no checks" : rep.counterexamples.front()));
            o.require(rep.hits["split"] > 0, tag + ": no nonempty Y0 class");
            if (real) o.require(rep.hits["H"] > 0, tag + ": no H sample");
            if (real && ell == 3) {
                o.require(rep.hits["D1"] > 0, "3R: no D1 sample");
                o.require(rep.hits["D2"] + rep.hits["D3"] > 0, "3R: no D2/D3 sample");
            }
            summary += tag + " " + std::to_string(rep.checked) + " ";
        }
        if (o.pass) o.note = summary + "checks";
    });

    run(10, "local models: cocycle, relation tables with corrupted control, blowdown injectivity", [](Outcome& o) {
        for (const char* name : {"real3", "complex2"}) {
            auto rep = cocycle_suite(preset_model(name), kLocalPoints, 10001);
            o.require(rep.checked == kLocalPoints && rep.failures == 0, std::string(name) + " cocycle");
        }
        for (const auto& name : preset_names()) {
            auto rep = lemma_suite(preset_model(name), kLocalPoints, 10002);
            o.require(rep.points == kLocalPoints && rep.ok(), name + " relation table");
            o.require(rep.control_detected(), name + " corrupted chart not detected");
            auto inj = injectivity_suite(preset_model(name), kLocalPoints, 10003);
            o.require(inj.ok() && inj.shared_images > 0, name + " blowdown injectivity");
        }
        o.require(injectivity_suite(preset_model("aug31"), kLocalPoints, 10004, 6, false).collisions > 0,
                  "unglued control not detected");
    });

    run(11, "real slice accepts real curves and rejects perturbed assignments, l=2,3", [](Outcome& o) {
        int accepted_real = 0, rejected = 0, h_rejections = 0;
        for (int ell = 2; ell <= 3; ++ell)
            for (auto& t : enumerate_trees(ell, true)) {
                auto b = gamma_basis(t);
                auto qs = b.quads();
                for (std::uint64_t s = 0; s < 10; ++s) {
                    auto c = sample_curve(t, 7, derive_seed(1100 + ell, s));
                    auto vals = basis_values(b, c);
                    if (real_slice_check(b, vals)) ++accepted_real;
                    else o.require(false, "real curve rejected on " + canonical_form(t));
                    for (std::size_t n = 0; n < vals.size(); ++n)
                        for (GaussRat shift : {GaussRat(Rational(0), Rational(1, 7)), GaussRat(Rational(2, 7))}) {
                            auto bad = vals;
                            bad[n] = bad[n].is_inf() ? ProjPoint(shift) : ProjPoint(bad[n].a() + shift);
                            bool acc;
                            try {
                                acc = real_slice_check(b, bad);
                            } catch (const ChartDomainError&) {
                                acc = false;
                            }
                            // non-real exactly when the full conjugation identity fails
                            if (acc != oracle::real_locus_full(b, bad))
                                o.require(false, "disagrees with the full identity on " + canonical_form(t));
                            rejected += !acc;
                            int ei = int(n) - int(qs.size() - b.edge_quads.size());
                            if (ei >= 0 && !shift.is_real()) {
                                auto e = b.edge_quads[ei].e;
                                if (edge_kind(t, {std::min(e.tail, e.head), std::max(e.tail, e.head)}) ==
                                    EdgeKind::H) {
                                    if (acc) o.require(false, "imaginary shift across an H edge accepted");
                                    ++h_rejections;
                                }
                            }
                        }
                }
            }
        o.require(rejected > 0 && h_rejections > 0, "no rejections exercised");
        if (o.pass)
            o.note = std::to_string(accepted_real) + " real accepted, " + std::to_string(rejected) + " perturbed rejected";
    });

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
