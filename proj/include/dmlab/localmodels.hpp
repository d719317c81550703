#pragma once
// Local blowup models over the model space F^c x R^m with Y = 0 x R^m and the identity base chart.
// Standard real/complex blowups and the (c, c1)-augmented real blowup, as exact chart atlases.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dmlab/errors.hpp"
#include "dmlab/exactfield.hpp"
#include "dmlab/sampling.hpp"

namespace dmlab {

enum class ModelKind { Real, Complex, Augmented };

// For Complex, c counts complex normal coordinates.
struct Model {
    ModelKind kind = ModelKind::Real;
    int c = 1;
    int c1 = 0;
    int m = 0;

    int c2() const { return c - c1; }
    int dim() const { return c + m; }
    bool augmented() const { return kind == ModelKind::Augmented; }

    std::string name() const {
        switch (kind) {
            case ModelKind::Real: return "real(" + std::to_string(c) + "," + std::to_string(m) + ")";
            case ModelKind::Complex: return "complex(" + std::to_string(c) + "," + std::to_string(m) + ")";
            default:
                return "augmented(" + std::to_string(c) + "," + std::to_string(c1) + "," + std::to_string(m) + ")";
        }
    }

    void validate() const {
        if (c < 1 || m < 0) throw InvalidArgument("model needs c >= 1 and m >= 0");
        if (augmented() && (c1 < 1 || c1 > c - 1)) throw InvalidArgument("augmented model needs 1 <= c1 <= c-1");
    }
};

inline Model real_model(int c, int m = 1) { return {ModelKind::Real, c, 0, m}; }
inline Model complex_model(int c, int m = 1) { return {ModelKind::Complex, c, 0, m}; }
inline Model augmented_model(int c, int c1, int m = 1) { return {ModelKind::Augmented, c, c1, m}; }

inline Model preset_model(const std::string& name) {
    if (name == "real3") return real_model(3);
    if (name == "complex2") return complex_model(2);
    if (name == "aug31") return augmented_model(3, 1);
    throw InvalidArgument("unknown local model preset '" + name + "'");
}

inline std::vector<std::string> preset_names() { return {"real3", "complex2", "aug31"}; }

// Standard charts are family 1 with i in [c]; augmented charts are (1, i in [c1]) and (2, i in {0..c1}).
struct ChartId {
    int k = 1;
    int i = 1;
    friend bool operator==(const ChartId& a, const ChartId& b) { return a.k == b.k && a.i == b.i; }
    friend bool operator!=(const ChartId& a, const ChartId& b) { return !(a == b); }
    std::string str() const { return "(" + std::to_string(k) + "," + std::to_string(i) + ")"; }
};

inline std::vector<ChartId> charts_of(const Model& md) {
    std::vector<ChartId> out;
    if (!md.augmented()) {
        for (int i = 1; i <= md.c; ++i) out.push_back({1, i});
    } else {
        for (int i = 1; i <= md.c1; ++i) out.push_back({1, i});
        for (int i = 0; i <= md.c1; ++i) out.push_back({2, i});
    }
    return out;
}

inline bool valid_chart(const Model& md, const ChartId& ch) {
    if (!md.augmented()) return ch.k == 1 && ch.i >= 1 && ch.i <= md.c;
    if (ch.k == 1) return ch.i >= 1 && ch.i <= md.c1;
    return ch.k == 2 && ch.i >= 0 && ch.i <= md.c1;
}

struct BlowupPoint {
    Model model;
    ChartId chart;
    std::vector<GaussRat> coords;  // c line/normal coordinates, then m base coordinates

    void validate() const {
        model.validate();
        if (!valid_chart(model, chart)) throw InvalidArgument("chart " + chart.str() + " is not a chart of " + model.name());
        if (int(coords.size()) != model.dim()) throw InvalidArgument("point needs " + std::to_string(model.dim()) + " coordinates");
        for (int j = 0; j < model.dim(); ++j) {
            bool must_be_real = model.kind != ModelKind::Complex || j >= model.c;
            if (must_be_real && !coords[j].is_real())
                throw InvalidArgument("coordinate " + std::to_string(j + 1) + " must be real");
        }
    }
};

// Chart-free description of a blown-up point.
// Family 1: a point x of F^c on the line [b] (b normalized so its first nonzero entry is 1).
// Family 2 (augmented only): a line [a] in RP^{c1} (indices 0..c1, normalized) and lambda = b, with v_ij = a_i b_j.
struct Intrinsic {
    int family = 1;
    std::vector<GaussRat> a, b, s;

    std::string key() const {
        std::string out = std::to_string(family) + "|";
        for (const auto& x : a) out += x.str() + ",";
        out += "|";
        for (const auto& x : b) out += x.str() + ",";
        out += "|";
        for (const auto& x : s) out += x.str() + ",";
        return out;
    }
};

namespace detail {

inline bool all_zero(const std::vector<GaussRat>& v, std::size_t from = 0, std::size_t to = std::size_t(-1)) {
    to = std::min(to, v.size());
    for (std::size_t j = from; j < to; ++j)
        if (!v[j].is_zero()) return false;
    return true;
}

inline int first_nonzero(const std::vector<GaussRat>& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
        if (!v[j].is_zero()) return int(j);
    return -1;
}

inline GaussRat sum_squares(const std::vector<GaussRat>& v) {
    GaussRat acc(0);
    for (const auto& x : v) acc = acc + x * x;
    return acc;
}

inline std::vector<GaussRat> scaled(const std::vector<GaussRat>& v, const GaussRat& f) {
    std::vector<GaussRat> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x * f);
    return out;
}

inline Intrinsic normalized(Intrinsic p) {
    int k = first_nonzero(p.family == 1 ? p.b : p.a);
    if (k < 0) throw InvalidArgument("degenerate line in blown-up point");
    if (p.family == 1) {
        GaussRat f = p.b[k].inverse();
        p.b = scaled(p.b, f);
    } else {
        GaussRat f = p.a[k];
        p.a = scaled(p.a, f.inverse());
        p.b = scaled(p.b, f);
    }
    return p;
}

// Family 2 -> family 1 through the gluing map; needs lambda != 0 and (r_1..r_c1) != 0.
inline std::optional<Intrinsic> two_to_one(const Model& md, const Intrinsic& p) {
    if (all_zero(p.b) || all_zero(p.a, 1)) return std::nullopt;
    GaussRat n2 = sum_squares(p.b);
    Intrinsic q;
    q.family = 1;
    q.s = p.s;
    for (int i = 1; i <= md.c1; ++i) q.b.push_back(p.a[i] * n2);
    for (const auto& l : p.b) q.b.push_back(l);
    q.a = scaled(q.b, p.a[0]);
    return normalized(q);
}

// Family 1 -> family 2; needs the normal block (R_{c1+1..c}) != 0.
inline std::optional<Intrinsic> one_to_two(const Model& md, const Intrinsic& p) {
    if (all_zero(p.b, md.c1)) return std::nullopt;
    Intrinsic q;
    q.family = 2;
    q.s = p.s;
    q.b.assign(p.b.begin() + md.c1, p.b.end());
    GaussRat inv = sum_squares(q.b).inverse();
    int k = first_nonzero(p.b);
    q.a.push_back(p.a[k] / p.b[k]);
    for (int i = 0; i < md.c1; ++i) q.a.push_back(p.b[i] * inv);
    return normalized(q);
}

}  // namespace detail

// One representative per point of the glued space: family 2 points in the gluing domain become family 1.
inline Intrinsic canonical(const Model& md, const Intrinsic& p) {
    Intrinsic q = detail::normalized(p);
    if (md.augmented() && q.family == 2)
        if (auto g = detail::two_to_one(md, q)) return *g;
    return q;
}

inline Intrinsic decode(const BlowupPoint& p) {
    p.validate();
    const Model& md = p.model;
    Intrinsic q;
    q.s.assign(p.coords.begin() + md.c, p.coords.end());
    if (p.chart.k == 1) {
        int i = p.chart.i - 1;
        q.family = 1;
        q.b.assign(p.coords.begin(), p.coords.begin() + md.c);
        q.b[i] = GaussRat(1);
        q.a = detail::scaled(q.b, p.coords[i]);
    } else {
        int i = p.chart.i;
        q.family = 2;
        q.a.assign(md.c1 + 1, GaussRat(0));
        q.a[i] = GaussRat(1);
        for (int j = 1; j <= md.c1; ++j) q.a[j <= i ? j - 1 : j] = p.coords[j - 1];
        q.b.assign(p.coords.begin() + md.c1, p.coords.begin() + md.c);
    }
    return canonical(md, q);
}

// Chart map; throws ChartDomainError when the point lies outside the chart.
inline BlowupPoint encode(const Model& md, const Intrinsic& point, const ChartId& ch) {
    if (!valid_chart(md, ch)) throw InvalidArgument("chart " + ch.str() + " is not a chart of " + md.name());
    Intrinsic p = canonical(md, point);
    BlowupPoint out{md, ch, {}};
    if (ch.k == 1) {
        if (p.family != 1) throw ChartDomainError("point is off the gamma^1 charts of " + md.name());
        int i = ch.i - 1;
        if (p.b[i].is_zero()) throw ChartDomainError("line coordinate r_" + std::to_string(ch.i) + " vanishes");
        GaussRat inv = p.b[i].inverse();
        for (int j = 0; j < md.c; ++j) out.coords.push_back(j == i ? p.a[i] : p.b[j] * inv);
    } else {
        if (p.family == 1) {
            auto q = detail::one_to_two(md, p);
            if (!q) throw ChartDomainError("point is off the gamma^2 charts: normal block of the line vanishes");
            p = *q;
        }
        int i = ch.i;
        if (p.a[i].is_zero()) throw ChartDomainError("line coordinate r_" + std::to_string(i) + " vanishes");
        GaussRat inv = p.a[i].inverse();
        for (int j = 1; j <= md.c1; ++j) out.coords.push_back(p.a[j <= i ? j - 1 : j] * inv);
        for (const auto& l : p.b) out.coords.push_back(p.a[i] * l);
    }
    for (const auto& x : p.s) out.coords.push_back(x);
    return out;
}

inline BlowupPoint transition(const BlowupPoint& p, const ChartId& target) {
    return encode(p.model, decode(p), target);
}

// Base image of a chart-free point: x for family 1, pi^2 for family 2.
inline std::vector<GaussRat> project(const Model& md, const Intrinsic& p) {
    std::vector<GaussRat> out;
    if (p.family == 1) {
        out = p.a;
    } else {
        GaussRat n2 = detail::sum_squares(p.b);
        for (int j = 1; j <= md.c1; ++j) out.push_back(p.a[0] * p.a[j] * n2);
        for (const auto& l : p.b) out.push_back(p.a[0] * l);
    }
    out.insert(out.end(), p.s.begin(), p.s.end());
    return out;
}

// Blowdown straight from chart coordinates (the relation tables read right to left).
inline std::vector<GaussRat> blowdown_coords(const Model& md, const ChartId& ch, const std::vector<GaussRat>& t) {
    std::vector<GaussRat> x(t.size());
    for (int j = md.c; j < md.dim(); ++j) x[j] = t[j];
    if (ch.k == 1) {
        int i = ch.i - 1;
        for (int j = 0; j < md.c; ++j) x[j] = j == i ? t[i] : t[j] * t[i];
        return x;
    }
    int i = ch.i, c1 = md.c1;
    GaussRat sq(0);
    for (int j = c1; j < md.c; ++j) sq = sq + t[j] * t[j];
    for (int j = c1; j < md.c; ++j) x[j] = i == 0 ? t[j] : t[j] * t[0];
    for (int j = 1; j <= c1; ++j) {
        if (i == 0) x[j - 1] = sq * t[j - 1];
        else if (i < j) x[j - 1] = sq * t[0] * t[j - 1];
        else if (i == j) x[j - 1] = sq * t[0];
        else x[j - 1] = sq * t[0] * t[j];
    }
    return x;
}

inline std::vector<GaussRat> blowdown(const BlowupPoint& p) {
    p.validate();
    return blowdown_coords(p.model, p.chart, p.coords);
}

// ---------------------------------------------------------------- exceptional loci

enum class Locus { Off, E, E0, EMinus, E0EMinus };

inline std::string locus_name(Locus l) {
    switch (l) {
        case Locus::Off: return "off";
        case Locus::E: return "E";
        case Locus::E0: return "E0";
        case Locus::EMinus: return "E-";
        default: return "E0&E-";
    }
}

inline Locus classify(const Model& md, const Intrinsic& point) {
    Intrinsic p = canonical(md, point);
    if (p.family == 1) {
        if (!detail::all_zero(p.a)) return Locus::Off;
        return md.augmented() ? Locus::EMinus : Locus::E;
    }
    bool zero_section = detail::all_zero(p.b);
    bool minus = p.a[0].is_zero();
    if (zero_section) return minus ? Locus::E0EMinus : Locus::E0;
    return minus ? Locus::EMinus : Locus::Off;
}

inline Locus exceptional_classify(const BlowupPoint& p) { return classify(p.model, decode(p)); }

// The same tags read off the chart equations alone.
inline Locus classify_in_chart(const BlowupPoint& p) {
    p.validate();
    const auto& t = p.coords;
    if (p.chart.k == 1) {
        if (!t[p.chart.i - 1].is_zero()) return Locus::Off;
        return p.model.augmented() ? Locus::EMinus : Locus::E;
    }
    bool zero = detail::all_zero(t, p.model.c1, p.model.c);
    bool minus = p.chart.i >= 1 && t[0].is_zero();
    if (zero) return minus ? Locus::E0EMinus : Locus::E0;
    return minus ? Locus::EMinus : Locus::Off;
}

// ---------------------------------------------------------------- relation tables

struct RelationResult {
    std::string relation;
    int coordinate;  // 1-based model coordinate
    bool holds;
};

inline std::string relation_row(const Model& md, const ChartId& ch, int j) {
    if (j > md.c) return "base";
    if (ch.k == 1) return j == ch.i ? "k1:center" : "k1:ratio";
    if (j > md.c1) return ch.i == 0 ? "k2:normal:i=0" : "k2:normal:i>0";
    if (ch.i == 0) return "k2:tangent:i=0";
    if (ch.i < j) return "k2:tangent:i<j";
    if (ch.i == j) return "k2:tangent:i=j";
    return "k2:tangent:i>j";
}

// Checks every displayed relation between base = phi o pi' and chart coordinates t at one point.
inline std::vector<RelationResult> lemma_hypothesis_check(const Model& md, const ChartId& ch,
                                                          const std::vector<GaussRat>& t,
                                                          const std::vector<GaussRat>& base) {
    if (!valid_chart(md, ch)) throw InvalidArgument("chart " + ch.str() + " is not a chart of " + md.name());
    if (int(t.size()) != md.dim() || int(base.size()) != md.dim()) throw InvalidArgument("relation check needs c+m values");
    auto rhs = blowdown_coords(md, ch, t);
    std::vector<RelationResult> out;
    for (int j = 1; j <= md.dim(); ++j) out.push_back({relation_row(md, ch, j), j, rhs[j - 1] == base[j - 1]});
    return out;
}

inline bool relations_hold(const std::vector<RelationResult>& rs) {
    return std::all_of(rs.begin(), rs.end(), [](const RelationResult& r) { return r.holds; });
}

// ---------------------------------------------------------------- sampling

inline GaussRat random_nonzero(Rng& rng, long long bound, bool real_only) {
    for (;;) {
        GaussRat z = random_gauss(rng, bound, real_only);
        if (!z.is_zero()) return z;
    }
}

// Chart coordinates with every entry nonzero, except that with probability 1/exceptional_weight
// the chart's exceptional equation is imposed.
inline BlowupPoint random_point_in_chart(const Model& md, const ChartId& ch, Rng& rng, long long bound,
                                         int exceptional_weight = 0) {
    BlowupPoint p{md, ch, {}};
    for (int j = 0; j < md.dim(); ++j)
        p.coords.push_back(random_nonzero(rng, bound, md.kind != ModelKind::Complex || j >= md.c));
    if (exceptional_weight > 0 && std::uniform_int_distribution<int>(0, exceptional_weight - 1)(rng) == 0) {
        if (ch.k == 1) {
            p.coords[ch.i - 1] = GaussRat(0);
        } else {
            bool zero_normal = ch.i == 0 || std::uniform_int_distribution<int>(0, 1)(rng) == 0;
            if (zero_normal)
                for (int j = md.c1; j < md.c; ++j) p.coords[j] = GaussRat(0);
            if (ch.i >= 1 && (!zero_normal || std::uniform_int_distribution<int>(0, 2)(rng) == 0))
                p.coords[0] = GaussRat(0);
        }
    }
    return p;
}

inline ChartId random_chart(const Model& md, Rng& rng) {
    auto all = charts_of(md);
    return all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)];
}

// ---------------------------------------------------------------- suites

struct CocycleReport {
    int checked = 0;
    int failures = 0;
    int exceptional = 0;  // checked points on the exceptional locus
    int attempts = 0;
    bool ok() const { return failures == 0 && checked > 0; }
};

// phi_{a a''} = phi_{a a'} o phi_{a' a''}, as exact coordinate equality, on points in all three charts.
inline bool cocycle_check(const BlowupPoint& p, const ChartId& mid, const ChartId& target) {
    auto direct = transition(p, target);
    auto composed = transition(transition(p, mid), target);
    return direct.coords == composed.coords;
}

inline CocycleReport cocycle_suite(const Model& md, int n, std::uint64_t seed, long long bound = 6) {
    Rng rng(seed);
    CocycleReport rep;
    while (rep.checked < n) {
        if (++rep.attempts > 50 * n + 100) break;
        ChartId a = random_chart(md, rng), b = random_chart(md, rng), c = random_chart(md, rng);
        auto p = random_point_in_chart(md, a, rng, bound, 5);
        bool ok;
        try {
            transition(p, b);
            transition(p, c);
            ok = cocycle_check(p, b, c);
        } catch (const ChartDomainError&) {
            continue;
        }
        ++rep.checked;
        if (exceptional_classify(p) != Locus::Off) ++rep.exceptional;
        if (!ok) ++rep.failures;
    }
    return rep;
}

// A chart map whose coordinates j1, j2 (0-based) are swapped: the negative control.
inline std::vector<GaussRat> corrupted_chart(const BlowupPoint& p, int j1 = 0, int j2 = 1) {
    auto t = p.coords;
    std::swap(t[j1], t[j2]);
    return t;
}

struct LemmaReport {
    int points = 0;
    int failing_points = 0;
    std::map<std::string, std::pair<int, int>> rows;  // relation -> (passed, total)
    int control_points = 0;
    int control_failing_points = 0;
    bool ok() const { return points > 0 && failing_points == 0; }
    bool control_detected() const { return control_points > 0 && control_failing_points == control_points; }
};

// Samples chart-free points, reads them in every chart that contains them, and checks the relation
// table against the chart-free projection. The control swaps two coordinates of the chart map.
inline LemmaReport lemma_suite(const Model& md, int n, std::uint64_t seed, long long bound = 6) {
    Rng rng(seed);
    LemmaReport rep;
    auto charts = charts_of(md);
    for (int s = 0; s < n; ++s) {
        auto seedpt = random_point_in_chart(md, charts[s % charts.size()], rng, bound, 5);
        Intrinsic q = decode(seedpt);
        auto base = project(md, q);
        bool point_ok = true;
        for (const auto& ch : charts) {
            BlowupPoint p;
            try {
                p = encode(md, q, ch);
            } catch (const ChartDomainError&) {
                continue;
            }
            for (const auto& r : lemma_hypothesis_check(md, ch, p.coords, base)) {
                auto& row = rep.rows[r.relation];
                row.second++;
                if (r.holds) row.first++;
                else point_ok = false;
            }
        }
        ++rep.points;
        if (!point_ok) ++rep.failing_points;

        auto off = random_point_in_chart(md, charts[s % charts.size()], rng, bound, 0);
        while (off.coords[0] == off.coords[1]) off.coords[1] = random_nonzero(rng, bound, md.kind != ModelKind::Complex);
        auto off_base = project(md, decode(off));
        ++rep.control_points;
        if (!relations_hold(lemma_hypothesis_check(md, off.chart, corrupted_chart(off), off_base)))
            ++rep.control_failing_points;
    }
    return rep;
}

struct BlowdownInjectivityReport {
    int points = 0;          // chart readings hashed
    int distinct_points = 0;
    int images = 0;
    int shared_images = 0;   // images reached from more than one chart reading
    int collisions = 0;      // off-exceptional images with two distinct points above them
    int exceptional_off_center = 0;  // exceptional points whose image is not on Y
    bool ok() const { return collisions == 0 && exceptional_off_center == 0 && points > 0; }
};

inline std::string image_key(const std::vector<GaussRat>& x) {
    std::string out;
    for (const auto& z : x) out += z.str() + ",";
    return out;
}

// Hashes blowdown images of sampled chart readings (each point read in every chart containing it)
// and checks that no off-exceptional image has two distinct points above it.
// With glue = false the gluing of the augmented families is ignored, which must produce collisions.
inline BlowdownInjectivityReport injectivity_suite(const Model& md, int n, std::uint64_t seed, long long bound = 6,
                                           bool glue = true) {
    Rng rng(seed);
    BlowdownInjectivityReport rep;
    std::unordered_map<std::string, std::unordered_set<std::string>> above;
    std::unordered_map<std::string, int> hits;
    std::unordered_set<std::string> distinct;
    auto charts = charts_of(md);
    auto record = [&](const BlowupPoint& p) {
        auto img = blowdown(p);
        Intrinsic q = glue ? decode(p) : detail::normalized([&] {
            Intrinsic raw = decode(p);
            if (raw.family == 1 && p.chart.k == 2)
                if (auto t = detail::one_to_two(md, raw)) return *t;
            return raw;
        }());
        std::string key = q.key();
        ++rep.points;
        distinct.insert(key);
        Locus l = classify(md, decode(p));
        if (l != Locus::Off) {
            if (!detail::all_zero(img, 0, md.c)) ++rep.exceptional_off_center;
            return;
        }
        std::string ik = image_key(img);
        above[ik].insert(key);
        hits[ik]++;
    };
    for (int s = 0; s < n; ++s) {
        auto p = random_point_in_chart(md, charts[s % charts.size()], rng, bound, 5);
        for (const auto& ch : charts) {
            try {
                record(transition(p, ch));
            } catch (const ChartDomainError&) {
            }
        }
    }
    rep.distinct_points = int(distinct.size());
    rep.images = int(above.size());
    for (const auto& [img, keys] : above) {
        if (keys.size() > 1) ++rep.collisions;
        if (hits[img] > 1) ++rep.shared_images;
    }
    return rep;
}

struct LocalModelReport {
    std::string preset;
    Model model;
    CocycleReport cocycle;
    LemmaReport lemma;
    BlowdownInjectivityReport injectivity;
    bool ok() const { return cocycle.ok() && lemma.ok() && lemma.control_detected() && injectivity.ok(); }
};

inline LocalModelReport verify_local_model(const std::string& preset, int n, std::uint64_t seed, long long bound = 6) {
    LocalModelReport rep;
    rep.preset = preset;
    rep.model = preset_model(preset);
    rep.cocycle = cocycle_suite(rep.model, n, derive_seed(seed, 1), bound);
    rep.lemma = lemma_suite(rep.model, n, derive_seed(seed, 2), bound);
    rep.injectivity = injectivity_suite(rep.model, n, derive_seed(seed, 3), bound);
    return rep;
}

}  // namespace dmlab
