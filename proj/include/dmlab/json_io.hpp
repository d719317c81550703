#pragma once
// JSON forms of trees, curves, bases, schedules and suite reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "dmlab/suites.hpp"

namespace dmlab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json to_json(const MarkedTree& t) {
    Json j;
    j["ell"] = t.space.ell;
    j["real"] = t.space.real;
    j["vertices"] = t.nv;
    j["edges"] = Json::array();
    for (const Edge& e : t.edges) j["edges"].push_back({e[0], e[1]});
    j["marks"] = Json::object();
    for (Mark m : t.space.marks())
        if (t.mu[m] >= 0) j["marks"][t.space.label(m)] = t.mu[m];
    if (t.is_real()) j["phi"] = t.phi;
    j["canonical"] = canonical_form(t);
    return j;
}

inline MarkedTree tree_from_json(const Json& j) {
    try {
        MarkedTree t;
        t.space = {j.at("ell").get<int>(), j.value("real", false)};
        t.nv = j.at("vertices").get<int>();
        for (auto& e : j.at("edges")) t.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        t.normalize_edges();
        t.mu.assign(t.space.count() + 1, -1);
        for (auto& [label, v] : j.at("marks").items()) t.mu[t.space.parse(label)] = v.get<int>();
        if (j.contains("phi")) t.phi = j.at("phi").get<std::vector<int>>();
        auto bad = tree_violations(t);
        if (!bad.empty()) throw ParseError("invalid tree: " + bad.front());
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed tree JSON: ") + e.what());
    }
}

inline Json to_json(const StableCurve& c) {
    Json j;
    j["tree"] = to_json(c.tree);
    j["marks"] = Json::object();
    for (Mark m : c.space().marks())
        if (c.tree.mu[m] >= 0) j["marks"][c.space().label(m)] = c.mark_pos[m].str();
    j["nodes"] = Json::array();
    for (auto& [key, p] : c.node_pos) j["nodes"].push_back({key.first, key.second, p.str()});
    return j;
}

inline StableCurve curve_from_json(const Json& j) {
    try {
        StableCurve c;
        c.tree = tree_from_json(j.at("tree"));
        c.mark_pos.assign(c.space().count() + 1, ProjPoint());
        for (auto& [label, p] : j.at("marks").items())
            c.mark_pos[c.space().parse(label)] = ProjPoint::parse(p.get<std::string>());
        for (auto& n : j.at("nodes"))
            c.node_pos[{n.at(0).get<int>(), n.at(1).get<int>()}] = ProjPoint::parse(n.at(2).get<std::string>());
        auto bad = validate(c);
        if (!bad.empty()) throw ParseError("invalid curve: " + bad.front());
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed curve JSON: ") + e.what());
    }
}

inline Json quad_json(const MarkSpace& sp, const Quad& q) {
    Json a = Json::array();
    for (Mark m : q) a.push_back(sp.label(m));
    return a;
}

inline Json to_json(const ChartBasis& b) {
    Json j;
    j["tree"] = canonical_form(b.tree);
    j["size"] = b.size();
    j["quadruples"] = Json::array();
    for (auto& q : b.quads()) j["quadruples"].push_back(quad_json(b.tree.space, q));
    if (!b.extension.empty()) {
        j["v_plus"] = b.v_plus;
        j["extension"] = Json::array();
        for (auto& q : b.extension) j["extension"].push_back(quad_json(b.tree.space, q));
    }
    return j;
}

inline Json to_json(const BlowupSchedule& s) {
    Json j;
    j["ell"] = s.ell;
    j["real"] = s.real;
    j["steps"] = Json::array();
    std::map<std::string, int> counts;
    for (int k = 0; k < s.size(); ++k) {
        const auto& st = s.steps[k];
        j["steps"].push_back({{"rank", k + 1},
                              {"rho", st.label.str()},
                              {"kind", kind_name(st.label.kind)},
                              {"type", blowup_name(st.type)},
                              {"predecessor", st.predecessor}});
        counts[blowup_name(st.type)]++;
    }
    j["counts"] = counts;
    j["linear_extension"] = is_linear_extension(s);
    return j;
}

inline Json to_json(const CrReport& r) {
    return {{"quintuples", r.quintuples},
            {"relations", r.relations},
            {"failures", r.failures},
            {"counterexamples", r.counterexamples},
            {"ok", r.ok()}};
}

inline Json to_json(const BasisReport& r) {
    Json cases = Json::array();
    for (auto& c : r.cases)
        cases.push_back({{"tree", c.tree},
                         {"basis_size", c.basis_size},
                         {"expected_size", c.expected_size},
                         {"curves", c.curves},
                         {"quadruples", c.quadruples},
                         {"mismatches", c.mismatches},
                         {"domain_errors", c.domain_errors}});
    return {{"ell", r.ell}, {"real", r.real}, {"trees", r.cases.size()}, {"mismatches", r.mismatches()},
            {"cases", cases}, {"ok", r.ok()}};
}

inline Json to_json(const QuotientSuiteReport& r) {
    const auto& in = r.injectivity;
    return {{"ell", r.ell},
            {"real", r.real},
            {"cases", r.configurations},
            {"samples", in.samples},
            {"random_samples", r.random_samples},
            {"excluded", in.excluded},
            {"classes", in.classes},
            {"key_collisions_across_classes", in.key_collisions_across_classes},
            {"intra_class_key_splits", in.intra_class_key_splits},
            {"counterexamples", in.counterexamples},
            {"y_identities",
             {{"checked", r.y.checked}, {"failures", r.y.failures}, {"hits", r.y.hits},
              {"counterexamples", r.y.counterexamples}}},
            {"ok", r.ok()}};
}

inline Json to_json(const LocalModelReport& r) {
    Json rows = Json::object();
    for (auto& [name, pt] : r.lemma.rows) rows[name] = {{"passed", pt.first}, {"total", pt.second}};
    return {{"preset", r.preset},
            {"model", r.model.name()},
            {"cocycle",
             {{"checked", r.cocycle.checked}, {"failures", r.cocycle.failures},
              {"exceptional", r.cocycle.exceptional}}},
            {"lemma",
             {{"points", r.lemma.points}, {"failing_points", r.lemma.failing_points}, {"relations", rows},
              {"control_points", r.lemma.control_points},
              {"control_failing_points", r.lemma.control_failing_points},
              {"control_detected", r.lemma.control_detected()}}},
            {"injectivity",
             {{"readings", r.injectivity.points}, {"distinct_points", r.injectivity.distinct_points},
              {"images", r.injectivity.images}, {"shared_images", r.injectivity.shared_images},
              {"collisions", r.injectivity.collisions},
              {"exceptional_off_center", r.injectivity.exceptional_off_center}}},
            {"ok", r.ok()}};
}

// Writes through a temporary file in the target directory and renames it into place.
inline void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move report into " + path + ": " + ec.message());
    }
}

}  // namespace dmlab
