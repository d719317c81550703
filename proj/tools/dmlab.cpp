// dmlab: enumeration, schedules and verification suites with JSON reports.

#include <chrono>
#include <ctime>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dmlab/json_io.hpp"

using namespace dmlab;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2 };

struct RunConfig {
    std::string command;
    int ell = 4;
    bool real = false;
    int samples = -1;  // -1: per-command default
    long long bound = 6;
    std::uint64_t seed = 1;
    std::string out;
    int max_l_override = 0;
    std::string preset = "all";

    int samples_or(int d) const { return samples >= 0 ? samples : d; }
};

struct UsageError : Error {
    using Error::Error;
};

void check_ell(const RunConfig& c) {
    int lo = c.real ? 2 : 3;
    int hi = c.max_l_override > 0 ? c.max_l_override : (c.real ? 6 : 10);
    if (c.ell < lo) throw UsageError("--l must be at least " + std::to_string(lo) + (c.real ? " for real curves" : ""));
    if (c.ell > hi)
        throw UsageError("--l " + std::to_string(c.ell) + " exceeds the guardrail (" + std::to_string(hi) +
                         (c.real ? " real" : " complex") + "); pass --max-l-override to raise it");
}

Json config_json(const RunConfig& c) {
    return {{"command", c.command}, {"l", c.ell},       {"real", c.real},
            {"samples", c.samples}, {"bound", c.bound}, {"seed", c.seed},
            {"preset", c.preset},   {"tolerance", "exact"}};
}

Json cmd_trees(const RunConfig& c, bool& ok) {
    check_ell(c);
    auto trees = enumerate_trees(c.ell, c.real);
    Json list = Json::array();
    for (auto& t : trees) list.push_back(to_json(t));
    ok = true;
    return {{"count", trees.size()}, {"trees", list}};
}

Json cmd_strata(const RunConfig& c, bool& ok) {
    check_ell(c);
    Json labels = Json::array();
    Json out;
    if (!c.real) {
        auto a = build_a_ell(c.ell);
        for (auto& s : a) labels.push_back(s.str());
        long long formula = (1LL << (c.ell - 1)) - c.ell - 1;
        out = {{"size", a.size()}, {"closed_form", formula}, {"labels", labels}};
        ok = (long long)a.size() == formula;
        return out;
    }
    auto pm = build_a_ell_pm(c.ell);
    auto ar = build_a_ell_real(c.ell);
    for (auto& s : ar) labels.push_back({{"rho", s.str()}, {"kind", kind_name(s.kind)}});
    auto k = count_kinds(ar);
    long long formula = (1LL << (2 * c.ell - 1)) - 2 * c.ell - 1;
    out = {{"size_pm", pm.size()},
           {"closed_form_pm", formula},
           {"size_real", ar.size()},
           {"kinds", {{"H", k.H}, {"E", k.E}, {"D1", k.D1}, {"D2", k.D2}, {"D3", k.D3}}},
           {"real_node_strata", k.H + k.E},
           {"boundary_divisors", k.divisors()},
           {"labels", labels}};
    ok = (long long)pm.size() == formula;
    return out;
}

Json cmd_schedule(const RunConfig& c, bool& ok) {
    check_ell(c);
    auto s = schedule(c.ell, c.real);
    ok = is_linear_extension(s);
    return to_json(s);
}

Json cmd_verify_cr(const RunConfig& c, bool& ok) {
    auto r = cr_relation_suite(c.samples_or(1000), c.seed, std::max(c.bound, 1LL));
    ok = r.ok();
    return to_json(r);
}

Json cmd_verify_basis(const RunConfig& c, bool& ok) {
    check_ell(c);
    auto r = basis_suite(c.ell, c.real, c.samples_or(20), c.seed, c.bound);
    ok = r.ok();
    return to_json(r);
}

Json cmd_verify_quotient(const RunConfig& c, bool& ok) {
    check_ell(c);
    auto r = quotient_suite(c.ell, c.real, c.samples_or(50), c.seed, c.bound);
    ok = r.ok();
    return to_json(r);
}

Json cmd_verify_localmodels(const RunConfig& c, bool& ok) {
    std::vector<std::string> names = c.preset == "all" ? preset_names() : std::vector<std::string>{c.preset};
    Json out = Json::array();
    ok = true;
    for (std::size_t k = 0; k < names.size(); ++k) {
        auto r = verify_local_model(names[k], c.samples_or(500), derive_seed(c.seed, k), c.bound);
        ok = ok && r.ok();
        out.push_back(to_json(r));
    }
    return {{"presets", out}};
}

Json cmd_all(const RunConfig& c, bool& ok) {
    Json out;
    ok = true;
    auto sub = [&](const std::string& name, RunConfig rc, Json (*fn)(const RunConfig&, bool&)) {
        bool part = false;
        rc.command = name;
        out[name] = fn(rc, part);
        out[name]["ok"] = part;
        ok = ok && part;
    };
    RunConfig base = c;
    base.samples = -1;
    sub("verify-cr", base, cmd_verify_cr);
    for (auto [ell, real] : {std::pair{5, false}, std::pair{3, true}}) {
        RunConfig rc = base;
        rc.ell = ell;
        rc.real = real;
        rc.samples = 5;
        sub(std::string("verify-basis-") + std::to_string(ell) + (real ? "R" : "C"), rc, cmd_verify_basis);
    }
    for (auto [ell, real] : {std::pair{4, false}, std::pair{2, true}}) {
        RunConfig rc = base;
        rc.ell = ell;
        rc.real = real;
        sub(std::string("verify-quotient-") + std::to_string(ell) + (real ? "R" : "C"), rc, cmd_verify_quotient);
    }
    RunConfig lm = base;
    lm.preset = "all";
    sub("verify-localmodels", lm, cmd_verify_localmodels);
    return out;
}

std::string timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stable-curve chart and blowup verification lab"};
    app.require_subcommand(1);
    RunConfig cfg;

    struct Sub {
        const char* name;
        const char* help;
        Json (*fn)(const RunConfig&, bool&);
    };
    const std::vector<Sub> subs = {
        {"trees", "enumerate dual trees", cmd_trees},
        {"strata", "index sets and real kinds", cmd_strata},
        {"schedule", "blowup order", cmd_schedule},
        {"verify-cr", "cross-ratio relation suite", cmd_verify_cr},
        {"verify-basis", "basis size and reconstruction on every tree", cmd_verify_basis},
        {"verify-quotient", "class keys against the relation closure", cmd_verify_quotient},
        {"verify-localmodels", "cocycle, relation tables and blowdown injectivity", cmd_verify_localmodels},
        {"all", "every suite", cmd_all},
    };
    for (auto& s : subs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        sc->add_option("--l", cfg.ell, "number of marked points (pairs for --real)");
        sc->add_flag("--real", cfg.real, "real curves");
        sc->add_option("--samples", cfg.samples, "samples per case")->check(CLI::NonNegativeNumber);
        sc->add_option("--bound", cfg.bound, "coefficient bound")->check(CLI::PositiveNumber);
        sc->add_option("--seed", cfg.seed, "master seed");
        sc->add_option("--out", cfg.out, "report path (default: stdout)");
        sc->add_option("--max-l-override", cfg.max_l_override, "raise the l guardrail");
        if (std::string(s.name) == "verify-localmodels")
            sc->add_option("--preset", cfg.preset, "real3, complex2, aug31 or all")
                ->check(CLI::IsMember({"real3", "complex2", "aug31", "all"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const Sub* chosen = nullptr;
    for (auto& s : subs)
        if (app.got_subcommand(s.name)) chosen = &s;
    cfg.command = chosen->name;

    Json report;
    report["v"] = kSchemaVersion;
    report["config"] = config_json(cfg);
    bool ok = false;
    try {
        report["result"] = chosen->fn(cfg, ok);
    } catch (const UsageError& e) {
        std::cerr << "dmlab: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "dmlab: " << e.what() << "\n";
        return kUsage;
    }
    report["ok"] = ok;
    report["generated_at"] = timestamp();

    std::string text = report.dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        try {
            write_atomic(cfg.out, text);
        } catch (const Error& e) {
            std::cerr << "dmlab: " << e.what() << "\n";
            return kUsage;
        }
        std::cerr << cfg.command << ": " << (ok ? "ok" : "FAILED") << " -> " << cfg.out << "\n";
    }
    return ok ? kOk : kFailed;
}
