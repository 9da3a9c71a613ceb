// pamlab: command-line front end.  Exit codes: 0 success, 1 a checked
// property failed, 2 bad input.
#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "pam/catalog.hpp"
#include "pam/circle.hpp"
#include "pam/conjugate.hpp"
#include "pam/counting.hpp"
#include "pam/io.hpp"
#include "pam/perturb.hpp"
#include "pam/shadowing.hpp"
#include "pam/suite.hpp"
#include "pam/window.hpp"

#ifndef PAMLAB_VERSION
#define PAMLAB_VERSION "0.0.0"
#endif

using namespace pam;

namespace {

// Signals a checked property that does not hold; maps to exit code 1.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::string command;
    Json params = Json::object();
    bool seeded = false;
    std::uint64_t seed = 0;

    Json meta() const {
        Json m{{"tool", "pamlab"}, {"version", PAMLAB_VERSION}, {"command", command}, {"params", params}};
        if (seeded) {
            m["seed"] = seed;
            m["generator"] = "mt19937_64";
            m["generator_version"] = "std::mersenne_twister_engine 19937/64, raw 64-bit output";
        }
        return m;
    }
};

Context ctx;

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

void emit_json(const std::string& path, Json j) {
    j["meta"] = ctx.meta();
    emit(path, j.dump(2) + "\n");
}

struct Tsv {
    std::vector<std::string> cols;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;

    std::string render() const {
        std::ostringstream os;
        os << "# " << ctx.meta().dump() << "\n";
        for (const auto& n : notes) os << "# " << n << "\n";
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "\t" : "") << cols[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i];
            os << "\n";
        }
        return os.str();
    }
};

std::vector<Rat> rat_list(const std::string& s) {
    std::vector<Rat> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_rat(item));
    if (out.empty()) throw InputError("empty list '" + s + "'");
    return out;
}

std::vector<unsigned> uint_list(const std::string& s) {
    std::vector<unsigned> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            unsigned long v = std::stoul(item, &used);
            if (used != item.size() || v == 0) throw std::invalid_argument(item);
            out.push_back(static_cast<unsigned>(v));
        } catch (const std::logic_error&) {
            throw InputError("not a positive integer: '" + item + "'");
        }
    }
    if (out.empty()) throw InputError("empty list '" + s + "'");
    return out;
}

PAMap load_map_arg(const std::string& s) {
    // catalog names are accepted wherever a map file is
    for (const auto& n : catalog_names())
        if (s == n) return catalog_map(n);
    return load_map(s);
}

std::string sci(const Rat& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", to_double(r));
    return buf;
}

std::string yes(bool b) { return b ? "true" : "false"; }

void report_clauses(const std::vector<ClauseResult>& cs, std::ostream& os) {
    for (const auto& c : cs)
        os << (c.skipped ? "skip" : (c.ok ? "ok  " : "FAIL")) << " " << c.name << (c.detail.empty() ? "" : ": ")
           << c.detail << "\n";
}

void require_clauses(const std::vector<ClauseResult>& cs) {
    for (const auto& c : cs)
        if (!c.ok) throw CheckFailed("violated: " + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
}

Json budget_to_json(const PerturbationBudget& b) {
    Json reps = Json::array();
    for (const auto& r : b.reps) reps.push_back({{"x", rat_to_json(r.x)}, {"period", r.period}});
    return Json{{"gamma", rat_to_json(b.gamma)}, {"eta", rat_to_json(b.eta)}, {"beta", rat_to_json(b.beta)},
                {"tau", rat_to_json(b.tau)},     {"a", rat_to_json(b.a)},     {"n", b.n},
                {"i", b.i},                      {"k", b.k},                  {"reps", reps}};
}

PerturbationBudget budget_from_json(const Json& j) {
    PerturbationBudget b;
    b.gamma = rat_from_json(j.at("gamma"));
    b.eta = rat_from_json(j.at("eta"));
    b.beta = rat_from_json(j.at("beta"));
    b.tau = rat_from_json(j.at("tau"));
    b.a = rat_from_json(j.at("a"));
    b.n = j.at("n").get<unsigned>();
    b.i = j.at("i").get<unsigned>();
    b.k = j.at("k").get<unsigned>();
    for (const auto& r : j.at("reps")) b.reps.push_back({rat_from_json(r.at("x")), r.at("period").get<unsigned>()});
    return b;
}

std::string point_str(const PeriodicPoint& p) { return p.is_point() ? str(p.x()) : "[" + str(p.location.lo) + ", " + str(p.location.hi) + "]"; }

// ---- subcommands ---------------------------------------------------------

struct Opts {
    std::string map, base, out, window, budget, kit, g, orbit, measure, homeo, lift, mu, nu, eps = "1/10",
        eps_list = "1/4,1/8", tol = "1/1000000", cantor_eps = "1/8", name, log, budget_out, ns = "1,2,3", ks = "1,2,3";
    unsigned k = 1, m = 3, i = 1, n = 1, depth = 2, K = 2, length = 200, periodic = 0, kmax = 10;
    int only = 0;
    std::uint64_t seed = 1;
    bool steepen = false, inverse = false, waive = false, quiet = false;
};

Opts o;
std::function<int()> action;

CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help, std::function<int()> fn) {
    CLI::App* s = parent->add_subcommand(name, help);
    s->callback([s, fn, parent] {
        ctx.command = parent->get_name() + " " + s->get_name();
        for (const CLI::Option* opt : s->get_options()) {
            const std::string nm = opt->get_name();
            // output locations are not part of the result
            if (nm == "--help" || nm == "--out" || nm == "--log" || nm == "--budget-out" || opt->count() == 0)
                continue;
            std::string v;
            for (const auto& r : opt->results()) v += (v.empty() ? "" : ",") + r;
            ctx.params[opt->get_name(false, true)] = opt->get_expected_min() == 0 ? "true" : v;
        }
        action = fn;
    });
    return s;
}

int cmd_map_catalog() {
    emit_json(o.out, map_to_json(catalog_map(o.name)));
    return 0;
}

int cmd_map_verify() {
    PAMap f = load_map_arg(o.map);
    LebesgueCheck c = verify_lebesgue(f);
    std::cout << "lebesgue: " << yes(c.ok) << "\n";
    if (!c.ok) {
        std::cout << "witness cell [" << str(c.cell.lo) << ", " << str(c.cell.hi) << "], reciprocal-slope sum "
                  << str(c.sum) << "\n";
        throw CheckFailed("map does not preserve Lebesgue measure");
    }
    return 0;
}

int cmd_map_iterate() {
    emit_json(o.out, map_to_json(iterate(load_map_arg(o.map), o.k)));
    return 0;
}

int cmd_map_crit() {
    PAMap f = load_map_arg(o.map);
    Tsv t{{"x", "f(x)"}, {}, {}};
    for (const Rat& c : crit(f)) t.rows.push_back({str(c), str(f(c))});
    emit(o.out, t.render());
    return 0;
}

int cmd_perturb_mfold() {
    PAMap f = load_map_arg(o.map);
    auto colon = o.window.find(':');
    if (colon == std::string::npos) throw InputError("window must be a:b");
    WindowSpec w{{parse_rat(o.window.substr(0, colon)), parse_rat(o.window.substr(colon + 1))}, o.m, o.waive};
    emit_json(o.out, map_to_json(window_mfold(f, w)));
    return 0;
}

int cmd_perturb_transverse() {
    PAMap f = load_map_arg(o.map);
    TransverseResult r = make_transverse(f, o.k, parse_rat(o.budget));
    std::string log;
    for (const auto& l : r.log.lines) log += l + "\n";
    log += "rho(f, g) = " + str(r.distance) + "\n";
    if (o.log.empty())
        std::cerr << log;
    else
        write_text_file(o.log, log);
    Json j = map_to_json(r.g);
    j["distance"] = rat_to_json(r.distance);
    emit_json(o.out, j);
    TransverseAudit a = audit_transverse(r.g, o.k);
    if (!a.ok) throw CheckFailed("transversality audit: " + a.failure);
    return 0;
}

int cmd_periodic_fix() {
    PAMap f = load_map_arg(o.map);
    Tsv t{{"lo", "hi", "least_period", "transverse"}, {}, {}};
    for (const auto& p : fix_points(f, o.k))
        t.rows.push_back({str(p.location.lo), str(p.location.hi), std::to_string(p.least_period), yes(p.transverse)});
    emit(o.out, t.render());
    return 0;
}

int cmd_periodic_construct() {
    PAMap g = load_map_arg(o.map);
    Theorem1Result r = theorem1_construct(g, o.k, o.i, o.n);
    if (!o.budget_out.empty()) {
        Json b = budget_to_json(r.budget);
        b["meta"] = ctx.meta();
        write_text_file(o.budget_out, b.dump(2) + "\n");
    }
    emit_json(o.out, map_to_json(r.h));
    return 0;
}

int cmd_periodic_count() {
    PAMap h = load_map_arg(o.map), g = load_map_arg(o.base);
    PerturbationBudget b = budget_from_json(read_json_file(o.budget));
    CountReport r = count_check(h, g, b, o.k);
    report_clauses(r.clauses, std::cout);
    require_clauses(r.clauses);
    return 0;
}

int cmd_periodic_profile() {
    PAMap h = load_map_arg(o.map);
    PerturbationBudget b = budget_from_json(read_json_file(o.budget));
    ScalingProfile p = scaling_profile(h, b, o.k);
    Tsv t{{"label", "eps", "N", "ratio_lower", "ratio_upper"}, {}, {}};
    for (const auto& r : p.rows) t.rows.push_back({r.label, str(r.eps), std::to_string(r.count), r.ratio.lo_str, r.ratio.hi_str});
    for (const auto& c : p.checks)
        t.notes.push_back(std::string(c.skipped ? "skip " : (c.ok ? "ok " : "FAIL ")) + c.name + ": " + c.detail);
    emit(o.out, t.render());
    require_clauses(p.checks);
    return 0;
}

PAMap prepared_map() {
    PAMap f = load_map_arg(o.map);
    return o.steepen ? steepen(f) : f;
}

int cmd_shadow_kit() {
    PAMap f = prepared_map();
    ShadowingKit kit = shadowing_perturbation(f, parse_rat(o.eps));
    auto cs = verify_kit(kit, f);
    report_clauses(cs, std::cerr);
    Json j = kit_to_json(kit);
    if (o.steepen) j["steepened"] = map_to_json(f);
    emit_json(o.out, j);
    require_clauses(cs);
    return 0;
}

int cmd_shadow_verify() {
    ShadowingKit kit = kit_from_json(read_json_file(o.kit));
    PAMap f = prepared_map();
    auto cs = verify_kit(kit, f);
    report_clauses(cs, std::cout);
    require_clauses(cs);
    return 0;
}

int cmd_shadow_orbit() {
    ShadowingKit kit = kit_from_json(read_json_file(o.kit));
    PAMap g = o.g.empty() ? kit.F : load_map_arg(o.g);
    ctx.seeded = true;
    ctx.seed = o.seed;
    PseudoOrbit po = o.periodic ? random_periodic_pseudo_orbit(kit, g, o.periodic, o.seed)
                                : random_pseudo_orbit(g, kit.delta, o.length, o.seed);
    emit_json(o.out, orbit_to_json(po));
    return 0;
}

int cmd_shadow_trace() {
    ShadowingKit kit = kit_from_json(read_json_file(o.kit));
    if (!o.map.empty()) require_clauses(verify_kit(kit, prepared_map()));
    PAMap g = o.g.empty() ? kit.F : load_map_arg(o.g);
    Json oj = read_json_file(o.orbit);
    PseudoOrbit po = orbit_from_json(oj);
    if (oj.contains("meta") && oj["meta"].contains("seed")) {
        ctx.seeded = true;
        ctx.seed = oj["meta"]["seed"].get<std::uint64_t>();
    }
    Tsv t{{"i", "x_i", "g^i(z)", "error", "error_approx"}, {}, {}};
    Trace tr;
    if (po.kind == OrbitKind::periodic) {
        PeriodicTrace p = trace_periodic(kit, g, po);
        Rat y = p.z;
        for (std::size_t i = 0; i < p.period; ++i) y = g(y);
        t.notes.push_back("periodic: z = " + str(p.z) + ", period " + std::to_string(p.period) +
                          ", g^P(z) = z: " + yes(y == p.z));
        Rat x = p.z;
        for (std::size_t i = 0; i < p.period; ++i) {
            Rat e = rabs(x - po.at(i));
            t.rows.push_back({std::to_string(i), str(po.at(i)), str(x), str(e), sci(e)});
            x = g(x);
        }
        t.notes.push_back("max error " + str(p.max_err) + " (eps " + str(kit.eps) + ")");
        emit(o.out, t.render());
        if (!(p.max_err < kit.eps) || y != p.z) throw CheckFailed("periodic trace out of tolerance");
        return 0;
    }
    tr = trace(kit, g, po);
    Rat x = tr.z;
    for (std::size_t i = 0; i < po.points.size(); ++i) {
        t.rows.push_back({std::to_string(i), str(po.points[i]), str(x), str(tr.errors[i]), sci(tr.errors[i])});
        x = g(x);
    }
    t.notes.push_back("z = " + str(tr.z) + ", max error " + str(tr.max_err) + " (eps " + str(kit.eps) + ")");
    emit(o.out, t.render());
    if (!(tr.max_err < kit.eps)) throw CheckFailed("trace error not below eps");
    return 0;
}

int cmd_shadow_tower() {
    PAMap f = prepared_map();
    SLimitTower t = s_limit_tower(f, parse_rat(o.eps), o.depth);
    report_clauses(t.checks, std::cout);
    Json levels = Json::array();
    for (const auto& lv : t.levels)
        levels.push_back({{"eps", rat_to_json(lv.eps)}, {"delta", rat_to_json(lv.kit.delta)},
                          {"pieces", lv.kit.F.pieces()}, {"rho_prev", rat_to_json(lv.rho_prev)}});
    if (!o.out.empty()) emit_json(o.out, Json{{"levels", levels}});
    require_clauses(t.checks);
    return 0;
}

int cmd_conj_cdf() {
    Homeo h = cdf_homeo(measure_from_json(read_json_file(o.measure)));
    emit_json(o.out, homeo_to_json(h));
    return 0;
}

int cmd_conj_apply() {
    PAMap f = load_map_arg(o.map);
    Homeo h = homeo_from_json(read_json_file(o.homeo));
    if (o.inverse) h = Homeo{h.inverse, h.forward, h.approximate};
    Json j = map_to_json(conjugate(f, h));
    j["approximate"] = h.approximate;
    emit_json(o.out, j);
    return 0;
}

int cmd_conj_demo() {
    PAMap f = load_map_arg(o.map);
    DemoReport r = full_measure_demo(f, o.K, rat_list(o.eps_list), o.depth, parse_rat(o.cantor_eps));
    emit_json(o.out, demo_to_json(r));
    bool ok = r.rho_monotone;
    for (const auto& row : r.rows) ok = ok && row.interval_identity;
    if (!ok) throw CheckFailed("demo certificate failed");
    return 0;
}

int cmd_conj_prohorov() {
    MeasureRep mu = measure_from_json(read_json_file(o.mu)), nu = measure_from_json(read_json_file(o.nu));
    ProhorovEnclosure e = prohorov(mu, nu, parse_rat(o.tol));
    emit_json(o.out, Json{{"lo", rat_to_json(e.lo)}, {"hi", rat_to_json(e.hi)}, {"family", e.family}});
    return 0;
}

int cmd_circle_fix() {
    LiftPAMap f = lift_from_json(read_json_file(o.lift));
    Tsv t{{"lo", "hi", "translate", "least_period", "transverse"}, {}, {}};
    for (const auto& p : circle_fix(f, o.k))
        t.rows.push_back({str(p.location.lo), str(p.location.hi), p.translate.get_str(), std::to_string(p.least_period),
                          yes(p.transverse)});
    emit(o.out, t.render());
    return 0;
}

int cmd_circle_verify() {
    LebesgueCheck c = circle_verify_lebesgue(lift_from_json(read_json_file(o.lift)));
    std::cout << "lebesgue: " << yes(c.ok) << "\n";
    if (!c.ok) {
        std::cout << "witness cell [" << str(c.cell.lo) << ", " << str(c.cell.hi) << "], reciprocal-slope sum "
                  << str(c.sum) << "\n";
        throw CheckFailed("circle map does not preserve Lebesgue measure");
    }
    return 0;
}

int cmd_circle_invertible() {
    Invertibility v = invertibility_test(lift_from_json(read_json_file(o.lift)));
    std::cout << "invertible: " << yes(v.invertible) << "\n";
    if (!v.invertible) std::cout << "witness " << str(v.x) << " " << str(v.y) << "\n";
    return 0;
}

int cmd_circle_periodic() {
    PeriodicSearch s = has_periodic_point(lift_from_json(read_json_file(o.lift)), o.kmax);
    std::cout << "periodic: " << yes(s.found);
    if (s.found) std::cout << " k=" << s.k << " witness " << point_str(*s.witness) << " transverse " << yes(s.witness->transverse);
    std::cout << "\n(finite horizon k <= " << o.kmax << "; no rotation number is computed)\n";
    return 0;
}

int cmd_suite_acceptance() {
    bool all = true;
    for (int id = 1; id <= kCriteria; ++id) {
        if (o.only && id != o.only) continue;
        CriterionResult r = run_criterion(id);
        std::cout << format_line(r) << "\n";
        if (!o.quiet)
            for (const auto& d : r.details) std::cout << "    " << d << "\n";
        std::cout.flush();
        all = all && r.pass;
    }
    if (!all) throw CheckFailed("acceptance battery has failing criteria");
    return 0;
}

int cmd_suite_periodic_counts() {
    auto rows = periodic_counts(uint_list(o.ns), uint_list(o.ks));
    Tsv t{{"n", "k", "ell", "fix", "lower", "upper", "per", "orbit_counts", "ok"}, {}, {}};
    bool ok = true;
    for (const auto& r : rows) {
        std::string oc;
        for (auto c : r.orbit_counts) oc += (oc.empty() ? "" : ",") + std::to_string(c);
        t.rows.push_back({std::to_string(r.n), std::to_string(r.k), std::to_string(r.ell), std::to_string(r.fix),
                          str(r.lower), str(r.upper), std::to_string(r.per), oc, yes(r.ok)});
        ok = ok && r.ok;
    }
    emit(o.out, t.render());
    if (!ok) throw CheckFailed("counting law violated");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact experiments with piecewise affine measure-preserving maps"};
    app.set_version_flag("--version", std::string("pamlab ") + PAMLAB_VERSION);
    app.require_subcommand(1);

    auto rat_opt = [](CLI::App* s, const std::string& flag, std::string& dst, const std::string& help) {
        return s->add_option(flag, dst, help);
    };

    CLI::App* map = app.add_subcommand("map", "inspect maps")->require_subcommand(1);
    leaf(map, "catalog", "write a named map", cmd_map_catalog)
        ->add_option("--name", o.name, "tent, valley, identity or transverse-base")
        ->required();
    map->get_subcommand("catalog")->add_option("--out", o.out);
    {
        auto* s = leaf(map, "verify", "check Lebesgue measure preservation", cmd_map_verify);
        s->add_option("--map", o.map)->required();
    }
    {
        auto* s = leaf(map, "iterate", "k-th iterate", cmd_map_iterate);
        s->add_option("--map", o.map)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(map, "crit", "critical points", cmd_map_crit);
        s->add_option("--map", o.map)->required();
        s->add_option("--out", o.out);
    }

    CLI::App* perturb = app.add_subcommand("perturb", "window perturbations")->require_subcommand(1);
    {
        auto* s = leaf(perturb, "mfold", "regular m-fold window perturbation", cmd_perturb_mfold);
        s->add_option("--map", o.map)->required();
        s->add_option("--window", o.window, "a:b")->required();
        s->add_option("--m", o.m)->required()->check(CLI::Range(1u, 1u << 30));
        s->add_flag("--waive-endpoints", o.waive, "allow even m on a window touching 0 or 1");
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(perturb, "transverse", "make every Fix(f,k) point transverse", cmd_perturb_transverse);
        s->add_option("--map", o.map)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
        rat_opt(s, "--budget", o.budget, "upper bound for rho(f,g)")->required();
        s->add_option("--out", o.out);
        s->add_option("--log", o.log, "repair log (default stderr)");
    }

    CLI::App* periodic = app.add_subcommand("periodic", "periodic points and counting laws")->require_subcommand(1);
    {
        auto* s = leaf(periodic, "fix", "solutions of f^k(x) = x", cmd_periodic_fix);
        s->add_option("--map", o.map)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(periodic, "construct", "(2n+1)-fold windows on every Fix(g,k) orbit", cmd_periodic_construct);
        s->add_option("--map", o.map)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
        s->add_option("--i", o.i)->check(CLI::Range(1u, 1u << 30));
        s->add_option("--n", o.n)->check(CLI::Range(1u, 1u << 30));
        s->add_option("--out", o.out);
        s->add_option("--budget-out", o.budget_out);
    }
    {
        auto* s = leaf(periodic, "count", "check the counting and density laws", cmd_periodic_count);
        s->add_option("--map", o.map, "h")->required();
        s->add_option("--base", o.base, "g")->required();
        s->add_option("--budget", o.budget)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
    }
    {
        auto* s = leaf(periodic, "profile", "box-counting profile", cmd_periodic_profile);
        s->add_option("--map", o.map)->required();
        s->add_option("--budget", o.budget)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
        s->add_option("--out", o.out);
    }

    CLI::App* shadow = app.add_subcommand("shadow", "shadowing kits and tracing")->require_subcommand(1);
    {
        auto* s = leaf(shadow, "kit", "build a shadowing kit", cmd_shadow_kit);
        s->add_option("--map", o.map)->required();
        rat_opt(s, "--eps", o.eps, "tracing accuracy");
        s->add_flag("--steepen", o.steepen, "steepen the map first");
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(shadow, "verify", "re-check a stored kit", cmd_shadow_verify);
        s->add_option("--kit", o.kit)->required();
        s->add_option("--map", o.map, "the map the kit was built from")->required();
        s->add_flag("--steepen", o.steepen);
    }
    {
        auto* s = leaf(shadow, "orbit", "seeded random pseudo orbit", cmd_shadow_orbit);
        s->add_option("--kit", o.kit)->required();
        s->add_option("--g", o.g, "map (default: the kit's F)");
        s->add_option("--seed", o.seed);
        s->add_option("--length", o.length)->check(CLI::Range(1u, 1u << 30));
        s->add_option("--periodic", o.periodic, "period N of a periodic orbit");
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(shadow, "trace", "trace a pseudo orbit", cmd_shadow_trace);
        s->add_option("--kit", o.kit)->required();
        s->add_option("--g", o.g, "map (default: the kit's F)");
        s->add_option("--orbit", o.orbit)->required();
        s->add_option("--map", o.map, "verify the kit against this map first");
        s->add_flag("--steepen", o.steepen);
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(shadow, "tower", "s-limit tower", cmd_shadow_tower);
        s->add_option("--map", o.map)->required();
        rat_opt(s, "--eps", o.eps, "");
        s->add_option("--depth", o.depth)->check(CLI::Range(1u, 1u << 30));
        s->add_flag("--steepen", o.steepen);
        s->add_option("--out", o.out);
    }

    CLI::App* conj = app.add_subcommand("conj", "measures and conjugation")->require_subcommand(1);
    {
        auto* s = leaf(conj, "cdf", "distribution homeomorphism of a measure", cmd_conj_cdf);
        s->add_option("--measure", o.measure)->required();
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(conj, "apply", "h o f o h^-1", cmd_conj_apply);
        s->add_option("--map", o.map)->required();
        s->add_option("--homeo", o.homeo)->required();
        s->add_flag("--inverse", o.inverse, "conjugate by h^-1 instead");
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(conj, "demo", "full-measure construction at finite depth", cmd_conj_demo);
        s->add_option("--map", o.map)->required();
        s->add_option("--K", o.K)->check(CLI::Range(1u, 1u << 30));
        s->add_option("--eps", o.eps_list, "comma-separated schedule");
        s->add_option("--depth", o.depth)->check(CLI::Range(1u, 1u << 30));
        s->add_option("--cantor-eps", o.cantor_eps);
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(conj, "prohorov", "enclose the Prohorov distance", cmd_conj_prohorov);
        s->add_option("--mu", o.mu)->required();
        s->add_option("--nu", o.nu)->required();
        s->add_option("--tol", o.tol);
        s->add_option("--out", o.out);
    }

    CLI::App* circle = app.add_subcommand("circle", "circle maps via lifts")->require_subcommand(1);
    {
        auto* s = leaf(circle, "fix", "x in [0,1) with F^k(x) - x an integer", cmd_circle_fix);
        s->add_option("--lift", o.lift)->required();
        s->add_option("--k", o.k)->required()->check(CLI::Range(1u, 1u << 30));
        s->add_option("--out", o.out);
    }
    {
        auto* s = leaf(circle, "verify", "Lebesgue measure preservation on the circle", cmd_circle_verify);
        s->add_option("--lift", o.lift)->required();
    }
    {
        auto* s = leaf(circle, "invertible", "degree-1 invertibility with fold witness", cmd_circle_invertible);
        s->add_option("--lift", o.lift)->required();
    }
    {
        auto* s = leaf(circle, "periodic", "periodic point search up to a horizon", cmd_circle_periodic);
        s->add_option("--lift", o.lift)->required();
        s->add_option("--kmax", o.kmax)->check(CLI::Range(1u, 1u << 30));
    }

    CLI::App* suite = app.add_subcommand("suite", "batteries")->require_subcommand(1);
    {
        auto* s = leaf(suite, "acceptance", "run the acceptance battery", cmd_suite_acceptance);
        s->add_option("--only", o.only, "single criterion")->check(CLI::Range(1, kCriteria));
        s->add_flag("--quiet", o.quiet);
    }
    {
        auto* s = leaf(suite, "periodic-counts", "counting-law table for the bundled base map",
                       cmd_suite_periodic_counts);
        s->add_option("--n", o.ns, "comma-separated n values");
        s->add_option("--k", o.ks, "comma-separated k values");
        s->add_option("--out", o.out);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return action ? action() : 2;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
