#include "pam/suite.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "pam/catalog.hpp"
#include "pam/circle.hpp"
#include "pam/conjugate.hpp"
#include "pam/counting.hpp"
#include "pam/perturb.hpp"
#include "pam/shadowing.hpp"
#include "pam/window.hpp"

namespace pam {

namespace {

using Details = std::vector<std::string>;

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t s) : eng(s) {}
    std::uint64_t below(std::uint64_t n) { return eng() % n; }
    Rat dyadic(unsigned e) {
        std::uint64_t den = std::uint64_t(1) << e;
        return make_rat(static_cast<long>(below(den + 1)), static_cast<long>(den));
    }
};

std::string num(std::size_t n) { return std::to_string(n); }

std::string sci(const Rat& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", to_double(r));
    return buf;
}

// ---- 1 -------------------------------------------------------------------

bool c1(Details& d) {
    Rng r(1);
    std::vector<PAMap> maps{PAMap::tent(), PAMap::valley()};
    const unsigned folds[] = {3, 5, 7};
    while (maps.size() < 22) {
        Rat a = r.dyadic(6), b = r.dyadic(6);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        const PAMap& base = maps[maps.size() % 2];
        maps.push_back(window_mfold(base, {{a, b}, folds[maps.size() % 3]}));
    }
    bool ok = true;
    std::size_t checked = 0;
    auto check = [&](const PAMap& f, const std::string& what) {
        ++checked;
        LebesgueCheck c = verify_lebesgue(f);
        if (!c.ok) {
            ok = false;
            d.push_back(what + " fails on [" + str(c.cell.lo) + ", " + str(c.cell.hi) + "]");
        }
    };
    for (std::size_t i = 0; i < maps.size(); ++i) {
        PAMap p = maps[i];
        check(p, "map " + num(i));
        for (unsigned j = 2; j <= 4; ++j) {
            p = compose(maps[i], p);
            check(p, "map " + num(i) + "^" + std::to_string(j));
        }
    }
    // mixed words of length 2..4
    for (int w = 0; w < 60; ++w) {
        std::size_t len = 2 + r.below(3);
        PAMap p = maps[r.below(maps.size())];
        for (std::size_t j = 1; j < len; ++j) p = compose(maps[r.below(maps.size())], p);
        check(p, "word " + std::to_string(w));
    }
    d.push_back(num(checked) + " maps verified (tent, valley, 20 windows with m in {3,5,7}, iterates to 4, 60 words)");
    LebesgueCheck half = verify_lebesgue(PAMap({Rat(0), Rat(1)}, {Rat(0), Rat(1, 2)}));
    if (half.ok) {
        ok = false;
        d.push_back("x/2 accepted");
    } else {
        d.push_back("x/2 rejected, witness cell [" + str(half.cell.lo) + ", " + str(half.cell.hi) + "] sum " +
                    str(half.sum));
    }
    return ok;
}

// ---- 2, 3 ----------------------------------------------------------------

bool counting(Details& d, bool density) {
    PAMap g = transverse_base();
    bool ok = true;
    for (unsigned n = 1; n <= 3; ++n)
        for (unsigned k = 1; k <= 3; ++k) {
            Theorem1Result t = theorem1_construct(g, k, 1, n);
            CountReport rep = count_check(t.h, g, t.budget, k);
            std::vector<std::string> want = density ? std::vector<std::string>{"local-density", "separation"}
                                                    : std::vector<std::string>{"orbit-count", "total-count"};
            std::string line = "n=" + std::to_string(n) + " k=" + std::to_string(k) + ":";
            for (const auto& c : rep.clauses) {
                if (std::find(want.begin(), want.end(), c.name) == want.end()) continue;
                ok = ok && c.ok;
                line += " " + c.name + (c.ok ? " ok" : " FAIL") + " (" + c.detail + ")";
            }
            d.push_back(line);
        }
    return ok;
}

// ---- 4 -------------------------------------------------------------------

bool c4(Details& d) {
    PAMap g = transverse_base();
    bool ok = true;
    auto run = [&](unsigned k, unsigned i, unsigned n, const std::string& clause) {
        Theorem1Result t = theorem1_construct(g, k, i, n);
        ScalingProfile p = scaling_profile(t.h, t.budget, k);
        for (const auto& row : p.rows)
            if (row.ratio.width() > kLogWidth) {
                ok = false;
                d.push_back("enclosure wider than 1e-12");
            }
        for (const auto& c : p.checks) {
            if (c.name != clause) continue;
            bool pass = c.ok && !c.skipped;
            ok = ok && pass;
            d.push_back("k=" + std::to_string(k) + " i=" + std::to_string(i) + " n=" + std::to_string(n) + " " +
                        c.name + (pass ? " ok: " : " FAIL: ") + c.detail);
        }
    };
    for (unsigned i : {2u, 3u})
        for (unsigned k : {1u, 2u})
            for (unsigned n : {1u, 2u}) run(k, i, n, "lower-box");
    run(2, 1, 10, "upper-box");
    for (unsigned n : {2u, 3u, 10u}) run(2, 1, n, "upper-box-per");
    return ok;
}

// ---- 5 -------------------------------------------------------------------

// Sign chase of D - m over a uniform grid, then bisection of every bracket.
// With circle set, every integer m counts and the right end is excluded.
std::vector<IntervalQ> grid_bisect(const std::function<Rat(const Rat&)>& D, unsigned n, bool circle,
                                   unsigned steps = 30) {
    std::vector<IntervalQ> out;
    auto targets = [&](const Rat& lo, const Rat& hi) {
        std::vector<Int> t;
        if (circle) {
            for (Int m = floor_int(lo) + 1; Rat(m) < hi; ++m) t.push_back(m);
        } else if (lo < 0 && 0 < hi) {
            t.push_back(0);
        }
        return t;
    };
    Rat prev = D(Rat(0));
    for (unsigned j = 0; j < n; ++j) {
        Rat x0 = make_rat(j, n), x1 = make_rat(j + 1, n);
        Rat d0 = prev, d1 = D(x1);
        prev = d1;
        if (circle ? d0.get_den() == 1 : d0 == 0) out.push_back({x0, x0});
        for (const Int& m : targets(std::min(d0, d1), std::max(d0, d1))) {
            Rat l = x0, h = x1;
            int sl = sgn(Rat(d0 - m));
            for (unsigned s = 0; s < steps; ++s) {
                Rat mid = (l + h) / 2;
                int sm = sgn(Rat(D(mid) - m));
                if (sm == 0) {
                    l = h = mid;
                    break;
                }
                if (sm == sl)
                    l = mid;
                else
                    h = mid;
            }
            out.push_back({l, h});
        }
    }
    if (!circle && prev == 0) out.push_back({Rat(1), Rat(1)});
    return out;
}

bool matches(const std::vector<Rat>& pts, const std::vector<IntervalQ>& brackets) {
    if (pts.size() != brackets.size()) return false;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (!brackets[i].contains(pts[i])) return false;
    return true;
}

bool c5(Details& d) {
    bool ok = true;
    PAMap T = PAMap::tent();
    std::string tent = "tent:", dbl = "doubling:";
    for (unsigned k = 1; k <= 12; ++k) {
        auto pts = fixed_locations(fix_points(T, k));
        auto D = [&](const Rat& x) {
            Rat y = x;
            for (unsigned i = 0; i < k; ++i) y = T(y);
            return Rat(y - x);
        };
        bool good = pts.size() == (std::size_t(1) << k) && matches(pts, grid_bisect(D, 4u << k, false));
        ok = ok && good;
        tent += " " + num(pts.size()) + (good ? "" : "(FAIL)");
    }
    LiftPAMap F = LiftPAMap::linear(2);
    for (unsigned k = 1; k <= 10; ++k) {
        std::vector<Rat> pts;
        for (const auto& p : circle_fix(F, k)) pts.push_back(p.x());
        auto D = [&](const Rat& x) {
            Rat y = x;
            for (unsigned i = 0; i < k; ++i) y = F(y);
            return Rat(y - x);
        };
        bool good = pts.size() == (std::size_t(1) << k) - 1 && matches(pts, grid_bisect(D, 4u << k, true));
        ok = ok && good;
        dbl += " " + num(pts.size()) + (good ? "" : "(FAIL)");
    }
    d.push_back(tent);
    d.push_back(dbl);
    return ok;
}

// ---- 6 -------------------------------------------------------------------

bool c6(Details& d) {
    bool ok = true;
    PAMap T = steepen(PAMap::tent());
    for (const Rat& eps : {Rat(1, 10), Rat(1, 50)}) {
        ShadowingKit kit = shadowing_perturbation(T, eps);
        auto clauses = verify_kit(kit, T);
        bool kit_ok = all_ok(clauses);
        for (const auto& c : clauses)
            if (!c.ok) d.push_back("eps=" + str(eps) + " kit clause " + c.name + " fails: " + c.detail);
        const PAMap& g = kit.F;
        Rat worst = 0;
        std::size_t traced = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            PseudoOrbit po = random_pseudo_orbit(g, kit.delta, 200, seed);
            Trace t = trace(kit, g, po);
            worst = std::max(worst, t.max_err);
            if (t.max_err < eps) ++traced;
        }
        Rat pworst = 0;
        std::size_t ptraced = 0;
        for (std::uint64_t s = 1; s <= 20; ++s) {
            unsigned N = 1 + static_cast<unsigned>((s - 1) % 10);
            PseudoOrbit po = random_periodic_pseudo_orbit(kit, g, N, 1000 + s);
            PeriodicTrace t = trace_periodic(kit, g, po);
            Rat y = t.z;
            for (std::size_t i = 0; i < t.period; ++i) y = g(y);
            pworst = std::max(pworst, t.max_err);
            if (t.max_err < eps && y == t.z) ++ptraced;
        }
        bool good = kit_ok && traced == 100 && ptraced == 20;
        ok = ok && good;
        d.push_back("eps=" + str(eps) + ": delta=" + str(kit.delta) + ", " + num(kit.F.pieces()) + " pieces, kit " +
                    (kit_ok ? "ok" : "FAIL") + ", " + num(traced) + "/100 traced (max error " +
                    sci(worst) + "), " + num(ptraced) + "/20 periodic exact (max error " +
                    sci(pworst) + ")");
    }
    return ok;
}

// ---- 7 -------------------------------------------------------------------

bool c7(Details& d) {
    PAMap T = steepen(PAMap::tent());
    const Rat eps(1, 8);
    // throws ResourceError when a level cannot fit under the piece cap
    SLimitTower tower = s_limit_tower(T, eps, 3);
    bool ok = all_ok(tower.checks);
    for (const auto& c : tower.checks)
        if (!c.ok) d.push_back("tower clause " + c.name + " fails: " + c.detail);
    std::vector<ScheduleLevel> s;
    for (std::size_t n = 0; n < tower.levels.size(); ++n) s.push_back({100 * n, tower.levels[n].kit.delta});
    PseudoOrbit po = random_asymptotic_pseudo_orbit(tower.levels.back().kit.F, s, 300, 7);
    AsymptoticTrace t = trace_asymptotic(tower, po);
    for (std::size_t n = 0; n < t.segment_max.size(); ++n) {
        bool seg = t.segment_max[n] < tower.levels[n].eps;
        ok = ok && seg;
        d.push_back("segment " + num(n + 1) + " max error " + sci(t.segment_max[n]) +
                    (seg ? " < " : " >= ") + str(tower.levels[n].eps));
    }
    ok = ok && t.max_err < eps;
    return ok;
}

// ---- 8 -------------------------------------------------------------------

MeasureRep random_density(Rng& r) {
    std::vector<Rat> xs, ys;
    while (xs.size() < 4) {
        Rat x = r.dyadic(6);
        if (x > 0 && x < 1 && std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    while (ys.size() < 4) {
        Rat y = r.dyadic(6);
        if (y > 0 && y < 1 && std::find(ys.begin(), ys.end(), y) == ys.end()) ys.push_back(y);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    xs.insert(xs.begin(), Rat(0));
    ys.insert(ys.begin(), Rat(0));
    xs.push_back(1);
    ys.push_back(1);
    // collinear interior nodes are merged by the canonical form
    return MeasureRep::pa_density(PAMap(Pwl(xs, ys)));
}

bool c8(Details& d) {
    Rng r(8);
    bool ok = true;
    std::size_t intervals = 0, conj = 0, fixk = 0;
    for (int t = 0; t < 10; ++t) {
        MeasureRep nu = random_density(r);
        Homeo h = cdf_homeo(nu);
        for (int s = 0; s < 100; ++s) {
            Rat a = r.dyadic(10), b = r.dyadic(10);
            if (b < a) std::swap(a, b);
            bool eq = h.forward.image(a, b).length() == mass(nu, a, b);
            ok = ok && eq;
            intervals += eq;
        }
        PAMap f0 = t % 2 ? PAMap::valley() : PAMap::tent();
        if (t >= 6) f0 = window_mfold(f0, {{Rat(1, 8), Rat(3, 8)}, 3});
        PAMap fnu = conjugate(f0, Homeo{h.inverse, h.forward, false});
        bool pres = preserves(fnu, nu);
        PAMap g = conjugate(fnu, h);
        bool leb = verify_lebesgue(g).ok;
        ok = ok && pres && leb;
        conj += pres && leb;
        unsigned kmax = t >= 6 ? 4 : 8;
        bool inv = true;
        for (unsigned k = 1; k <= kmax; ++k) inv = inv && fix_points(fnu, k).size() == fix_points(g, k).size();
        ok = ok && inv;
        fixk += inv;
    }
    d.push_back(num(intervals) + "/1000 intervals satisfy lambda(h(A)) = nu(A)");
    d.push_back(num(conj) + "/10 conjugated preservers pass verify_lebesgue");
    d.push_back(num(fixk) + "/10 conjugate pairs have equal #Fix for k <= 8 (k <= 4 for windowed maps)");
    return ok;
}

// ---- 9 -------------------------------------------------------------------

bool c9(Details& d) {
    bool ok = true;
    Rat tol = Rat(1) / Rat(pow_rat(Rat(10), kProhorovTolExponent));
    MeasureRep atom = MeasureRep::atomic({{Rat(1, 2), Rat(1)}});
    ProhorovEnclosure e = prohorov(atom, MeasureRep::lebesgue(), tol);
    bool atom_ok = e.lo >= Rat(1, 3) - tol && e.hi <= Rat(1, 3) + tol;
    ok = atom_ok;
    d.push_back("D(atom at 1/2, lambda) in [" + str(e.lo) + ", " + str(e.hi) + "]" + (atom_ok ? "" : " FAIL"));
    PAMap g = transverse_base();
    const Rat eps(1, 8);
    std::size_t scenarios = 0, good = 0;
    Rat worst = 0;
    for (unsigned k = 1; k <= 3; ++k)
        for (unsigned n = 1; n <= 2; ++n) {
            Theorem1Result t = theorem1_construct(g, k, 1, n);
            for (const auto& rep : t.budget.reps) {
                ++scenarios;
                CantorSmoothing cs = cantor_smooth(t.h, rep.x, rep.period, eps, 2);
                Rat hi = prohorov(co_measure(t.h, rep.x, rep.period), cs.nu, Rat(1, 1 << 20)).hi;
                worst = std::max(worst, hi);
                bool pass = cs.ok() && hi < eps;
                good += pass;
                if (!pass) d.push_back("scenario x=" + str(rep.x) + " k=" + std::to_string(rep.period) + " fails");
            }
        }
    ok = ok && good == scenarios;
    d.push_back(num(good) + "/" + num(scenarios) + " cantor scenarios certified with ball mass >= 1/k, max D upper " +
                sci(worst) + " < 1/8");
    return ok;
}

// ---- 10 ------------------------------------------------------------------

bool c10(Details& d) {
    struct Input {
        std::string name;
        PAMap f;
        Rat budget;
    };
    std::vector<Input> in{{"identity", PAMap::identity(), Rat(1, 10)},
                          {"tent", PAMap::tent(), Rat(1, 50)},
                          {"valley", PAMap::valley(), Rat(1, 50)},
                          {"transverse-base", transverse_base(), Rat(1, 50)}};
    bool ok = true;
    for (const auto& i : in)
        for (unsigned k = 1; k <= 3; ++k) {
            TransverseResult r = make_transverse(i.f, k, i.budget);
            TransverseAudit a = audit_transverse(r.g, k);
            bool pass = a.ok && r.distance < i.budget && verify_lebesgue(r.g).ok;
            ok = ok && pass;
            d.push_back(i.name + " k=" + std::to_string(k) + ": " + num(fix_points(r.g, k).size()) +
                        " transverse points, rho " + str(r.distance) + (pass ? "" : " FAIL " + a.failure));
        }
    return ok;
}

const char* kTitles[kCriteria] = {"measure preservation",   "counting law",         "window density",
                                  "box scaling",            "fixed-point counts",   "shadowing",
                                  "s-limit tower",          "conjugation",          "prohorov",
                                  "transversalization"};

}  // namespace

CriterionResult run_criterion(int id) {
    if (id < 1 || id > kCriteria) throw DomainError("criterion must be in 1.." + std::to_string(kCriteria));
    CriterionResult r;
    r.id = id;
    r.title = kTitles[id - 1];
    auto t0 = std::chrono::steady_clock::now();
    try {
        switch (id) {
            case 1: r.pass = c1(r.details); break;
            case 2: r.pass = counting(r.details, false); break;
            case 3: r.pass = counting(r.details, true); break;
            case 4: r.pass = c4(r.details); break;
            case 5: r.pass = c5(r.details); break;
            case 6: r.pass = c6(r.details); break;
            case 7: r.pass = c7(r.details); break;
            case 8: r.pass = c8(r.details); break;
            case 9: r.pass = c9(r.details); break;
            default: r.pass = c10(r.details); break;
        }
    } catch (const Error& e) {
        r.pass = false;
        r.details.push_back(std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << " " << r.title;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << " (" << r.seconds << " s)";
    return os.str();
}

std::vector<CountRow> periodic_counts(const std::vector<unsigned>& ns, const std::vector<unsigned>& ks) {
    PAMap g = transverse_base();
    std::vector<CountRow> out;
    for (unsigned n : ns)
        for (unsigned k : ks) {
            Theorem1Result t = theorem1_construct(g, k, 1, n);
            CountReport rep = count_check(t.h, g, t.budget, k);
            CountRow row;
            row.n = n;
            row.k = k;
            row.ell = t.budget.ell();
            row.fix = rep.fix.size();
            row.per = rep.per_count;
            Rat m(2 * n + 1);
            Rat mk = pow_rat(m, k);
            row.lower = std::max(Rat(m * Rat(row.ell)), mk);
            row.upper = mk * k * Rat(row.ell);
            row.orbit_counts = rep.orbit_counts;
            row.ok = rep.ok();
            out.push_back(row);
        }
    return out;
}

}  // namespace pam
