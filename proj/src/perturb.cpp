#include "pam/perturb.hpp"

#include <algorithm>
#include <set>

#include "pam/periodic.hpp"
#include "pam/window.hpp"

namespace pam {

std::vector<CriticalConnection> find_critical_connections(const PAMap& f, unsigned k) {
    std::vector<Rat> c = crit(f);
    std::set<Rat> cs(c.begin(), c.end());
    std::vector<CriticalConnection> out;
    for (const Rat& c1 : c) {
        Rat y = c1;
        for (unsigned l = 1; l <= k; ++l) {
            y = f(y);
            if (cs.count(y)) {
                out.push_back({c1, y, l});
                break;
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CriticalConnection& a, const CriticalConnection& b) {
        return a.length != b.length ? a.length < b.length : a.source < b.source;
    });
    return out;
}

namespace {

Rat iterate_at(const PAMap& f, Rat x, unsigned n) {
    for (unsigned i = 0; i < n; ++i) x = f(x);
    return x;
}

bool boundary_fixed(const PAMap& f, const Rat& x0, unsigned k) { return iterate_at(f, x0, k) == x0; }

unsigned period_of(const PAMap& f, const Rat& x0, unsigned k) {
    Rat y = x0;
    for (unsigned d = 1; d <= k; ++d) {
        y = f(y);
        if (y == x0) return d;
    }
    return k;
}

bool has_unit_slope(const PAMap& f) {
    for (std::size_t i = 0; i < f.pieces(); ++i)
        if (rabs(f.slope(i)) == 1) return true;
    return false;
}

// One boundary point; returns true if a repair was applied.
bool repair_side(PAMap& g, bool at_zero, unsigned k, const Rat& max_rho, RepairLog* log, const Rat& min_a) {
    Rat x0 = at_zero ? Rat(0) : Rat(1);
    if (!boundary_fixed(g, x0, k)) return false;
    unsigned j = period_of(g, x0, k);
    Rat s = max_abs_slope(g);
    Rat a = pow2_at_most(std::min(Rat(1, 4), Rat(max_rho / (2 * s))));
    for (; a >= min_a; a /= 2) {
        IntervalQ w = at_zero ? IntervalQ{0, a} : IntervalQ{1 - a, 1};
        bool ok = true;
        IntervalQ img = w;
        for (unsigned i = 1; i < j && ok; ++i) {
            img = g.image(img.lo, img.hi);
            if (img.hi >= w.lo && img.lo <= w.hi) ok = false;
        }
        Rat inner = at_zero ? w.hi : w.lo;
        if (!ok || iterate_at(g, inner, j) == x0) continue;
        PAMap cand = window_mfold(g, {w, 2, true});
        if (boundary_fixed(cand, x0, k) || has_unit_slope(cand)) continue;
        if (log)
            log->add("boundary " + str(x0) + " (period " + std::to_string(j) + "): 2-fold window on [" + str(w.lo) +
                     ", " + str(w.hi) + "]");
        g = std::move(cand);
        return true;
    }
    throw ConstructionError("no admissible boundary window of size >= " + str(min_a) + " at " + str(x0));
}

}  // namespace

PAMap remove_boundary_fix(const PAMap& f, unsigned k, const Rat& max_rho, RepairLog* log, const Rat& min_a) {
    if (k == 0) throw DomainError("k must be positive");
    PAMap g = f;
    Rat left = max_rho;
    for (int pass = 0; pass < 4; ++pass) {
        bool changed = false;
        for (bool at_zero : {true, false}) {
            PAMap before = g;
            if (repair_side(g, at_zero, k, left / 2, log, min_a)) {
                changed = true;
                left -= uniform_distance(before, g);
            }
        }
        if (!changed) return g;
    }
    if (boundary_fixed(g, 0, k) || boundary_fixed(g, 1, k))
        throw ConstructionError("boundary repair did not converge");
    return g;
}

PAMap shift_turning_point(const PAMap& f, const Rat& c, const Rat& t, const std::vector<Rat>& forbidden) {
    const auto& xs = f.xs();
    auto it = std::lower_bound(xs.begin(), xs.end(), c);
    if (it == xs.end() || *it != c || it == xs.begin() || it + 1 == xs.end())
        throw PreconditionError(str(c) + " is not an interior node");
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    Rat sl = f.slope(i - 1), sr = f.slope(i);
    if (sgn(sl) * sgn(sr) >= 0) throw PreconditionError(str(c) + " is not a turning point");
    Rat p = c - t / rabs(sl), q = c + t / rabs(sr);
    if (p < xs[i - 1] || q > xs[i + 1]) throw WindowError("shift window leaves the adjacent pieces");
    Rat dist = std::min(Rat(c - p), Rat(q - c));
    for (const Rat& z : forbidden)
        if (z != c) dist = std::min(dist, rabs(z - c));
    Rat d = dist / 2;
    Rat top = f(c);
    for (int tries = 0; tries < 64; ++tries, d /= 2) {
        Rat cn = c + d;
        Rat s0 = (top - f(p)) / (cn - p), s1 = (f(q) - top) / (q - cn);
        if (rabs(s0) == 1 || rabs(s1) == 1) continue;
        return peak_shift(f, p, q, cn);
    }
    throw ConstructionError("no admissible displacement for the turning point at " + str(c));
}

TransverseAudit audit_transverse(const PAMap& g, unsigned k) {
    TransverseAudit a;
    auto fail = [&](std::string s) {
        a.ok = false;
        a.failure = std::move(s);
        return a;
    };
    for (std::size_t i = 0; i < g.pieces(); ++i)
        if (rabs(g.slope(i)) == 1) return fail("slope +-1 on [" + str(g.xs()[i]) + ", " + str(g.xs()[i + 1]) + "]");
    if (boundary_fixed(g, 0, k)) return fail("0 is in Fix(g,k)");
    if (boundary_fixed(g, 1, k)) return fail("1 is in Fix(g,k)");
    auto conns = find_critical_connections(g, k);
    if (!conns.empty())
        return fail(std::to_string(conns.size()) + " critical connection(s), first " + str(conns[0].source) + " -> " +
                    str(conns[0].target));
    bool per = false;
    for (const auto& p : fix_points(g, k)) {
        if (!p.is_point()) return fail("plateau in Fix(g,k)");
        if (!classify_transverse(g, p).transverse) return fail("fixed point " + str(p.x()) + " is not transverse");
        per = per || p.least_period == k;
    }
    if (!per) return fail("Per(g,k) is empty");
    return a;
}

namespace {

// 3-fold windows tiling every slope +-1 piece, each short enough to move the
// map by at most share.
PAMap remove_unit_slopes(const PAMap& f, const Rat& share, RepairLog& log) {
    std::vector<IntervalQ> pieces;
    for (std::size_t i = 0; i < f.pieces(); ++i)
        if (rabs(f.slope(i)) == 1) pieces.push_back({f.xs()[i], f.xs()[i + 1]});
    PAMap g = f;
    for (const auto& pc : pieces) {
        Int count = 1;
        while (pc.length() / Rat(count) > share) count *= 2;
        Rat step = pc.length() / Rat(count);
        if (count > Int(static_cast<unsigned long>(piece_cap())))
            throw ResourceError("too many windows for the slope +-1 piece");
        unsigned long n = count.get_ui();
        for (unsigned long j = 0; j < n; ++j) {
            Rat lo = pc.lo + step * Rat(static_cast<unsigned long>(j));
            Rat hi = j + 1 == n ? pc.hi : lo + step;
            g = window_mfold(g, {{lo, hi}, 3});
        }
        log.add("slope +-1 on [" + str(pc.lo) + ", " + str(pc.hi) + "]: " + std::to_string(n) + " 3-fold window(s)");
    }
    return g;
}

PAMap ensure_periodic(const PAMap& f, unsigned k, const Rat& share, RepairLog& log) {
    if (!per_points(f, k).empty()) return f;
    for (const auto& p : fix_points(f, 1)) {
        if (!p.is_point() || p.x() == 0 || p.x() == 1) continue;
        const Rat& x = p.x();
        std::size_t i = f.pwl().piece_of(x);
        if (f.xs()[i] == x) continue;  // on a node: try another point
        Rat s = rabs(f.slope(i));
        Rat r = std::min(Rat(share / (4 * s)), Rat(std::min(Rat(x - f.xs()[i]), Rat(f.xs()[i + 1] - x)) / 2));
        PAMap g = window_mfold(f, {{x - r, x + r}, 3});
        if (per_points(g, k).empty()) continue;
        log.add("Per(g," + std::to_string(k) + ") empty: 3-fold window on [" + str(x - r) + ", " + str(x + r) + "]");
        return g;
    }
    return f;
}

PAMap break_connections(const PAMap& f, unsigned k, const Rat& share, RepairLog& log) {
    PAMap g = f;
    Rat t_share = share / 2;
    for (int step = 0; step < 256; ++step, t_share /= 2) {
        auto conns = find_critical_connections(g, k);
        if (conns.empty()) return g;
        const auto& cc = conns.front();
        std::vector<Rat> forbidden = crit(g);
        for (const Rat& z : orbit(g, cc.source, cc.length))
            if (z != cc.target) forbidden.push_back(z);
        const Rat& c = cc.target;
        const auto& xs = g.xs();
        std::size_t i = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), c) - xs.begin());
        Rat zl = xs[i - 1], zr = xs[i + 1];
        for (const Rat& z : forbidden) {
            if (z < c && z > zl) zl = z;
            if (z > c && z < zr) zr = z;
        }
        Rat t = std::min(t_share, Rat(rabs(g.slope(i - 1)) * (c - zl) / 2));
        t = std::min(t, Rat(rabs(g.slope(i)) * (zr - c) / 2));
        PAMap before = g;
        g = shift_turning_point(g, c, t, forbidden);
        Rat moved = g.xs()[i];
        log.add("connection " + str(cc.source) + " -> " + str(cc.target) + " (length " + std::to_string(cc.length) +
                "): turning point moved to " + str(moved));
    }
    throw ConstructionError("critical connections keep reappearing");
}

}  // namespace

TransverseResult make_transverse(const PAMap& f, unsigned k, const Rat& budget, unsigned max_rounds) {
    if (k == 0) throw DomainError("k must be positive");
    if (budget <= 0) throw DomainError("budget must be positive");
    LebesgueCheck lc = verify_lebesgue(f);
    if (!lc.ok) throw PreconditionError("input map is not measure-preserving");
    TransverseResult r{f, Rat(0), {}};
    Rat spent = 0;
    auto step = [&](auto&& fn) {
        PAMap before = r.g;
        r.g = fn(before, (budget - spent) / 4);
        spent += uniform_distance(before, r.g);
    };
    for (unsigned round = 0; round < max_rounds; ++round) {
        step([&](const PAMap& g, const Rat& s) { return remove_unit_slopes(g, s, r.log); });
        step([&](const PAMap& g, const Rat& s) { return remove_boundary_fix(g, k, s, &r.log); });
        step([&](const PAMap& g, const Rat& s) { return ensure_periodic(g, k, s, r.log); });
        step([&](const PAMap& g, const Rat& s) { return break_connections(g, k, s, r.log); });
        TransverseAudit a = audit_transverse(r.g, k);
        if (a.ok) {
            r.distance = uniform_distance(f, r.g);
            if (r.distance >= budget) throw ConstructionError("internal: repair exceeded its budget");
            if (!verify_lebesgue(r.g).ok) throw ConstructionError("internal: repair broke measure preservation");
            return r;
        }
        r.log.add("round " + std::to_string(round + 1) + " incomplete: " + a.failure);
    }
    auto conns = find_critical_connections(r.g, k);
    throw ConstructionError("budget exhausted after " + std::to_string(max_rounds) + " rounds; " +
                            std::to_string(conns.size()) + " critical connection(s) remain; " +
                            audit_transverse(r.g, k).failure);
}

}  // namespace pam
