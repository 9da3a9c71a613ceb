#include "pam/counting.hpp"

#include <mpfr.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "pam/window.hpp"

namespace pam {

Rat PerturbationBudget::bound() const {
    Rat kl(static_cast<unsigned long>(k) * ell());
    Rat m = Rat(1) / (Rat(i) * kl);
    m = std::min(m, eta);
    m = std::min(m, gamma);
    m = std::min(m, beta);
    m = std::min(m, Rat(Rat(1) / pow_rat(kl, i)));
    return m / (2 * tau);
}

namespace {

Rat ipow(unsigned base, unsigned e) { return pow_rat(Rat(base), e); }

std::size_t count_in(const std::vector<Rat>& sorted, const Rat& lo, const Rat& hi) {
    auto b = std::lower_bound(sorted.begin(), sorted.end(), lo);
    auto e = std::upper_bound(sorted.begin(), sorted.end(), hi);
    return e > b ? static_cast<std::size_t>(e - b) : 0;
}

std::vector<Rat> points_in(const std::vector<Rat>& sorted, const Rat& lo, const Rat& hi) {
    auto b = std::lower_bound(sorted.begin(), sorted.end(), lo);
    auto e = std::upper_bound(sorted.begin(), sorted.end(), hi);
    return e > b ? std::vector<Rat>(b, e) : std::vector<Rat>{};
}

std::string num(std::size_t v) { return std::to_string(v); }

}  // namespace

Theorem1Result theorem1_construct(const PAMap& g, unsigned k, unsigned i, unsigned n) {
    if (k == 0 || i == 0 || n == 0) throw DomainError("k, i and n must be positive");
    for (std::size_t p = 0; p < g.pieces(); ++p)
        if (rabs(g.slope(p)) == 1) throw PreconditionError("base map has a piece of slope +-1");
    PAMap gk = iterate(g, k);
    auto pts = fix_points_of_iterate(g, gk, k);
    if (pts.empty()) throw PreconditionError("Fix(g,k) is empty");
    bool has_per = false;
    for (const auto& p : pts) {
        if (!p.is_point()) throw PreconditionError("Fix(g,k) contains a plateau");
        if (!p.transverse) throw PreconditionError("fixed point " + str(p.x()) + " of g^k is not transverse");
        if (p.least_period == k) has_per = true;
    }
    if (!has_per) throw PreconditionError("Per(g,k) is empty");
    std::vector<Rat> fix = fixed_locations(pts);

    PerturbationBudget b;
    b.n = n;
    b.i = i;
    b.k = k;
    std::set<Rat> seen;
    for (const auto& p : pts) {
        if (seen.count(p.x())) continue;
        for (const Rat& z : orbit(g, p.x(), p.least_period)) seen.insert(z);
        b.reps.push_back({p.x(), p.least_period});
    }

    std::vector<Rat> c = crit(g);
    c.push_back(0);
    c.push_back(1);
    std::sort(c.begin(), c.end());
    b.gamma = 1;
    for (std::size_t j = 0; j + 1 < c.size(); ++j) b.gamma = std::min(b.gamma, Rat(c[j + 1] - c[j]));
    b.eta = 1;
    for (const auto& r : b.reps)
        for (const Rat& z : orbit(g, r.x, r.period))
            for (const Rat& cc : c) b.eta = std::min(b.eta, rabs(z - cc));
    if ((k == 1 && b.ell() == 1) || fix.size() == 1) {
        b.beta = 1;
    } else {
        Rat gap = 1;
        for (std::size_t j = 0; j + 1 < fix.size(); ++j) gap = std::min(gap, Rat(fix[j + 1] - fix[j]));
        b.beta = gap / 2;
    }
    b.tau = max_abs_slope(gk) + 1;
    b.a = b.bound();
    if (b.a <= 0) throw ConstructionError("degenerate parameter: a = 0");

    PAMap h = g;
    Rat half = b.a / 2;
    for (std::size_t r = 0; r < b.reps.size(); ++r) {
        const Rat& x = b.reps[r].x;
        // windows must be pairwise disjoint; guaranteed since a < beta
        if (r > 0 && b.reps[r - 1].x + half >= x - half)
            throw ConstructionError("internal: windows around representatives overlap");
        h = window_mfold(h, {{x - half, x + half}, 2 * n + 1, false});
    }
    return {std::move(h), std::move(b)};
}

std::size_t box_count(std::vector<Rat> points, const Rat& eps) {
    if (points.empty()) throw DomainError("box count of an empty set");
    if (eps <= 0) throw DomainError("box size must be positive");
    std::sort(points.begin(), points.end());
    std::size_t count = 0;
    std::size_t j = 0;
    while (j < points.size()) {
        Rat end = points[j] + eps;
        ++count;
        while (j < points.size() && points[j] <= end) ++j;
    }
    return count;
}

std::size_t max_in_window(const std::vector<Rat>& sorted, const Rat& len) {
    std::size_t best = 0;
    std::size_t e = 0;
    for (std::size_t s = 0; s < sorted.size(); ++s) {
        if (e < s) e = s;
        while (e < sorted.size() && sorted[e] <= sorted[s] + len) ++e;
        best = std::max(best, e - s);
    }
    return best;
}

std::size_t min_in_window(const std::vector<Rat>& sorted, const Rat& len, const Rat& lo, const Rat& hi) {
    Rat last = hi - len;
    if (last < lo) throw DomainError("scan interval shorter than the window length");
    // The count only changes at t = p and t = p - len; test those and the
    // midpoints between consecutive ones.
    std::vector<Rat> cand{lo, last};
    for (const Rat& p : sorted)
        for (Rat t : {p, Rat(p - len)})
            if (lo <= t && t <= last) cand.push_back(t);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::size_t best = count_in(sorted, lo, lo + len);
    for (std::size_t j = 0; j < cand.size(); ++j) {
        best = std::min(best, count_in(sorted, cand[j], cand[j] + len));
        if (j + 1 < cand.size()) {
            Rat mid = (cand[j] + cand[j + 1]) / 2;
            best = std::min(best, count_in(sorted, mid, mid + len));
        }
    }
    return best;
}

bool CountReport::ok() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.ok; });
}

CountReport count_check(const PAMap& h, const PAMap& g, const PerturbationBudget& budget, unsigned k) {
    if (k != budget.k) throw PreconditionError("budget was built for a different k");
    if (!budget.within_bound()) throw PreconditionError("budget violates the bound on a");
    const unsigned m = 2 * budget.n + 1;
    const Rat& a = budget.a;
    auto hpts = fix_points(h, k);
    CountReport r;
    r.fix = fixed_locations(hpts);
    for (const auto& p : hpts)
        if (p.least_period == k) ++r.per_count;

    ClauseResult orbit_c{"orbit-count"}, ia{"window-count-own-period"}, ib{"window-count"}, ic{"local-density"};
    std::set<Rat> fixset(r.fix.begin(), r.fix.end());
    std::size_t sum_n = 0, full_period_orbits = 0;
    r.min_cover = static_cast<std::size_t>(-1);
    for (const auto& rep : budget.reps) {
        unsigned q = k / rep.period;
        Rat mq = ipow(m, q);
        std::vector<Rat> in = points_in(r.fix, rep.x - a, rep.x + a);
        if (Rat(in.size()) != mq) {
            ib.ok = false;
            ib.detail += "x=" + str(rep.x) + ": " + num(in.size()) + " != " + str(mq) + "; ";
        }
        std::size_t own = count_in(fixed_locations(fix_points(h, rep.period)), rep.x - a, rep.x + a);
        if (own != m) {
            ia.ok = false;
            ia.detail += "x=" + str(rep.x) + ": " + num(own) + " != " + num(m) + "; ";
        }
        std::set<Rat> orb;
        for (const Rat& y : in)
            for (const Rat& z : orbit(h, y, rep.period)) orb.insert(z);
        for (const Rat& z : orb)
            if (!fixset.count(z)) throw InvariantError("orbit point " + str(z) + " is not fixed by h^k");
        r.orbit_counts.push_back(orb.size());
        sum_n += orb.size();
        if (Rat(orb.size()) != mq * rep.period) {
            orbit_c.ok = false;
            orbit_c.detail += "x=" + str(rep.x) + ": " + num(orb.size()) + "; ";
        }
        Rat len = 2 * a / mq;
        std::size_t mn = min_in_window(in, len, rep.x - a / 2, rep.x + a / 2);
        std::size_t mx = max_in_window(in, len);
        r.min_cover = std::min(r.min_cover, mn);
        r.max_cover = std::max(r.max_cover, mx);
        if (mn < 1 || mx > 3) {
            ic.ok = false;
            ic.detail += "x=" + str(rep.x) + ": min " + num(mn) + " max " + num(mx) + "; ";
        }
        if (rep.period == k) ++full_period_orbits;
    }
    if (ic.detail.empty())
        ic.detail = "min " + num(r.min_cover) + ", max " + num(r.max_cover) + " per interval of length 2a/m^q";

    ClauseResult tot{"total-count"};
    Rat total(r.fix.size());
    Rat ell(budget.ell());
    Rat mk = ipow(m, k);
    Rat lower = std::max(Rat(Rat(m) * ell), mk);
    Rat upper = mk * k * ell;
    tot.ok = sum_n == r.fix.size() && lower <= total && total <= upper;
    tot.detail = "#Fix(h,k) = " + num(r.fix.size()) + ", orbit sum " + num(sum_n) + ", bounds [" + str(lower) + ", " +
                 str(upper) + "]";

    ClauseResult per{"per-count"};
    if (full_period_orbits > 0) {
        Rat need = Rat(m) * k * Rat(full_period_orbits);
        per.ok = Rat(r.per_count) >= need;
        per.detail = "#Per(h,k) = " + num(r.per_count) + " >= " + str(need);
    } else {
        per.ok = r.per_count > 0;
        per.detail = "no base orbit of period k; #Per(h,k) = " + num(r.per_count) + " from the tent sub-branches";
    }

    ClauseResult sep{"separation"};
    r.max_small = max_in_window(r.fix, a / mk);
    sep.ok = r.max_small <= 2;
    sep.detail = "max " + num(r.max_small) + " points per interval of length a/m^k";

    ClauseResult off{"unchanged-off-windows"};
    {
        // h and g agree outside the union of windows: compare at every node
        // of either map that lies outside.
        std::vector<Rat> nodes = g.xs();
        nodes.insert(nodes.end(), h.xs().begin(), h.xs().end());
        for (const Rat& x : nodes) {
            bool inside = false;
            for (const auto& rep : budget.reps)
                if (rep.x - a / 2 < x && x < rep.x + a / 2) inside = true;
            if (!inside && h(x) != g(x)) {
                off.ok = false;
                off.detail = "h != g at " + str(x);
                break;
            }
        }
    }

    r.clauses = {orbit_c, ia, ib, ic, tot, per, sep, off};
    return r;
}

namespace {

struct Mp {
    mpfr_t v;
    Mp() { mpfr_init2(v, 160); }
    ~Mp() { mpfr_clear(v); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
};

void log_of(mpfr_t out, const Rat& x, mpfr_rnd_t rnd) {
    Mp t;
    mpfr_set_q(t.v, x.get_mpq_t(), rnd);
    mpfr_log(out, t.v, rnd);
}

std::string fmt(mpfr_t v, mpfr_rnd_t rnd) {
    char* buf = nullptr;
    if (rnd == MPFR_RNDD)
        mpfr_asprintf(&buf, "%.19RDe", v);
    else
        mpfr_asprintf(&buf, "%.19RUe", v);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

Enclosure from_mpfr(mpfr_t lo, mpfr_t hi) {
    Enclosure e;
    e.lo = mpfr_get_d(lo, MPFR_RNDD);
    e.hi = mpfr_get_d(hi, MPFR_RNDU);
    e.lo_str = fmt(lo, MPFR_RNDD);
    e.hi_str = fmt(hi, MPFR_RNDU);
    if (e.width() > kEnclosureWidth) throw InvariantError("log enclosure wider than 1e-12");
    return e;
}

}  // namespace

Enclosure log_ratio(const Rat& numr, const Rat& eps) {
    if (numr < 1) throw DomainError("log ratio needs a numerator >= 1");
    if (!(eps > 0 && eps < 1)) throw DomainError("log ratio needs 0 < eps < 1");
    Rat inv = 1 / eps;
    Mp nl, nu, dl, du, lo, hi;
    log_of(nl.v, numr, MPFR_RNDD);
    log_of(nu.v, numr, MPFR_RNDU);
    log_of(dl.v, inv, MPFR_RNDD);
    log_of(du.v, inv, MPFR_RNDU);
    if (mpfr_sgn(nl.v) < 0) mpfr_set_zero(nl.v, 1);
    mpfr_div(lo.v, nl.v, du.v, MPFR_RNDD);
    mpfr_div(hi.v, nu.v, dl.v, MPFR_RNDU);
    return from_mpfr(lo.v, hi.v);
}

Enclosure enclose(const Rat& x) {
    Mp lo, hi;
    mpfr_set_q(lo.v, x.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi.v, x.get_mpq_t(), MPFR_RNDU);
    return from_mpfr(lo.v, hi.v);
}

bool ScalingProfile::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ClauseResult& c) { return c.ok; });
}

namespace {

// Decides lhs >= rhs from enclosures; falls back to the exact equivalent when
// the enclosures overlap (equality is the only way that can happen here).
bool certified_geq(const Enclosure& lhs, const Enclosure& rhs, bool exact, std::string& how) {
    if (lhs.lo >= rhs.hi) {
        how = "certified by enclosures";
        if (!exact) throw InvariantError("interval and exact comparisons disagree");
        return true;
    }
    if (lhs.hi < rhs.lo) {
        how = "refuted by enclosures";
        if (exact) throw InvariantError("interval and exact comparisons disagree");
        return false;
    }
    how = "enclosures overlap; decided exactly";
    return exact;
}

std::string enc(const Enclosure& e) { return "[" + e.lo_str + ", " + e.hi_str + "]"; }

}  // namespace

ScalingProfile scaling_profile(const PAMap& h, const PerturbationBudget& budget, unsigned k) {
    if (k != budget.k) throw PreconditionError("budget was built for a different k");
    const unsigned m = 2 * budget.n + 1;
    const Rat& a = budget.a;
    const Rat mk = ipow(m, k);
    const Rat b = 2 * a / mk;
    auto pts = fix_points(h, k);
    std::vector<Rat> fix = fixed_locations(pts);
    std::vector<Rat> per;
    for (const auto& p : pts)
        if (p.least_period == k) per.push_back(p.x());

    ScalingProfile out;
    std::size_t na = box_count(fix, a);
    std::size_t nb = box_count(fix, b);
    out.rows.push_back({"a", a, na, log_ratio(Rat(na), a)});
    out.rows.push_back({"b", b, nb, log_ratio(Rat(nb), b)});

    ClauseResult cover{"cover-at-a"};
    Rat ell(budget.ell());
    cover.ok = ell <= Rat(na) && Rat(na) <= ell * k;
    cover.detail = "N(a) = " + num(na) + " in [" + str(ell) + ", " + str(ell * k) + "]";
    out.checks.push_back(cover);

    ClauseResult lower{"lower-box"};
    {
        // log N / log(1/a) <= 1/i  <=>  N^i a <= 1
        bool exact = pow_rat(Rat(na), budget.i) * a <= 1;
        Enclosure rhs = enclose(Rat(1) / budget.i);
        std::string how;
        lower.ok = certified_geq(rhs, out.rows[0].ratio, exact, how);
        lower.detail = "ratio " + enc(out.rows[0].ratio) + " <= 1/" + std::to_string(budget.i) + " (" + how + ")";
    }
    out.checks.push_back(lower);

    bool has_fixed_rep = std::any_of(budget.reps.begin(), budget.reps.end(),
                                     [](const OrbitRep& r) { return r.period == 1; });
    ClauseResult upper{"upper-box"};
    if (!has_fixed_rep) {
        upper.skipped = true;
        upper.detail = "skipped: no representative of period 1, so no window holds (2n+1)^k points";
    } else {
        // log N(b)/log(1/b) >= log(M/3)/log(1/b)  <=>  3 N(b) >= M
        Enclosure rhs = log_ratio(mk / 3, b);
        bool exact = 3 * Rat(nb) >= mk;
        std::string how;
        upper.ok = certified_geq(out.rows[1].ratio, rhs, exact, how);
        upper.detail = "ratio " + enc(out.rows[1].ratio) + " >= " + enc(rhs) + " (" + how + ")";
    }
    out.checks.push_back(upper);

    ClauseResult perc{"upper-box-per"};
    if (budget.n < 2) {
        perc.skipped = true;
        perc.detail = "skipped: needs n >= 2";
    } else if (!has_fixed_rep) {
        perc.skipped = true;
        perc.detail = "skipped: no representative of period 1";
    } else if (per.empty()) {
        perc.ok = false;
        perc.detail = "Per(h,k) is empty";
    } else {
        std::size_t np = box_count(per, b);
        out.rows.push_back({"b-per", b, np, log_ratio(Rat(np), b)});
        bool three_quarters = 4 * Rat(per.size()) >= 3 * mk;
        Enclosure rhs = log_ratio(mk / 4, b);
        bool exact = 4 * Rat(np) >= mk;
        std::string how;
        bool ineq = certified_geq(out.rows.back().ratio, rhs, exact, how);
        perc.ok = three_quarters && ineq;
        perc.detail = "#Per(h,k) = " + num(per.size()) + " (>= 3/4 (2n+1)^k: " + (three_quarters ? "yes" : "no") +
                      "), ratio " + enc(out.rows.back().ratio) + " >= " + enc(rhs) + " (" + how + ")";
    }
    out.checks.push_back(perc);
    return out;
}

}  // namespace pam
