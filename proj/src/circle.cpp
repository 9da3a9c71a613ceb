#include "pam/circle.hpp"

#include <algorithm>
#include <map>

namespace pam {

namespace {

Rat lift_slope_left(const Pwl& p, const Rat& x) {
    // slope just left of x, wrapping 0 to 1
    if (x == 0) return p.slope(p.pieces() - 1);
    auto it = std::lower_bound(p.xs().begin(), p.xs().end(), x);
    return p.slope(static_cast<std::size_t>(it - p.xs().begin()) - 1);
}

Rat lift_slope_right(const Pwl& p, const Rat& x) {
    if (x == 1) return p.slope(0);
    auto it = std::upper_bound(p.xs().begin(), p.xs().end(), x);
    return p.slope(static_cast<std::size_t>(it - p.xs().begin()) - 1);
}

bool is_integer(const Rat& r) { return r.get_den() == 1; }

unsigned circle_least_period_point(const LiftPAMap& f, const Rat& x, unsigned k) {
    Rat y = x;
    for (unsigned j = 1; j <= k; ++j) {
        y = f(y);
        if (is_integer(Rat(y - x))) return j;
    }
    throw InvariantError("point " + str(x) + " is not fixed by the circle iterate");
}

unsigned circle_least_period_plateau(const LiftPAMap& f, const IntervalQ& b, unsigned k) {
    unsigned lo = circle_least_period_point(f, b.lo, k);
    for (unsigned j : divisors(k)) {
        if (j == k) return k;
        if (j % lo != 0) continue;
        Pwl r = lift_iterate(f, j).base().restrict(b.lo, b.hi);
        if (r.pieces() == 1 && r.slope(0) == 1 && is_integer(Rat(r(b.lo) - b.lo))) return j;
    }
    return k;
}

}  // namespace

LiftPAMap::LiftPAMap(Pwl base, long degree) : base_(std::move(base)), d_(degree) {
    if (base_.lo() != 0 || base_.hi() != 1) throw DomainError("lift must be given on [0,1]");
    Rat rise = base_(1) - base_(0);
    if (rise != Rat(degree))
        throw ContinuityError("lift: F(1) - F(0) = " + str(rise) + " differs from degree " + std::to_string(degree));
}

LiftPAMap::LiftPAMap(std::vector<Rat> xs, std::vector<Rat> ys, long degree)
    : LiftPAMap(Pwl(std::move(xs), std::move(ys)), degree) {}

LiftPAMap LiftPAMap::rotation(const Rat& a) { return LiftPAMap({Rat(0), Rat(1)}, {a, Rat(a + 1)}, 1); }

LiftPAMap LiftPAMap::linear(long d) {
    if (d == 0) throw DomainError("degree 0 has no linear lift with nonzero slope");
    return LiftPAMap({Rat(0), Rat(1)}, {Rat(0), Rat(d)}, d);
}

Rat LiftPAMap::operator()(const Rat& x) const {
    Int n = floor_int(x);
    Rat t = x - n;
    return base_(t) + Rat(d_) * n;
}

Pwl LiftPAMap::extended(long lo, long hi) const {
    if (hi <= lo) throw DomainError("empty extension range");
    std::vector<Pwl> parts;
    for (long j = lo; j < hi; ++j) {
        std::vector<Rat> xs = base_.xs(), ys = base_.ys();
        for (auto& x : xs) x += j;
        for (auto& y : ys) y += Rat(d_) * j;
        parts.emplace_back(std::move(xs), std::move(ys));
    }
    return join(parts);
}

LiftPAMap lift_compose(const LiftPAMap& f, const LiftPAMap& g) {
    auto [m, M] = g.base().range();
    long lo = floor_int(m).get_si();
    long hi = -floor_int(Rat(-M)).get_si();
    if (hi <= lo) hi = lo + 1;
    return LiftPAMap(compose(f.extended(lo, hi), g.base()), f.degree() * g.degree());
}

LiftPAMap lift_iterate(const LiftPAMap& f, unsigned k) {
    if (k == 0) throw DomainError("iterate: k must be positive");
    LiftPAMap r = f;
    for (unsigned i = 1; i < k; ++i) r = lift_compose(f, r);
    return r;
}

LiftPAMap rotate_conjugate(const LiftPAMap& f, const Rat& a) {
    Rat lo = -a, hi = 1 - a;
    long e0 = floor_int(lo).get_si();
    long e1 = -floor_int(Rat(-hi)).get_si();
    if (e1 <= e0) e1 = e0 + 1;
    Pwl r = f.extended(e0, e1).restrict(lo, hi);
    std::vector<Rat> xs = r.xs(), ys = r.ys();
    for (auto& x : xs) x += a;
    for (auto& y : ys) y += a;
    xs.front() = 0;
    xs.back() = 1;
    return LiftPAMap(Pwl(std::move(xs), std::move(ys)), f.degree());
}

Json lift_to_json(const LiftPAMap& f) {
    return Json{{"breakpoints", rats_to_json(f.base().xs())},
                {"values", rats_to_json(f.base().ys())},
                {"degree", f.degree()}};
}

LiftPAMap lift_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values") || !j.contains("degree"))
        throw InputError("lift JSON needs \"breakpoints\", \"values\" and \"degree\"");
    auto xs = rats_from_json(j.at("breakpoints"));
    auto ys = rats_from_json(j.at("values"));
    if (!j.at("degree").is_number_integer()) throw InputError("degree must be an integer");
    if (xs.size() != ys.size() || xs.size() < 2) throw InvariantError("breakpoints and values differ in length");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i - 1] < xs[i])) throw InvariantError("breakpoints not strictly increasing at index " + std::to_string(i));
    if (!Pwl::is_canonical(xs, ys)) throw InvariantError("non-canonical lift");
    return LiftPAMap(std::move(xs), std::move(ys), j.at("degree").get<long>());
}

LebesgueCheck circle_verify_lebesgue(const LiftPAMap& f) {
    const Pwl& p = f.base();
    std::vector<Rat> cuts{Rat(0)};
    for (const Rat& y : p.ys()) cuts.push_back(frac(y));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(1);
    const std::size_t cells = cuts.size() - 1;
    std::vector<Rat> diff(cells + 1, Rat(0));
    auto index = [&](const Rat& c) {
        return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), c) - cuts.begin());
    };
    for (std::size_t i = 0; i < p.pieces(); ++i) {
        Rat s = p.slope(i);
        if (s == 0)
            throw FlatPieceError("flat piece on [" + str(p.xs()[i]) + ", " + str(p.xs()[i + 1]) + "]");
        Rat w = 1 / rabs(s);
        Rat lo = std::min(p.ys()[i], p.ys()[i + 1]), hi = std::max(p.ys()[i], p.ys()[i + 1]);
        for (Int n = floor_int(lo); n < hi; ++n) {
            Rat a = Rat(std::max(lo, Rat(n))) - n, b = Rat(std::min(hi, Rat(n + 1))) - n;
            if (a >= b) continue;
            diff[index(a)] += w;
            diff[index(b)] -= w;
        }
    }
    LebesgueCheck r;
    Rat run = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        run += diff[c];
        if (run != 1) {
            r.ok = false;
            r.cell = {cuts[c], cuts[c + 1]};
            r.sum = run;
            return r;
        }
    }
    r.sum = 1;
    return r;
}

std::vector<CirclePoint> circle_fix(const LiftPAMap& f, unsigned k) {
    if (k == 0) throw DomainError("k must be positive");
    LiftPAMap fk = lift_iterate(f, k);
    const Pwl& p = fk.base();
    const auto& xs = p.xs();
    const auto& ys = p.ys();

    std::vector<std::pair<IntervalQ, Int>> plateaus;
    std::map<Rat, Int> pts;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rat d0 = ys[i] - xs[i], d1 = ys[i + 1] - xs[i + 1];
        if (d0 == d1) {
            if (!is_integer(d0)) continue;
            Int m = d0.get_num();
            if (!plateaus.empty() && plateaus.back().first.hi == xs[i] && plateaus.back().second == m)
                plateaus.back().first.hi = xs[i + 1];
            else
                plateaus.push_back({{xs[i], xs[i + 1]}, m});
            continue;
        }
        Rat lo = std::min(d0, d1), hi = std::max(d0, d1);
        Int m0 = -floor_int(Rat(-lo));  // ceil
        for (Int m = m0; m <= hi; ++m) {
            Rat x = xs[i] + (Rat(m) - d0) * (xs[i + 1] - xs[i]) / (d1 - d0);
            if (x == 1) continue;  // same circle point as 0
            pts.emplace(x, m);
        }
    }

    std::vector<CirclePoint> out;
    for (const auto& [x, m] : pts) {
        bool inside = std::any_of(plateaus.begin(), plateaus.end(),
                                  [&](const auto& b) { return b.first.contains(x) || (x == 0 && b.first.hi == 1); });
        if (inside) continue;
        CirclePoint c;
        c.location = {x, x};
        c.horizon = k;
        c.translate = m;
        out.push_back(c);
    }
    for (const auto& [b, m] : plateaus) {
        CirclePoint c;
        c.location = b;
        c.horizon = k;
        c.translate = m;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(),
              [](const CirclePoint& a, const CirclePoint& b) { return a.location.lo < b.location.lo; });

    // flanks of plateaus cut at 0 belong to the piece on the other side
    const IntervalQ* at_zero = nullptr;
    const IntervalQ* at_one = nullptr;
    for (const auto& [b, m] : plateaus) {
        if (b.lo == 0) at_zero = &b;
        if (b.hi == 1) at_one = &b;
    }
    for (auto& c : out) {
        Rat a = c.location.lo, b = c.location.hi;
        if (a == 0 && at_one && !c.is_point()) a = at_one->lo;
        if (b == 1 && at_zero) b = at_zero->hi;
        if (a == 0 && b == 1) {
            c.transverse = false;  // the whole circle
        } else {
            int sl = sgn(Rat(1 - lift_slope_left(p, a)));
            int sr = sgn(Rat(lift_slope_right(p, b) - 1));
            c.transverse = sl * sr == -1;
        }
        c.least_period = c.is_point() ? circle_least_period_point(f, c.x(), k)
                                      : circle_least_period_plateau(f, c.location, k);
    }
    return out;
}

Invertibility invertibility_test(const LiftPAMap& f) {
    if (f.degree() != 1)
        throw DomainError("invertibility test needs degree 1, got " + std::to_string(f.degree()));
    const Pwl& p = f.base();
    const std::size_t n = p.pieces();
    Invertibility r;
    for (std::size_t i = 0; i < n; ++i)
        if (p.slope(i) == 0) {
            r.invertible = false;
            r.x = p.xs()[i];
            r.y = (p.xs()[i] + p.xs()[i + 1]) / 2;
            return r;
        }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        Rat sl = p.slope(i), sr = p.slope(j);
        if (!(sl > 0 && sr < 0)) continue;
        Rat t = p.xs()[i + 1];
        Rat wl = p.xs()[i + 1] - p.xs()[i], wr = p.xs()[j + 1] - p.xs()[j];
        Rat h = Rat(std::min(Rat(sl * wl), Rat(-sr * wr))) / 2;
        r.invertible = false;
        r.x = frac(Rat(t - h / sl));
        r.y = frac(Rat(t - h / sr));
        return r;
    }
    return r;
}

PeriodicSearch has_periodic_point(const LiftPAMap& f, unsigned k_max) {
    if (f.degree() != 1)
        throw DomainError("periodic search needs degree 1, got " + std::to_string(f.degree()));
    PeriodicSearch s;
    for (unsigned k = 1; k <= k_max; ++k) {
        auto pts = circle_fix(f, k);
        if (pts.empty()) continue;
        s.found = true;
        s.k = k;
        auto it = std::find_if(pts.begin(), pts.end(), [](const CirclePoint& c) { return c.transverse; });
        s.witness = it != pts.end() ? *it : pts.front();
        return s;
    }
    return s;
}

}  // namespace pam
