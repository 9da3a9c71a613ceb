#include "pam/periodic.hpp"

#include <algorithm>

namespace pam {

std::vector<unsigned> divisors(unsigned k) {
    std::vector<unsigned> out;
    for (unsigned d = 1; d <= k; ++d)
        if (k % d == 0) out.push_back(d);
    return out;
}

namespace {

bool is_identity_on(const PAMap& fd, const IntervalQ& b) {
    if (fd(b.lo) != b.lo || fd(b.hi) != b.hi) return false;
    Pwl r = fd.pwl().restrict(b.lo, b.hi);
    return r.pieces() == 1;
}

unsigned least_period_point(const PAMap& f, const Rat& x, unsigned k) {
    Rat y = x;
    for (unsigned d = 1; d <= k; ++d) {
        y = f(y);
        if (y == x) return d;
    }
    throw InvariantError("point " + str(x) + " is not fixed by f^" + std::to_string(k));
}

unsigned least_period_plateau(const PAMap& f, const IntervalQ& b, unsigned k) {
    unsigned lo_period = least_period_point(f, b.lo, k);
    for (unsigned d : divisors(k)) {
        if (d == k) return k;
        if (d % lo_period != 0) continue;
        if (is_identity_on(iterate(f, d), b)) return d;
    }
    return k;
}

}  // namespace

std::vector<PeriodicPoint> fix_points_of_iterate(const PAMap& f, const PAMap& fk, unsigned k) {
    const auto& xs = fk.xs();
    const auto& ys = fk.ys();
    std::vector<IntervalQ> plateaus;
    std::vector<Rat> pts;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rat d0 = ys[i] - xs[i];
        Rat d1 = ys[i + 1] - xs[i + 1];
        if (d0 == 0 && d1 == 0) {
            if (!plateaus.empty() && plateaus.back().hi == xs[i])
                plateaus.back().hi = xs[i + 1];
            else
                plateaus.push_back({xs[i], xs[i + 1]});
        } else if (d0 == 0) {
            pts.push_back(xs[i]);
        } else if (d1 == 0) {
            pts.push_back(xs[i + 1]);
        } else if (sgn(d0) != sgn(d1)) {
            pts.push_back(xs[i] + d0 * (xs[i + 1] - xs[i]) / (d0 - d1));
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<PeriodicPoint> out;
    std::size_t j = 0;
    for (const Rat& x : pts) {
        while (j < plateaus.size() && plateaus[j].hi < x) ++j;
        if (j < plateaus.size() && plateaus[j].contains(x)) continue;
        PeriodicPoint p;
        p.location = {x, x};
        p.horizon = k;
        out.push_back(p);
    }
    for (const auto& b : plateaus) {
        PeriodicPoint p;
        p.location = b;
        p.horizon = k;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(),
              [](const PeriodicPoint& a, const PeriodicPoint& b) { return a.location.lo < b.location.lo; });

    for (auto& p : out) {
        p.least_period = p.is_point() ? least_period_point(f, p.x(), k) : least_period_plateau(f, p.location, k);
        if (p.location.lo == 0 || p.location.hi == 1)
            p.transverse = false;
        else
            p.transverse = classify_transverse_in(fk, p.location).transverse;
    }
    return out;
}

std::vector<PeriodicPoint> fix_points(const PAMap& f, unsigned k) {
    if (k == 0) throw DomainError("k must be positive");
    return fix_points_of_iterate(f, iterate(f, k), k);
}

std::vector<PeriodicPoint> per_points(const PAMap& f, unsigned k) {
    std::vector<PeriodicPoint> all = fix_points(f, k);
    std::vector<PeriodicPoint> out;
    for (auto& p : all)
        if (p.least_period == k) out.push_back(p);
    return out;
}

std::vector<Rat> fixed_locations(const std::vector<PeriodicPoint>& pts) {
    std::vector<Rat> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (!p.is_point()) throw PreconditionError("plateau [" + str(p.location.lo) + ", " + str(p.location.hi) +
                                                   "] has no finite point representation");
        out.push_back(p.x());
    }
    return out;
}

Transversality classify_transverse_in(const PAMap& fk, const IntervalQ& location) {
    if (fk(location.lo) != location.lo || fk(location.hi) != location.hi)
        throw PreconditionError("point is not fixed by the iterate");
    if (location.lo == 0 || location.hi == 1)
        throw BoundaryError("no flanking interval at the boundary point");
    const auto& xs = fk.xs();
    // In canonical form a diagonal plateau is a single piece, so the maximal
    // plateau is either the location itself or the piece containing it.
    IntervalQ b = location;
    if (b.lo == b.hi) {
        std::size_t i = fk.pwl().piece_of(b.lo);
        for (std::size_t c : {i, i == 0 ? i : i - 1, i + 1 < fk.pieces() ? i + 1 : i}) {
            if (fk.slope(c) == 1 && xs[c] <= b.lo && b.lo <= xs[c + 1] && fk(xs[c]) == xs[c]) {
                b = {xs[c], xs[c + 1]};
                break;
            }
        }
    }
    if (b.lo == 0 || b.hi == 1) throw BoundaryError("plateau reaches the boundary");
    // A: piece ending at or containing b.lo from the left; C similarly.
    auto left_it = std::lower_bound(xs.begin(), xs.end(), b.lo);
    std::size_t left = static_cast<std::size_t>(left_it - xs.begin()) - 1;
    auto right_it = std::upper_bound(xs.begin(), xs.end(), b.hi);
    std::size_t right = static_cast<std::size_t>(right_it - xs.begin()) - 1;
    Transversality t;
    t.plateau = b;
    t.sign_left = sgn(Rat(1 - fk.slope(left)));
    t.sign_right = sgn(Rat(fk.slope(right) - 1));
    t.transverse = t.sign_left * t.sign_right == -1;
    return t;
}

Transversality classify_transverse(const PAMap& f, const PeriodicPoint& p) {
    return classify_transverse_in(iterate(f, p.horizon), p.location);
}

}  // namespace pam
