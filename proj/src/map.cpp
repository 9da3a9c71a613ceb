#include "pam/map.hpp"

namespace pam {

PAMap::PAMap(std::vector<Rat> xs, std::vector<Rat> ys) : p_(std::move(xs), std::move(ys)) { check(); }

PAMap::PAMap(Pwl p) : p_(std::move(p)) { check(); }

void PAMap::check() const {
    if (p_.lo() != 0 || p_.hi() != 1) throw InvariantError("map domain must be exactly [0,1]");
    for (const Rat& y : p_.ys())
        if (y < 0 || y > 1) throw InvariantError("value " + str(y) + " outside [0,1]");
}

PAMap PAMap::identity() { return PAMap({Rat(0), Rat(1)}, {Rat(0), Rat(1)}); }
PAMap PAMap::tent() { return PAMap({Rat(0), make_rat(1, 2), Rat(1)}, {Rat(0), Rat(1), Rat(0)}); }
PAMap PAMap::valley() { return PAMap({Rat(0), make_rat(1, 2), Rat(1)}, {Rat(1), Rat(0), Rat(1)}); }

PAMap compose(const PAMap& f, const PAMap& g) { return PAMap(compose(f.pwl(), g.pwl())); }

PAMap iterate(const PAMap& f, unsigned k) {
    if (k == 0) throw DomainError("iterate: k must be positive");
    PAMap r = f;
    for (unsigned i = 1; i < k; ++i) r = compose(f, r);
    return r;
}

Rat uniform_distance(const PAMap& f, const PAMap& g) { return sup_distance(f.pwl(), g.pwl()); }

LebesgueCheck verify_lebesgue(const PAMap& f) {
    StepDensity d = branch_density(f.pwl());
    LebesgueCheck r;
    if (d.cuts.front() > 0) {
        r.ok = false;
        r.cell = {Rat(0), d.cuts.front()};
        r.sum = 0;
        return r;
    }
    if (d.cuts.back() < 1) {
        r.ok = false;
        r.cell = {d.cuts.back(), Rat(1)};
        r.sum = 0;
        return r;
    }
    for (std::size_t c = 0; c < d.sums.size(); ++c) {
        if (d.sums[c] != 1) {
            r.ok = false;
            r.cell = {d.cuts[c], d.cuts[c + 1]};
            r.sum = d.sums[c];
            return r;
        }
    }
    return r;
}

std::vector<Rat> crit(const PAMap& f) {
    std::vector<Rat> out;
    for (std::size_t i = 1; i + 1 < f.xs().size(); ++i)
        if (sgn(f.slope(i - 1)) * sgn(f.slope(i)) < 0) out.push_back(f.xs()[i]);
    return out;
}

std::vector<Rat> xi_set(const PAMap& f) {
    return std::vector<Rat>(f.xs().begin() + 1, f.xs().end() - 1);
}

std::vector<Rat> orbit(const PAMap& f, const Rat& x, unsigned n) {
    std::vector<Rat> out;
    out.reserve(n);
    Rat y = x;
    for (unsigned i = 0; i < n; ++i) {
        out.push_back(y);
        y = f(y);
    }
    return out;
}

Rat max_abs_slope(const PAMap& f) {
    Rat m(0);
    for (std::size_t i = 0; i < f.pieces(); ++i) {
        Rat s = rabs(f.slope(i));
        if (s > m) m = s;
    }
    return m;
}

}  // namespace pam
