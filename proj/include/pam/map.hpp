#pragma once

#include <vector>

#include "pam/pwl.hpp"

namespace pam {

// Piecewise-affine self-map of [0,1].
class PAMap {
public:
    PAMap(std::vector<Rat> xs, std::vector<Rat> ys);
    explicit PAMap(Pwl p);

    static PAMap identity();
    static PAMap tent();    // 0 -> 0, 1/2 -> 1, 1 -> 0
    static PAMap valley();  // 0 -> 1, 1/2 -> 0, 1 -> 1

    const Pwl& pwl() const { return p_; }
    const std::vector<Rat>& xs() const { return p_.xs(); }
    const std::vector<Rat>& ys() const { return p_.ys(); }
    std::size_t pieces() const { return p_.pieces(); }
    Rat slope(std::size_t i) const { return p_.slope(i); }
    Rat operator()(const Rat& x) const { return p_(x); }
    IntervalQ image(const Rat& a, const Rat& b) const { return p_.image(a, b); }

    bool operator==(const PAMap& o) const { return p_ == o.p_; }
    bool operator!=(const PAMap& o) const { return p_ != o.p_; }

private:
    Pwl p_;
    void check() const;
};

PAMap compose(const PAMap& f, const PAMap& g);
PAMap iterate(const PAMap& f, unsigned k);
Rat uniform_distance(const PAMap& f, const PAMap& g);

struct LebesgueCheck {
    bool ok = true;
    IntervalQ cell;  // witness image cell when !ok
    Rat sum;         // its reciprocal-slope sum
};
LebesgueCheck verify_lebesgue(const PAMap& f);

std::vector<Rat> crit(const PAMap& f);
std::vector<Rat> xi_set(const PAMap& f);

// Orbit x, f(x), ..., f^{n-1}(x).
std::vector<Rat> orbit(const PAMap& f, const Rat& x, unsigned n);

Rat max_abs_slope(const PAMap& f);

}  // namespace pam
