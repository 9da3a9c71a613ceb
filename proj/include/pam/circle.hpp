#pragma once

#include <optional>
#include <vector>

#include "pam/io.hpp"
#include "pam/map.hpp"
#include "pam/periodic.hpp"

namespace pam {

// Lift of a degree-d circle map: F on [0,1] with F(1) = F(0) + d, extended
// to the line by F(x+1) = F(x) + d.  Values are unconstrained.
class LiftPAMap {
public:
    LiftPAMap(Pwl base, long degree);
    LiftPAMap(std::vector<Rat> xs, std::vector<Rat> ys, long degree);

    static LiftPAMap rotation(const Rat& a);
    // x -> d x
    static LiftPAMap linear(long d);

    const Pwl& base() const { return base_; }
    long degree() const { return d_; }
    Rat operator()(const Rat& x) const;
    // F on [lo, hi] for integers lo < hi, as one function
    Pwl extended(long lo, long hi) const;

    bool operator==(const LiftPAMap& o) const { return d_ == o.d_ && base_ == o.base_; }

private:
    Pwl base_;
    long d_;
};

// F o G as a lift; the degree multiplies
LiftPAMap lift_compose(const LiftPAMap& f, const LiftPAMap& g);
LiftPAMap lift_iterate(const LiftPAMap& f, unsigned k);
// R_a o F o R_{-a}
LiftPAMap rotate_conjugate(const LiftPAMap& f, const Rat& a);

Json lift_to_json(const LiftPAMap& f);
LiftPAMap lift_from_json(const Json& j);

// Cell criterion mod 1: every cell of [0,1) cut by the node values mod 1 has
// reciprocal-slope sum 1 over all branches covering it.
LebesgueCheck circle_verify_lebesgue(const LiftPAMap& f);

struct CirclePoint : PeriodicPoint {
    Int translate;  // F^k(x) = x + translate
};

// x in [0,1) with F^k(x) - x an integer.  Plateaus are cut at 0: an arc
// through 0 comes back as [a,1] and [0,b], and [a,1] covers the point 0.
std::vector<CirclePoint> circle_fix(const LiftPAMap& f, unsigned k);

struct Invertibility {
    bool invertible = true;
    Rat x, y;  // witness: x != y with the same image mod 1
};
Invertibility invertibility_test(const LiftPAMap& f);

struct PeriodicSearch {
    bool found = false;
    unsigned k = 0;  // smallest k with a solution
    std::optional<CirclePoint> witness;
};
PeriodicSearch has_periodic_point(const LiftPAMap& f, unsigned k_max);

}  // namespace pam
