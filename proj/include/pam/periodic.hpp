#pragma once

#include <vector>

#include "pam/map.hpp"

namespace pam {

struct PeriodicPoint {
    IntervalQ location;  // degenerate unless f^k is the identity on an interval
    unsigned horizon = 1;
    unsigned least_period = 1;
    bool transverse = false;

    bool is_point() const { return location.lo == location.hi; }
    const Rat& x() const { return location.lo; }
};

// Solutions of f^k(x) = x, sorted; diagonal plateaus come back as intervals.
std::vector<PeriodicPoint> fix_points(const PAMap& f, unsigned k);
// Same, for a precomputed fk = f^k.
std::vector<PeriodicPoint> fix_points_of_iterate(const PAMap& f, const PAMap& fk, unsigned k);
// Points of least period exactly k.
std::vector<PeriodicPoint> per_points(const PAMap& f, unsigned k);

std::vector<Rat> fixed_locations(const std::vector<PeriodicPoint>& pts);

struct Transversality {
    bool transverse = false;
    IntervalQ plateau;     // B = [a2, c1]
    int sign_left = 0;     // sign of f^k(x) - x on A
    int sign_right = 0;    // ... and on C
};
Transversality classify_transverse(const PAMap& f, const PeriodicPoint& p);
Transversality classify_transverse_in(const PAMap& fk, const IntervalQ& location);

std::vector<unsigned> divisors(unsigned k);

}  // namespace pam
