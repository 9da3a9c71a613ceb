#pragma once

#include <string>
#include <vector>

#include "pam/periodic.hpp"
#include "pam/report.hpp"

namespace pam {

struct OrbitRep {
    Rat x;
    unsigned period = 1;  // k(x)
};

struct PerturbationBudget {
    Rat gamma, eta, beta, tau, a;
    unsigned n = 1, i = 1, k = 1;
    std::vector<OrbitRep> reps;  // one per Fix(g,k) orbit, leftmost point

    std::size_t ell() const { return reps.size(); }
    // a <= min(1/(ik ell), eta, gamma, beta, (k ell)^-i) / (2 tau)
    Rat bound() const;
    bool within_bound() const { return a <= bound(); }
};

struct Theorem1Result {
    PAMap h;
    PerturbationBudget budget;
};

// Puts a (2n+1)-fold window of diameter a around each orbit representative.
Theorem1Result theorem1_construct(const PAMap& g, unsigned k, unsigned i, unsigned n);

struct CountReport {
    std::vector<ClauseResult> clauses;
    std::vector<Rat> fix;  // Fix(h,k)
    std::size_t per_count = 0;
    std::vector<std::size_t> orbit_counts;  // N_l per representative
    std::size_t min_cover = 0, max_cover = 0;  // sliding scan over the windows
    std::size_t max_small = 0;                 // max points in an a/(2n+1)^k interval

    bool ok() const;
};

CountReport count_check(const PAMap& h, const PAMap& g, const PerturbationBudget& budget, unsigned k);

// Minimal number of closed intervals of length eps covering the points.
std::size_t box_count(std::vector<Rat> points, const Rat& eps);

// Largest / smallest number of points of a sorted set in a closed interval
// [t, t+len] with t ranging over [lo, hi-len].
std::size_t max_in_window(const std::vector<Rat>& sorted, const Rat& len);
std::size_t min_in_window(const std::vector<Rat>& sorted, const Rat& len, const Rat& lo, const Rat& hi);

// Certified enclosure of a real number.
struct Enclosure {
    double lo = 0, hi = 0;
    std::string lo_str, hi_str;  // 20 significant digits, rounded outward
    double width() const { return hi - lo; }
};
inline constexpr double kEnclosureWidth = 1e-12;
// log(num)/log(1/eps) for rationals num >= 1, 0 < eps < 1.
Enclosure log_ratio(const Rat& num, const Rat& eps);
Enclosure enclose(const Rat& x);

struct ProfileRow {
    std::string label;
    Rat eps;
    std::size_t count = 0;
    Enclosure ratio;
};

struct ScalingProfile {
    std::vector<ProfileRow> rows;
    std::vector<ClauseResult> checks;
    bool ok() const;
};

ScalingProfile scaling_profile(const PAMap& h, const PerturbationBudget& budget, unsigned k);

}  // namespace pam
