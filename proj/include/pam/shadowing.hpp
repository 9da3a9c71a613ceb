#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pam/io.hpp"
#include "pam/map.hpp"
#include "pam/report.hpp"

namespace pam {

enum class OrbitKind { plain, periodic, asymptotic };

struct ScheduleLevel {
    std::size_t start = 0;  // l(n)
    Rat delta;              // delta_n
};

struct PseudoOrbit {
    std::vector<Rat> points;
    Rat delta;
    OrbitKind kind = OrbitKind::plain;
    unsigned period = 0;                 // periodic: x_{i+N} = x_i, points holds one period
    std::vector<ScheduleLevel> schedule;  // asymptotic: l(1) = 0, increasing starts

    Rat at(std::size_t i) const { return kind == OrbitKind::periodic ? points[i % period] : points[i]; }
    // number of steps covered (one period for periodic orbits)
    std::size_t length() const { return points.size(); }
};

// Throws PreconditionError naming the first index with |g(x_i) - x_{i+1}| >= delta
// (or the per-level delta for asymptotic orbits).
void validate_pseudo_orbit(const PAMap& g, const PseudoOrbit& po);

struct Partition {
    std::vector<Rat> points;  // 0 = a_0 < ... < a_{n+1} = 1
    Rat gamma;
    Rat offset;               // first interior point
    std::size_t cell_of(const Rat& x) const;  // lowest p with x in [a_p, a_{p+1}]
    std::size_t cells() const { return points.size() - 1; }
};

// Uniform mesh below gamma, shifted by the offset that leaves the most room
// for delta.  Requires every slope of f to have magnitude >= 4.
Partition build_partition(const PAMap& f, const Rat& eps);
std::vector<ClauseResult> check_partition(const PAMap& f, const Partition& p, const Rat& eps);

// Largest power of 1/2 for which the 3-delta neighbourhood condition and the
// 2-delta cover condition hold, capped below eps/2 and half the shortest cell.
Rat choose_delta(const PAMap& f, const Partition& p, const Rat& eps);

// Odd-fold windows on each monotonicity piece until every slope is >= 4.
PAMap steepen(const PAMap& f);

struct ShadowingKit {
    PAMap F;
    Partition partition;
    Rat eps, delta;
    std::uint64_t m = 1;
};

ShadowingKit shadowing_perturbation(const PAMap& f, const Rat& eps);
// Partition clauses, the delta conditions, F's cover identity on every cell,
// 1/m < delta < eps/2, rho(f,F) < eps/2, measure preservation and slopes.
std::vector<ClauseResult> verify_kit(const ShadowingKit& kit, const PAMap& f);

struct Trace {
    std::vector<IntervalQ> chain;
    std::vector<char> choice;  // 'C' for J_0 (a whole cell), 'L' or 'R'
    Rat z;
    Rat max_err;
    std::vector<Rat> errors;   // |g^i(z) - x_i|
};

Trace trace(const ShadowingKit& kit, const PAMap& g, const PseudoOrbit& po);

struct PeriodicTrace {
    Trace base;
    std::size_t k = 0, s = 0;  // J_{kN} = J_{sN}
    std::size_t period = 0;    // P = (s - k) N
    Rat z;                     // g^P(z) = z
    Rat max_err;
};

PeriodicTrace trace_periodic(const ShadowingKit& kit, const PAMap& g, const PseudoOrbit& po);

// J subinterval with g(S) = K exactly; requires K inside g(J).
IntervalQ onto_subinterval(const PAMap& g, const IntervalQ& j, const IntervalQ& k);

// Exact solutions of h(x) = x for a function on a subinterval.
std::vector<Rat> pwl_fixed_points(const Pwl& h);

struct TowerLevel {
    ShadowingKit kit;  // kit.F is g_n, built from g_{n-1}
    Rat eps;           // eps_n
    Rat rho_prev;      // certified upper bound for rho(g_n, g_{n-1})
    bool rho_exact = false;
};

struct SLimitTower {
    PAMap base = PAMap::identity();
    Rat eps;
    std::vector<TowerLevel> levels;
    std::vector<ClauseResult> checks;
};

// A-priori piece count of the next level, used to fail before allocating.
struct TowerEstimate {
    Rat gamma_bound;   // largest admissible mesh
    Rat cells;         // lower bound on the number of cells
    Rat pieces;        // lower bound on the pieces of g_n
};
TowerEstimate estimate_next_level(const PAMap& prev, const Rat& prev_delta, const Rat& eps_n);

SLimitTower s_limit_tower(const PAMap& f, const Rat& eps, unsigned depth);

struct AsymptoticTrace {
    std::vector<IntervalQ> chain;
    std::vector<unsigned> level;  // level used for each K_i
    Rat z;
    std::vector<Rat> segment_max;  // max error per level segment
    Rat max_err;
};

AsymptoticTrace trace_asymptotic(const SLimitTower& tower, const PseudoOrbit& po);

// Seeded generators (std::mt19937_64, raw output only).
PseudoOrbit random_pseudo_orbit(const PAMap& g, const Rat& delta, std::size_t length, std::uint64_t seed);
// Level n jumps stay below schedule[n].delta from index schedule[n].start on.
PseudoOrbit random_asymptotic_pseudo_orbit(const PAMap& g, const std::vector<ScheduleLevel>& schedule,
                                           std::size_t length, std::uint64_t seed);
PseudoOrbit random_periodic_pseudo_orbit(const ShadowingKit& kit, const PAMap& g, unsigned period,
                                         std::uint64_t seed);

// {"delta": "1/64", "points": [...], "kind": "periodic", "N": 5}; asymptotic
// orbits add "schedule": [{"start": 0, "delta": "1/64"}, ...].
Json orbit_to_json(const PseudoOrbit& po);
PseudoOrbit orbit_from_json(const Json& j);

Json kit_to_json(const ShadowingKit& kit);
ShadowingKit kit_from_json(const Json& j);

}  // namespace pam
