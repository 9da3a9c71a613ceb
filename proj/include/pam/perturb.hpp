#pragma once

#include <string>
#include <vector>

#include "pam/map.hpp"

namespace pam {

struct CriticalConnection {
    Rat source;
    Rat target;
    unsigned length = 1;
};

// Orbits from a critical point to a critical point in at most k steps,
// stopping at the first hit; sorted by length, then source.
std::vector<CriticalConnection> find_critical_connections(const PAMap& f, unsigned k);

struct RepairLog {
    std::vector<std::string> lines;
    void add(std::string s) { lines.push_back(std::move(s)); }
};

// Takes 0 and 1 out of Fix(f,k) with a 2-fold window on [0,a] (resp.
// [1-a,1]).  a starts at the largest power of 1/2 giving rho < max_rho and is
// halved until admissible; fails below min_a.
PAMap remove_boundary_fix(const PAMap& f, unsigned k, const Rat& max_rho = 1, RepairLog* log = nullptr,
                          const Rat& min_a = Rat(1, 1u << 30) / (1u << 30));

// Moves the turning point c of f so that it leaves every forbidden point of
// the orbit in place.  t is the depth of the window below (above) the peak
// (valley); the displacement is half the distance to the nearest forbidden
// point.
PAMap shift_turning_point(const PAMap& f, const Rat& c, const Rat& t, const std::vector<Rat>& forbidden);

struct TransverseResult {
    PAMap g;
    Rat distance;  // exact rho(f, g)
    RepairLog log;
};

TransverseResult make_transverse(const PAMap& f, unsigned k, const Rat& budget, unsigned max_rounds = 12);

// Everything make_transverse promises, checked from scratch.
struct TransverseAudit {
    bool ok = true;
    std::string failure;
};
TransverseAudit audit_transverse(const PAMap& g, unsigned k);

}  // namespace pam
