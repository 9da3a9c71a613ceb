#pragma once

#include "pam/map.hpp"

namespace pam {

struct WindowSpec {
    IntervalQ window;
    unsigned folds = 1;
    // Allows even fold counts on a window touching 0 or 1: the fold is then
    // anchored at the interior endpoint and the map changes at the boundary.
    bool waive_endpoints = false;
};

// m-fold zigzag of [a,b] onto itself starting at a (phi(a) = a).  With
// reversed it starts at b instead.
Pwl fold_map(const Rat& a, const Rat& b, unsigned m, bool reversed = false);

// g = f off [a,b], g = f o fold on [a,b].
PAMap window_mfold(const PAMap& f, const WindowSpec& w);

// Regular m-fold window perturbation on every cell of a partition of [0,1]
// at once (m odd).
PAMap cellwise_mfold(const PAMap& f, const std::vector<Rat>& partition, unsigned m);

// Glue h (defined on the window) into f.  h must be lambda-equivalent to f on
// the window and match f at both window endpoints (one endpoint may differ
// when waive_endpoints is set and the window touches 0 or 1).
PAMap window_replace(const PAMap& f, const IntervalQ& window, const Pwl& h, bool waive_endpoints = false);

// Move the turning point of f at c to c_new inside (p,q).  Requires
// f(p) = f(q) and c to be the only node of f inside (p,q).
PAMap peak_shift(const PAMap& f, const Rat& p, const Rat& q, const Rat& c_new);

}  // namespace pam
