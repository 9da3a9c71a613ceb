#pragma once

#include <string>
#include <vector>

#include "pam/map.hpp"

namespace pam {

// Measure-preserving map with Fix = {1/2}, three period-2 orbits and no
// slope +-1, every Fix(g,k) point transverse for k <= 3.  Its expansion near
// the fixed point is slow, which keeps the branches
// of g^k inside a fold window from drifting apart.  The slope on the piece
// through 1/2 is -5001/5000.
PAMap transverse_base();

// Named maps for the command line: tent, valley, identity, transverse-base.
PAMap catalog_map(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace pam
