#pragma once

#include <string>
#include <vector>

#include "pam/rat.hpp"

namespace pam {

// The acceptance battery.  Every tolerance is a constant below; nothing is
// read from the environment except the piece cap.
inline constexpr int kCriteria = 10;
inline constexpr double kLogWidth = 1e-12;         // criterion 4 enclosures
inline constexpr long kProhorovTolExponent = 9;    // criterion 9: 10^-9

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<std::string> details;
    double seconds = 0;
};

CriterionResult run_criterion(int id);
std::string format_line(const CriterionResult& r);

// Counting-law table for the bundled transverse base map.
struct CountRow {
    unsigned n = 1, k = 1;
    std::size_t ell = 0, fix = 0, per = 0;
    Rat lower, upper;
    std::vector<std::size_t> orbit_counts;
    bool ok = false;
};
std::vector<CountRow> periodic_counts(const std::vector<unsigned>& ns, const std::vector<unsigned>& ks);

}  // namespace pam
