#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace pam {

struct ClauseResult {
    ClauseResult(std::string n = {}) : name(std::move(n)) {}
    std::string name;
    bool ok = true;
    bool skipped = false;
    std::string detail;
};

inline bool all_ok(const std::vector<ClauseResult>& v) {
    return std::all_of(v.begin(), v.end(), [](const ClauseResult& c) { return c.ok; });
}

}  // namespace pam
