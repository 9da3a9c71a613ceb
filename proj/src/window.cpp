#include "pam/window.hpp"

namespace pam {

Pwl fold_map(const Rat& a, const Rat& b, unsigned m, bool reversed) {
    if (m == 0) throw DomainError("fold count must be positive");
    if (!(a < b)) throw WindowError("empty window");
    std::vector<Rat> xs, ys;
    xs.reserve(m + 1);
    ys.reserve(m + 1);
    Rat step = (b - a) / m;
    for (unsigned j = 0; j <= m; ++j) {
        xs.push_back(j == m ? b : a + step * j);
        bool at_a = (j % 2 == 0) != reversed;
        ys.push_back(at_a ? a : b);
    }
    return Pwl(std::move(xs), std::move(ys));
}

namespace {

void check_window(const IntervalQ& w) {
    if (w.lo < 0 || w.hi > 1) throw WindowError("window [" + str(w.lo) + ", " + str(w.hi) + "] not inside [0,1]");
    if (!(w.lo < w.hi)) throw WindowError("window must have positive length");
}

PAMap glue(const PAMap& f, const Rat& a, const Rat& b, const Pwl& h) {
    std::vector<Pwl> parts;
    if (a > 0) parts.push_back(f.pwl().restrict(0, a));
    parts.push_back(h);
    if (b < 1) parts.push_back(f.pwl().restrict(b, 1));
    return PAMap(join(parts));
}

}  // namespace

PAMap window_mfold(const PAMap& f, const WindowSpec& w) {
    check_window(w.window);
    const Rat& a = w.window.lo;
    const Rat& b = w.window.hi;
    unsigned m = w.folds;
    if (m == 0) throw DomainError("fold count must be positive");
    if (m == 1) return f;
    bool reversed = false;
    if (m % 2 == 0 && f(a) != f(b)) {
        if (!w.waive_endpoints)
            throw ContinuityError("even fold count needs f(a) = f(b) on [" + str(a) + ", " + str(b) + "]");
        if (a == 0)
            reversed = true;
        else if (b != 1)
            throw ContinuityError("endpoint waiver needs a window touching 0 or 1");
    }
    Pwl h = compose(f.pwl().restrict(a, b), fold_map(a, b, m, reversed));
    return glue(f, a, b, h);
}

PAMap cellwise_mfold(const PAMap& f, const std::vector<Rat>& partition, unsigned m) {
    if (m % 2 == 0) throw DomainError("cellwise folds must be odd");
    if (partition.size() < 2 || partition.front() != 0 || partition.back() != 1)
        throw InvariantError("partition must run from 0 to 1");
    std::vector<Pwl> parts;
    parts.reserve(partition.size() - 1);
    std::size_t total = 0;
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
        const Rat& a = partition[i];
        const Rat& b = partition[i + 1];
        parts.push_back(compose(f.pwl().restrict(a, b), fold_map(a, b, m)));
        total += parts.back().pieces();
        if (total > piece_cap())
            throw ResourceError("piece count exceeds cap " + std::to_string(piece_cap()) + " (set PAMLAB_PIECE_CAP)");
    }
    return PAMap(join(parts));
}

PAMap window_replace(const PAMap& f, const IntervalQ& window, const Pwl& h, bool waive_endpoints) {
    check_window(window);
    const Rat& a = window.lo;
    const Rat& b = window.hi;
    if (h.lo() != a || h.hi() != b) throw WindowError("replacement is not defined on the window");
    bool left_ok = h.ys().front() == f(a) || (waive_endpoints && a == 0);
    bool right_ok = h.ys().back() == f(b) || (waive_endpoints && b == 1);
    if (!left_ok) throw EquivalenceError("endpoint mismatch at " + str(a));
    if (!right_ok) throw EquivalenceError("endpoint mismatch at " + str(b));
    EquivalenceCheck e = lambda_equivalent(h, f.pwl().restrict(a, b));
    if (!e.ok)
        throw EquivalenceError("not lambda-equivalent on cell (" + str(e.cell.lo) + ", " + str(e.cell.hi) +
                               "): " + str(e.lhs) + " vs " + str(e.rhs));
    return glue(f, a, b, h);
}

PAMap peak_shift(const PAMap& f, const Rat& p, const Rat& q, const Rat& c_new) {
    if (!(p < c_new && c_new < q)) throw WindowError("new turning point must lie inside the window");
    if (f(p) != f(q)) throw WindowError("peak shift needs f(p) = f(q)");
    Pwl old = f.pwl().restrict(p, q);
    if (old.pieces() != 2) throw WindowError("peak shift window must contain exactly one node of f");
    const Rat& top = old.ys()[1];
    Pwl h({p, c_new, q}, {f(p), top, f(q)});
    return window_replace(f, {p, q}, h);
}

}  // namespace pam
