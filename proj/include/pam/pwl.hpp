#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pam/rat.hpp"

namespace pam {

struct IntervalQ {
    Rat lo, hi;
    Rat length() const { return hi - lo; }
    bool contains(const Rat& x) const { return lo <= x && x <= hi; }
    bool contains(const IntervalQ& o) const { return lo <= o.lo && o.hi <= hi; }
    bool operator==(const IntervalQ& o) const { return lo == o.lo && hi == o.hi; }
};

// Continuous piecewise-linear function on [xs.front(), xs.back()] given by its
// nodes.  Always stored in canonical form: strictly increasing nodes and no
// interior node at which the two adjacent slopes agree.
class Pwl {
public:
    Pwl() = default;
    Pwl(std::vector<Rat> xs, std::vector<Rat> ys);

    static Pwl affine(const Rat& x0, const Rat& x1, const Rat& y0, const Rat& y1);
    static bool is_canonical(const std::vector<Rat>& xs, const std::vector<Rat>& ys);

    const std::vector<Rat>& xs() const { return xs_; }
    const std::vector<Rat>& ys() const { return ys_; }
    const Rat& lo() const { return xs_.front(); }
    const Rat& hi() const { return xs_.back(); }
    std::size_t pieces() const { return xs_.size() - 1; }

    Rat operator()(const Rat& x) const;
    // index i of a piece [xs[i], xs[i+1]] containing x
    std::size_t piece_of(const Rat& x) const;
    Rat slope(std::size_t i) const;

    std::pair<Rat, Rat> range() const;
    IntervalQ image(const Rat& a, const Rat& b) const;
    Pwl restrict(const Rat& a, const Rat& b) const;

    bool operator==(const Pwl& o) const { return xs_ == o.xs_ && ys_ == o.ys_; }
    bool operator!=(const Pwl& o) const { return !(*this == o); }

private:
    std::vector<Rat> xs_, ys_;
    void canonicalize();
};

// f o g.  The range of g must lie in the domain of f.
Pwl compose(const Pwl& f, const Pwl& g);

// Concatenate functions on adjacent domains; values must agree at the seams.
Pwl join(const std::vector<Pwl>& parts);

Rat sup_distance(const Pwl& f, const Pwl& g);

// All x in the domain with f(x) = y, excluding interior points of pieces on
// which f is constantly y.
std::vector<Rat> preimages(const Pwl& f, const Rat& y);

// Per image cell (cuts[c], cuts[c+1]) the sum of 1/|slope| over the pieces
// whose image covers the cell.  Throws FlatPieceError on a zero slope.
struct StepDensity {
    std::vector<Rat> cuts;
    std::vector<Rat> sums;
    Rat at(const Rat& y) const;  // value on the open cell containing y (y not a cut)
};
StepDensity branch_density(const Pwl& f);

struct EquivalenceCheck {
    bool ok = true;
    IntervalQ cell;
    Rat lhs, rhs;
};
// lambda-equivalence: identical preimage measures for every Borel set.
EquivalenceCheck lambda_equivalent(const Pwl& f, const Pwl& g);

std::size_t piece_cap();

}  // namespace pam
