#pragma once

#include <algorithm>
#include <ostream>
#include <random>
#include <vector>

#include "pam/map.hpp"
#include "pam/window.hpp"

namespace pam {
inline void PrintTo(const PAMap& f, std::ostream* os) {
    *os << "{";
    for (std::size_t i = 0; i < f.xs().size(); ++i) *os << (i ? ", " : "") << str(f.xs()[i]) << "->" << str(f.ys()[i]);
    *os << "}";
}
}  // namespace pam

namespace pamtest {

using pam::PAMap;
using pam::Rat;

// Raw engine bits only, so streams are identical across standard libraries.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    std::uint64_t bits() { return eng(); }
    std::uint64_t below(std::uint64_t n) { return eng() % n; }
    // j / 2^e with j uniform in [0, 2^e]
    Rat dyadic(unsigned e) {
        std::uint64_t den = std::uint64_t(1) << e;
        Rat r(pam::Int(static_cast<unsigned long>(below(den + 1))), pam::Int(static_cast<unsigned long>(den)));
        r.canonicalize();
        return r;
    }
};

// A random PA map on [0,1] with values on a dyadic grid; not measure-preserving.
inline PAMap random_map(Rng& r, unsigned nodes = 6, unsigned e = 8) {
    std::vector<Rat> xs{Rat(0)};
    while (xs.size() < nodes - 1) {
        Rat x = r.dyadic(e);
        if (x > 0 && x < 1 && std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    xs.push_back(1);
    std::sort(xs.begin(), xs.end());
    std::vector<Rat> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(r.dyadic(e));
    return PAMap(xs, ys);
}

// A random measure-preserving map: tent, valley or identity followed by a few
// random odd-fold windows.
inline PAMap random_mp_map(Rng& r, unsigned windows = 2) {
    PAMap f = r.below(3) == 0 ? PAMap::tent() : (r.below(2) ? PAMap::valley() : PAMap::identity());
    for (unsigned w = 0; w < windows; ++w) {
        Rat a = r.dyadic(6), b = r.dyadic(6);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        unsigned m = 2 * static_cast<unsigned>(r.below(3)) + 1;
        f = pam::window_mfold(f, {{a, b}, m});
    }
    return f;
}

// Direct preimage measure of [c,d]: per piece, the length of the x-interval
// mapped into [c,d].
inline Rat preimage_measure(const PAMap& f, const Rat& c, const Rat& d) {
    Rat total(0);
    for (std::size_t i = 0; i < f.pieces(); ++i) {
        Rat x0 = f.xs()[i], x1 = f.xs()[i + 1], y0 = f.ys()[i], y1 = f.ys()[i + 1];
        if (y0 == y1) {
            if (c <= y0 && y0 <= d) total += x1 - x0;
            continue;
        }
        Rat lo = std::min(y0, y1), hi = std::max(y0, y1);
        Rat a = std::max(lo, c), b = std::min(hi, d);
        if (a < b) total += (b - a) * (x1 - x0) / (hi - lo);
    }
    return total;
}

// Evaluate f^k at x by direct iteration.
inline Rat iterate_at(const PAMap& f, Rat x, unsigned k) {
    for (unsigned i = 0; i < k; ++i) x = f(x);
    return x;
}

// Grid oracle for Fix(f,k): sign changes (and zeros) of f^k(x) - x on a
// uniform grid, each bracket refined to the exact root of the affine piece of
// f^k that the grid cell falls in.  The grid must be finer than the pieces.
inline std::vector<Rat> grid_fixed_points(const PAMap& f, unsigned k, unsigned cells) {
    std::vector<Rat> out;
    Rat h = Rat(1) / cells;
    Rat prev_x = 0, prev_d = iterate_at(f, Rat(0), k);
    if (prev_d == 0) out.push_back(0);
    for (unsigned j = 1; j <= cells; ++j) {
        Rat x = h * j;
        Rat d = iterate_at(f, x, k) - x;
        if (d == 0) {
            out.push_back(x);
        } else if (pam::sgn(d) * pam::sgn(prev_d) < 0) {
            // bisect on exact values until the bracket lies in one affine piece
            Rat lo = prev_x, hi = x, dlo = prev_d, dhi = d;
            for (int it = 0; it < 200; ++it) {
                Rat root = lo - dlo * (hi - lo) / (dhi - dlo);
                if (iterate_at(f, root, k) == root) {
                    out.push_back(root);
                    break;
                }
                Rat mid = (lo + hi) / 2;
                Rat dm = iterate_at(f, mid, k) - mid;
                if (dm == 0) {
                    out.push_back(mid);
                    break;
                }
                if (pam::sgn(dm) == pam::sgn(dlo)) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                    dhi = dm;
                }
            }
        }
        prev_x = x;
        prev_d = d;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace pamtest
