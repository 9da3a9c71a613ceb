#include "pam/shadowing.hpp"

#include <algorithm>
#include <random>

#include "pam/window.hpp"

namespace pam {

namespace {

std::string idx(std::size_t i) { return std::to_string(i); }

Rat mid(const IntervalQ& j) { return (j.lo + j.hi) / 2; }

Rat min_abs_slope(const PAMap& f) {
    Rat m = rabs(f.slope(0));
    for (std::size_t i = 1; i < f.pieces(); ++i) m = std::min(m, rabs(f.slope(i)));
    return m;
}

// Shortest monotonicity piece.
Rat shortest_monotone(const PAMap& f) {
    std::vector<Rat> c = crit(f);
    c.insert(c.begin(), Rat(0));
    c.push_back(1);
    Rat m = 1;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) m = std::min(m, Rat(c[i + 1] - c[i]));
    return m;
}

// Dyadic grid rounding for generated points.
Rat round_dyadic(const Rat& x, unsigned e) {
    Int den = Int(1) << e;
    Rat y = x * Rat(den);
    Int fl = floor_int(y + Rat(1, 2));
    Rat r(fl, den);
    r.canonicalize();
    return r;
}

Rat clamp01(const Rat& x) { return x < 0 ? Rat(0) : (x > 1 ? Rat(1) : x); }

std::uint64_t bits40(std::mt19937_64& eng) { return eng() >> 24; }

}  // namespace

std::size_t Partition::cell_of(const Rat& x) const {
    if (x < 0 || x > 1) throw DomainError("point " + str(x) + " outside [0,1]");
    auto it = std::upper_bound(points.begin(), points.end(), x);
    std::size_t i = static_cast<std::size_t>(it - points.begin());
    if (i == 0) return 0;
    if (i - 1 >= cells()) return cells() - 1;
    // x on an interior partition point belongs to both neighbours; take the lower
    if (points[i - 1] == x && i - 1 > 0) return i - 2;
    return i - 1;
}

void validate_pseudo_orbit(const PAMap& g, const PseudoOrbit& po) {
    if (po.points.empty()) throw PreconditionError("empty pseudo orbit");
    if (po.delta <= 0) throw PreconditionError("pseudo orbit delta must be positive");
    for (const Rat& x : po.points)
        if (x < 0 || x > 1) throw PreconditionError("pseudo orbit point " + str(x) + " outside [0,1]");
    std::size_t steps = po.points.size() - 1;
    if (po.kind == OrbitKind::periodic) {
        if (po.period == 0 || po.period != po.points.size())
            throw PreconditionError("periodic pseudo orbit must list exactly one period");
        steps = po.points.size();
    }
    auto delta_at = [&](std::size_t i) {
        if (po.kind != OrbitKind::asymptotic) return po.delta;
        Rat d = po.delta;
        for (const auto& lv : po.schedule)
            if (i >= lv.start) d = lv.delta;
        return d;
    };
    if (po.kind == OrbitKind::asymptotic) {
        if (po.schedule.empty() || po.schedule.front().start != 0)
            throw PreconditionError("asymptotic schedule must start at index 0");
        for (std::size_t n = 1; n < po.schedule.size(); ++n)
            if (po.schedule[n].start <= po.schedule[n - 1].start)
                throw PreconditionError("asymptotic schedule starts must increase");
    }
    for (std::size_t i = 0; i < steps; ++i) {
        Rat next = po.at(i + 1);
        Rat d = delta_at(i);
        if (rabs(g(po.points[i]) - next) >= d)
            throw PreconditionError("pseudo orbit jump at index " + idx(i) + " is not below " + str(d));
    }
}

namespace {

struct DeltaBound {
    Rat bound;          // 0 when infeasible
    std::string clash;  // reason when infeasible
};

std::size_t last_at_most(const std::vector<Rat>& pts, const Rat& x) {
    return static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), x) - pts.begin()) - 1;
}

DeltaBound delta_bound(const PAMap& f, const Partition& p, const Rat& eps) {
    const auto& a = p.points;
    DeltaBound out{eps / 2, {}};
    auto fail = [&](std::string s) {
        out.bound = 0;
        out.clash = std::move(s);
        return out;
    };
    for (std::size_t j = 0; j + 1 < a.size(); ++j) out.bound = std::min(out.bound, Rat((a[j + 1] - a[j]) / 2));
    for (std::size_t j = 0; j + 1 < a.size(); ++j) {
        IntervalQ img = f.image(a[j], a[j + 1]);
        // 3-delta neighbourhood adds no new cell
        if (img.lo > 0) {
            std::size_t i = last_at_most(a, img.lo);
            if (a[i] == img.lo) return fail("image of cell " + idx(j) + " starts at partition point " + str(img.lo));
            out.bound = std::min(out.bound, Rat((img.lo - a[i]) / 3));
        }
        if (img.hi < 1) {
            std::size_t i = last_at_most(a, img.hi);
            if (a[i] == img.hi) return fail("image of cell " + idx(j) + " ends at partition point " + str(img.hi));
            out.bound = std::min(out.bound, Rat((a[i + 1] - img.hi) / 3));
        }
        // 2-delta cover of every touched cell from one side
        std::size_t first = img.lo == 1 ? a.size() - 2 : last_at_most(a, img.lo);
        if (first > 0 && a[first] == img.lo) --first;
        for (std::size_t i = first; i + 1 < a.size() && a[i] <= img.hi; ++i) {
            if (a[i + 1] < img.lo) continue;
            Rat left = img.lo <= a[i] ? Rat(std::min(img.hi, a[i + 1]) - a[i]) : Rat(0);
            Rat right = img.hi >= a[i + 1] ? Rat(a[i + 1] - std::max(img.lo, a[i])) : Rat(0);
            Rat best = std::max(left, right);
            if (best <= 0)
                return fail("image of cell " + idx(j) + " meets cell " + idx(i) + " without covering an end of it");
            out.bound = std::min(out.bound, Rat(best / 2));
        }
    }
    return out;
}

std::string partition_clash(const PAMap& f, const std::vector<Rat>& a) {
    std::vector<Rat> cv;
    for (const Rat& c : crit(f)) cv.push_back(f(c));
    std::sort(cv.begin(), cv.end());
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        Rat y = f(a[i]);
        if (y == 0 || y == 1) continue;
        if (std::binary_search(a.begin(), a.end(), y)) return "f(" + str(a[i]) + ") = " + str(y) + " is a partition point";
        if (std::binary_search(cv.begin(), cv.end(), a[i])) return str(a[i]) + " is a critical value";
    }
    return {};
}

Partition uniform_partition(const Rat& gamma, const Rat& h, const Rat& theta, std::size_t n) {
    Partition p;
    p.gamma = gamma;
    p.offset = theta;
    p.points.reserve(n + 2);
    p.points.push_back(0);
    for (std::size_t i = 0; i < n; ++i) p.points.push_back(theta + h * Rat(static_cast<unsigned long>(i)));
    p.points.push_back(1);
    return p;
}

}  // namespace

Rat choose_delta(const PAMap& f, const Partition& p, const Rat& eps) {
    DeltaBound b = delta_bound(f, p, eps);
    if (b.bound <= 0) throw ConstructionError("no admissible delta: " + b.clash);
    Rat d = pow2_at_most(b.bound);
    while (d >= eps / 2) d /= 2;
    return d;
}

Partition build_partition(const PAMap& f, const Rat& eps) {
    if (eps <= 0) throw DomainError("eps must be positive");
    if (min_abs_slope(f) < 4) throw PreconditionError("every slope must have magnitude >= 4 (see steepen)");
    Rat s = max_abs_slope(f);
    Rat gamma = std::min(Rat(eps / (2 * s)), Rat(shortest_monotone(f) / 2));
    Int n = floor_int(1 / gamma) + 1;
    if (n > Int(static_cast<unsigned long>(piece_cap()))) throw ResourceError("partition would exceed the piece cap");
    std::size_t cells = n.get_ui();
    Rat h = Rat(1) / Rat(n);
    // midpoint offset first; it puts images of grid points of an affine
    // piece with integer slope into cell middles
    Partition best;
    Rat best_bound = -1;
    std::string clash;
    for (unsigned j : {4u, 2u, 6u, 1u, 3u, 5u, 7u}) {
        Rat theta = h * j / 8;
        Partition p = uniform_partition(gamma, h, theta, cells);
        std::string c = partition_clash(f, p.points);
        if (!c.empty()) {
            clash = c;
            continue;
        }
        DeltaBound b = delta_bound(f, p, eps);
        if (b.bound <= 0) {
            clash = b.clash;
            continue;
        }
        if (b.bound > best_bound) {
            best_bound = b.bound;
            best = std::move(p);
        }
    }
    if (best_bound <= 0) throw ConstructionError("partition infeasible: " + clash);
    return best;
}

std::vector<ClauseResult> check_partition(const PAMap& f, const Partition& p, const Rat& eps) {
    const auto& a = p.points;
    ClauseResult mesh{"mesh"}, modulus{"modulus"}, shortp{"below-monotone-piece"}, ii{"image-avoids-partition"},
        iii{"avoids-critical-values"};
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        if (a[i + 1] - a[i] > p.gamma) {
            mesh.ok = false;
            mesh.detail = "cell " + idx(i) + " longer than gamma";
            break;
        }
    if (a.front() != 0 || a.back() != 1) {
        mesh.ok = false;
        mesh.detail = "partition must run from 0 to 1";
    }
    modulus.ok = p.gamma < eps / 2 && max_abs_slope(f) * p.gamma <= eps / 2;
    modulus.detail = "gamma = " + str(p.gamma);
    shortp.ok = p.gamma < shortest_monotone(f);
    std::vector<Rat> cv;
    for (const Rat& c : crit(f)) cv.push_back(f(c));
    std::sort(cv.begin(), cv.end());
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        Rat y = f(a[i]);
        if (y == 0 || y == 1) continue;
        if (ii.ok && std::binary_search(a.begin(), a.end(), y)) {
            ii.ok = false;
            ii.detail = "f(" + str(a[i]) + ") is a partition point";
        }
        if (iii.ok && std::binary_search(cv.begin(), cv.end(), a[i])) {
            iii.ok = false;
            iii.detail = str(a[i]) + " is a critical value";
        }
    }
    return {mesh, modulus, shortp, ii, iii};
}

PAMap steepen(const PAMap& f) {
    std::vector<Rat> c = crit(f);
    c.insert(c.begin(), Rat(0));
    c.push_back(1);
    PAMap g = f;
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
        Pwl piece = f.pwl().restrict(c[j], c[j + 1]);
        Rat lo = rabs(piece.slope(0));
        for (std::size_t i = 1; i < piece.pieces(); ++i) lo = std::min(lo, rabs(piece.slope(i)));
        if (lo == 0) throw FlatPieceError("flat piece on [" + str(c[j]) + ", " + str(c[j + 1]) + "]");
        unsigned m = 1;
        while (lo * m < 4) m += 2;
        if (m > 1) g = window_mfold(g, {{c[j], c[j + 1]}, m});
    }
    return g;
}

ShadowingKit shadowing_perturbation(const PAMap& f, const Rat& eps) {
    if (!verify_lebesgue(f).ok) throw PreconditionError("map is not measure-preserving");
    Partition p = build_partition(f, eps);
    Rat delta = choose_delta(f, p, eps);
    Rat inv = 1 / delta;
    Int m = floor_int(inv) + 1;
    if (m % 2 == 0) m += 1;
    std::size_t est = 0;
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i)
        est += f.pwl().restrict(p.points[i], p.points[i + 1]).pieces();
    if (Int(static_cast<unsigned long>(est)) * m > Int(static_cast<unsigned long>(piece_cap())))
        throw ResourceError("kit needs about " + std::to_string(est) + " x " + m.get_str() + " pieces, over the cap " +
                            std::to_string(piece_cap()));
    ShadowingKit kit{cellwise_mfold(f, p.points, static_cast<unsigned>(m.get_ui())), std::move(p), eps, delta,
                     m.get_ui()};
    return kit;
}

std::vector<ClauseResult> verify_kit(const ShadowingKit& kit, const PAMap& f) {
    std::vector<ClauseResult> out = check_partition(f, kit.partition, kit.eps);
    const auto& a = kit.partition.points;
    const Rat& d = kit.delta;
    DeltaBound b = delta_bound(f, kit.partition, kit.eps);
    ClauseResult dc{"delta-conditions"};
    dc.ok = b.bound > 0 && d <= b.bound;
    dc.detail = b.bound > 0 ? "delta = " + str(d) + ", admissible up to " + str(b.bound) : b.clash;
    out.push_back(dc);
    ClauseResult deps{"delta-below-eps/2"};
    deps.ok = d > 0 && d < kit.eps / 2;
    out.push_back(deps);
    ClauseResult fold{"fold-count"};
    fold.ok = kit.m % 2 == 1 && Rat(1) / Rat(Int(static_cast<unsigned long>(kit.m))) < d;
    fold.detail = "m = " + std::to_string(kit.m);
    out.push_back(fold);
    ClauseResult cover{"cell-image-identity"};
    for (std::size_t i = 0; i + 1 < a.size() && cover.ok; ++i) {
        IntervalQ want = f.image(a[i], a[i + 1]);
        if (kit.F.image(a[i], a[i + 1]) != want || kit.F.image(a[i], a[i] + d) != want ||
            kit.F.image(a[i + 1] - d, a[i + 1]) != want) {
            cover.ok = false;
            cover.detail = "cell " + idx(i);
        }
    }
    out.push_back(cover);
    ClauseResult rho{"distance"};
    Rat r = uniform_distance(f, kit.F);
    rho.ok = r < kit.eps / 2;
    rho.detail = "rho(f,F) = " + str(r);
    out.push_back(rho);
    ClauseResult mp{"measure-preserving"};
    mp.ok = verify_lebesgue(kit.F).ok;
    out.push_back(mp);
    ClauseResult sl{"slopes"};
    sl.ok = min_abs_slope(kit.F) > max_abs_slope(f);
    out.push_back(sl);
    return out;
}

IntervalQ onto_subinterval(const PAMap& g, const IntervalQ& j, const IntervalQ& k) {
    const auto& xs = g.xs();
    const auto& ys = g.ys();
    const Rat& c = k.lo;
    const Rat& d = k.hi;
    std::size_t i = g.pwl().piece_of(j.lo);
    int last_label = -1;
    Rat last_x;
    auto visit = [&](const Rat& x, int label, IntervalQ& out) {
        if (last_label >= 0 && label != last_label) {
            out = {last_x, x};
            return true;
        }
        last_label = label;
        last_x = x;
        return false;
    };
    IntervalQ out;
    for (; i < g.pieces() && xs[i] <= j.hi; ++i) {
        Rat x0 = std::max(xs[i], j.lo), x1 = std::min(xs[i + 1], j.hi);
        if (x0 > x1) continue;
        Rat s = g.slope(i);
        Rat y0 = ys[i] + s * (x0 - xs[i]);
        Rat y1 = ys[i] + s * (x1 - xs[i]);
        Rat lo = std::min(y0, y1), hi = std::max(y0, y1);
        // preimages of c and d on this piece, in increasing x
        std::vector<std::pair<Rat, int>> ev;
        for (int label : {0, 1}) {
            const Rat& y = label == 0 ? c : d;
            if (y < lo || y > hi) continue;
            if (s == 0) {
                ev.push_back({x0, label});
                ev.push_back({x1, label});
            } else {
                ev.push_back({x0 + (y - y0) / s, label});
            }
        }
        std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [x, label] : ev)
            if (visit(x, label, out)) {
                if (out.lo > out.hi) std::swap(out.lo, out.hi);
                return out;
            }
    }
    throw ConstructionError("image of [" + str(j.lo) + ", " + str(j.hi) + "] does not cover [" + str(c) + ", " +
                            str(d) + "]");
}

std::vector<Rat> pwl_fixed_points(const Pwl& h) {
    std::vector<Rat> out;
    const auto& xs = h.xs();
    const auto& ys = h.ys();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rat d0 = ys[i] - xs[i], d1 = ys[i + 1] - xs[i + 1];
        if (d0 == 0) out.push_back(xs[i]);
        if (d1 == 0) out.push_back(xs[i + 1]);
        if (d0 != 0 && d1 != 0 && sgn(d0) != sgn(d1)) out.push_back(xs[i] + d0 * (xs[i + 1] - xs[i]) / (d0 - d1));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

struct Candidate {
    IntervalQ j;
    char tag;
};

// L or R of a cell containing x that lies inside img; nearest midpoint wins,
// ties to L of the lower cell.
bool pick_next(const Partition& p, const Rat& delta, const IntervalQ& img, const Rat& x, Candidate& out) {
    std::size_t q = p.cell_of(x);
    std::vector<Candidate> cands;
    for (std::size_t c : {q, q + 1}) {
        if (c >= p.cells()) continue;
        if (c == q + 1 && p.points[c] != x) continue;
        const Rat& lo = p.points[c];
        const Rat& hi = p.points[c + 1];
        cands.push_back({{lo, lo + delta}, 'L'});
        cands.push_back({{hi - delta, hi}, 'R'});
    }
    bool found = false;
    Rat best;
    for (const auto& c : cands) {
        if (!img.contains(c.j)) continue;
        Rat dist = rabs(mid(c.j) - x);
        if (!found || dist < best) {
            found = true;
            best = dist;
            out = c;
        }
    }
    return found;
}

void check_distance(const ShadowingKit& kit, const PAMap& g, const Rat& delta) {
    if (!(g == kit.F)) {
        Rat r = uniform_distance(kit.F, g);
        if (r >= delta) throw PreconditionError("rho(F,g) = " + str(r) + " is not below delta = " + str(delta));
    }
}

struct Chain {
    std::vector<IntervalQ> j;
    std::vector<char> tag;
};

Chain forward_chain(const Partition& p, const Rat& delta, const PAMap& g, const PseudoOrbit& po, std::size_t steps) {
    Chain ch;
    std::size_t c0 = p.cell_of(po.at(0));
    ch.j.push_back({p.points[c0], p.points[c0 + 1]});
    ch.tag.push_back('C');
    for (std::size_t i = 1; i < steps; ++i) {
        IntervalQ img = g.image(ch.j.back().lo, ch.j.back().hi);
        Candidate c;
        if (!pick_next(p, delta, img, po.at(i), c))
            throw ConstructionError("chain break at index " + idx(i) + ": neither L nor R is covered");
        ch.j.push_back(c.j);
        ch.tag.push_back(c.tag);
    }
    return ch;
}

// Nested K_i inside J_i with g(K_i) = K_{i+1}; returns K_0 .. K_{T-1}.
std::vector<IntervalQ> backward(const PAMap& g, const std::vector<IntervalQ>& js, const IntervalQ& last_target) {
    std::vector<IntervalQ> ks(js.size());
    IntervalQ k = last_target;
    for (std::size_t i = js.size(); i-- > 0;) {
        k = onto_subinterval(g, js[i], k);
        ks[i] = k;
    }
    return ks;
}

}  // namespace

Trace trace(const ShadowingKit& kit, const PAMap& g, const PseudoOrbit& po) {
    if (po.delta > kit.delta) throw PreconditionError("pseudo orbit delta " + str(po.delta) + " exceeds kit delta");
    check_distance(kit, g, kit.delta);
    validate_pseudo_orbit(g, po);
    std::size_t steps = po.kind == OrbitKind::periodic ? po.points.size() : po.points.size();
    Chain ch = forward_chain(kit.partition, kit.delta, g, po, steps);
    Trace t;
    t.chain = ch.j;
    t.choice = ch.tag;
    std::vector<IntervalQ> head(ch.j.begin(), ch.j.end() - 1);
    std::vector<IntervalQ> ks = head.empty() ? std::vector<IntervalQ>{} : backward(g, head, ch.j.back());
    IntervalQ k0 = ks.empty() ? ch.j.back() : ks.front();
    t.z = mid(k0);
    Rat y = t.z;
    t.max_err = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        if (!ch.j[i].contains(y)) throw ConstructionError("traced point left J_" + idx(i));
        Rat e = rabs(y - po.at(i));
        t.errors.push_back(e);
        t.max_err = std::max(t.max_err, e);
        if (i + 1 < steps) y = g(y);
    }
    if (t.max_err >= 2 * kit.partition.gamma) throw ConstructionError("tracing error " + str(t.max_err) + " not below 2 gamma");
    return t;
}

PeriodicTrace trace_periodic(const ShadowingKit& kit, const PAMap& g, const PseudoOrbit& po) {
    if (po.kind != OrbitKind::periodic) throw PreconditionError("pseudo orbit is not periodic");
    if (po.delta > kit.delta) throw PreconditionError("pseudo orbit delta exceeds kit delta");
    check_distance(kit, g, kit.delta);
    validate_pseudo_orbit(g, po);
    const std::size_t n = po.period;
    const Partition& p = kit.partition;
    // pigeonhole over the 2 * cells L/R candidates plus the initial cells
    const std::size_t bound = 3 * p.cells() + 2;
    Chain ch = forward_chain(p, kit.delta, g, po, 1);
    std::vector<std::size_t> marks{0};
    std::size_t k = 0, s = 0;
    for (std::size_t blk = 1; blk <= bound && s == 0; ++blk) {
        for (std::size_t i = ch.j.size(); i <= blk * n; ++i) {
            IntervalQ img = g.image(ch.j.back().lo, ch.j.back().hi);
            Candidate c;
            if (!pick_next(p, kit.delta, img, po.at(i), c))
                throw ConstructionError("chain break at index " + idx(i));
            ch.j.push_back(c.j);
            ch.tag.push_back(c.tag);
        }
        const IntervalQ& cur = ch.j[blk * n];
        for (std::size_t prev = 0; prev < blk; ++prev)
            if (ch.j[prev * n] == cur) {
                k = prev;
                s = blk;
                break;
            }
    }
    if (s == 0) throw ConstructionError("no repetition within the pigeonhole bound");
    PeriodicTrace out;
    out.k = k;
    out.s = s;
    out.period = (s - k) * n;
    std::vector<IntervalQ> loop(ch.j.begin() + static_cast<long>(k * n), ch.j.begin() + static_cast<long>(s * n));
    std::vector<IntervalQ> ks = backward(g, loop, loop.front());
    Pwl h = g.pwl().restrict(ks[0].lo, ks[0].hi);
    for (std::size_t i = 1; i < ks.size(); ++i) h = compose(g.pwl().restrict(ks[i].lo, ks[i].hi), h);
    std::vector<Rat> roots = pwl_fixed_points(h);
    if (roots.empty()) throw ConstructionError("periodic chain without a fixed point of g^P");
    out.z = roots.front();
    Rat y = out.z;
    out.max_err = 0;
    for (std::size_t i = 0; i < out.period; ++i) {
        if (!loop[i].contains(y)) throw ConstructionError("periodic point left L_" + idx(i));
        out.max_err = std::max(out.max_err, rabs(y - po.at(i)));
        y = g(y);
    }
    if (y != out.z) throw ConstructionError("g^P(z) != z");
    out.base.chain = ch.j;
    out.base.choice = ch.tag;
    out.base.z = out.z;
    out.base.max_err = out.max_err;
    return out;
}

TowerEstimate estimate_next_level(const PAMap& prev, const Rat& prev_delta, const Rat& eps_n) {
    Rat s = max_abs_slope(prev);
    TowerEstimate e;
    // modulus for eps_n, below the shortest monotone piece, and small enough
    // that rho(g_n, g_{n-1}) <= s * mesh leaves room in the previous ball
    e.gamma_bound = std::min({Rat(eps_n / (2 * s)), Rat(shortest_monotone(prev) / 2), Rat(prev_delta / (2 * s))});
    e.cells = Rat(floor_int(1 / e.gamma_bound));
    // delta_n <= mesh / 2 and 1/m_n < delta_n, so every cell holds >= 2/mesh folds
    e.pieces = e.cells * (2 / e.gamma_bound);
    return e;
}

namespace {

Partition refine(const Partition& prev, const Rat& gamma) {
    Partition p;
    p.gamma = gamma;
    p.offset = prev.offset;
    p.points.push_back(0);
    for (std::size_t i = 0; i + 1 < prev.points.size(); ++i) {
        Rat len = prev.points[i + 1] - prev.points[i];
        Int r = floor_int(len / gamma) + 1;
        for (Int j = 1; j <= r; ++j) {
            Rat x = prev.points[i] + len * Rat(j) / Rat(r);
            p.points.push_back(j == r ? prev.points[i + 1] : x);
        }
    }
    return p;
}

Rat max_cell_image(const PAMap& g, const Partition& p) {
    Rat m = 0;
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) m = std::max(m, g.image(p.points[i], p.points[i + 1]).length());
    return m;
}

}  // namespace

SLimitTower s_limit_tower(const PAMap& f, const Rat& eps, unsigned depth) {
    if (depth == 0) throw DomainError("depth must be positive");
    SLimitTower t;
    t.base = f;
    t.eps = eps;
    Rat eps_n = eps / 2;
    {
        TowerLevel lv{shadowing_perturbation(f, eps_n), eps_n, 0, true};
        lv.rho_prev = uniform_distance(f, lv.kit.F);
        t.levels.push_back(std::move(lv));
    }
    for (unsigned n = 2; n <= depth; ++n) {
        const TowerLevel& prev = t.levels.back();
        const PAMap& g = prev.kit.F;
        eps_n = prev.eps / 2;
        TowerEstimate est = estimate_next_level(g, prev.kit.delta, eps_n);
        if (est.pieces > Rat(Int(static_cast<unsigned long>(piece_cap()))))
            throw ResourceError("tower level " + std::to_string(n) + " needs at least " + floor_int(est.pieces).get_str() +
                                " pieces (" + floor_int(est.cells).get_str() + " cells); cap is " +
                                std::to_string(piece_cap()));
        Partition p = refine(prev.kit.partition, est.gamma_bound);
        Rat delta = choose_delta(g, p, eps_n);
        Rat rho_bound = max_cell_image(g, p);
        while (delta > 0 && rho_bound + delta > prev.kit.delta) delta /= 2;
        Int m = floor_int(1 / delta) + 1;
        if (m % 2 == 0) m += 1;
        ShadowingKit kit{cellwise_mfold(g, p.points, static_cast<unsigned>(m.get_ui())), std::move(p), eps_n, delta,
                         m.get_ui()};
        TowerLevel lv{std::move(kit), eps_n, rho_bound, false};
        t.levels.push_back(std::move(lv));
    }

    ClauseResult e1{"eps1-below-eps"}, dec{"eps-decreasing"}, d1{"delta1-below-eps/2"}, ref{"refinement"},
        nest{"ball-nesting"}, tel{"telescoping"};
    e1.ok = t.levels[0].eps < eps;
    d1.ok = t.levels[0].kit.delta < eps / 2;
    Rat total = 0;
    for (std::size_t n = 0; n < t.levels.size(); ++n) {
        total += t.levels[n].rho_prev;
        if (n == 0) continue;
        const auto& a = t.levels[n - 1];
        const auto& b = t.levels[n];
        if (!(b.eps < a.eps)) dec.ok = false;
        for (const Rat& x : a.kit.partition.points)
            if (!std::binary_search(b.kit.partition.points.begin(), b.kit.partition.points.end(), x)) ref.ok = false;
        if (b.rho_prev + b.kit.delta > a.kit.delta) {
            nest.ok = false;
            nest.detail += "level " + idx(n + 1) + "; ";
        }
    }
    Rat direct = uniform_distance(f, t.levels.back().kit.F);
    tel.ok = direct <= total && total < eps;
    tel.detail = "rho(f, g_N) = " + str(direct) + " <= " + str(total);
    t.checks = {e1, dec, d1, ref, nest, tel};
    return t;
}

AsymptoticTrace trace_asymptotic(const SLimitTower& tower, const PseudoOrbit& po) {
    if (po.kind != OrbitKind::asymptotic) throw PreconditionError("pseudo orbit is not asymptotic");
    if (po.schedule.size() > tower.levels.size()) throw PreconditionError("schedule has more levels than the tower");
    const PAMap& g = tower.levels.back().kit.F;
    for (std::size_t n = 0; n < po.schedule.size(); ++n)
        if (po.schedule[n].delta > tower.levels[n].kit.delta)
            throw PreconditionError("schedule level " + idx(n + 1) + " delta exceeds the tower's delta");
    validate_pseudo_orbit(g, po);
    auto level_at = [&](std::size_t i) {
        unsigned lv = 0;
        for (std::size_t n = 0; n < po.schedule.size(); ++n)
            if (i >= po.schedule[n].start) lv = static_cast<unsigned>(n);
        return lv;
    };
    AsymptoticTrace out;
    const std::size_t steps = po.points.size();
    {
        const Partition& p = tower.levels[0].kit.partition;
        std::size_t c0 = p.cell_of(po.points[0]);
        out.chain.push_back({p.points[c0], p.points[c0 + 1]});
        out.level.push_back(0);
    }
    for (std::size_t i = 1; i < steps; ++i) {
        unsigned lv = level_at(i);
        const ShadowingKit& kit = tower.levels[lv].kit;
        IntervalQ img = g.image(out.chain.back().lo, out.chain.back().hi);
        Candidate c;
        if (!pick_next(kit.partition, kit.delta, img, po.points[i], c))
            throw ConstructionError("chain break at index " + idx(i) + " (level " + std::to_string(lv + 1) + ")");
        out.chain.push_back(c.j);
        out.level.push_back(lv);
    }
    std::vector<IntervalQ> head(out.chain.begin(), out.chain.end() - 1);
    std::vector<IntervalQ> ks = head.empty() ? std::vector<IntervalQ>{} : backward(g, head, out.chain.back());
    out.z = mid(ks.empty() ? out.chain.back() : ks.front());
    out.segment_max.assign(po.schedule.size(), Rat(0));
    out.max_err = 0;
    Rat y = out.z;
    for (std::size_t i = 0; i < steps; ++i) {
        Rat e = rabs(y - po.points[i]);
        out.segment_max[out.level[i]] = std::max(out.segment_max[out.level[i]], e);
        out.max_err = std::max(out.max_err, e);
        if (i + 1 < steps) y = g(y);
    }
    return out;
}

namespace {

// jumps uniform in (-delta_i, delta_i) on a 2^-40 grid, shrunk by 1/1024 to
// absorb the rounding of g(x) to the grid
template <class DeltaAt>
std::vector<Rat> grow_orbit(const PAMap& g, std::size_t length, std::uint64_t seed, DeltaAt delta_at) {
    std::mt19937_64 eng(seed);
    const Rat unit = Rat(1) / Rat(Int(1) << 40);
    std::vector<Rat> pts;
    pts.push_back(Rat(Int(static_cast<unsigned long>(bits40(eng)))) * unit);
    while (pts.size() < length) {
        const Rat& delta = delta_at(pts.size() - 1);
        Rat u = Rat(Int(static_cast<unsigned long>(bits40(eng)))) * unit;  // [0,1)
        Rat jump = delta * Rat(1023, 1024) * (2 * u - 1);
        Rat gx = g(pts.back());
        Rat next = clamp01(round_dyadic(gx, 40) + jump);
        if (rabs(gx - next) >= delta) next = clamp01(round_dyadic(gx, 40));
        pts.push_back(next);
    }
    return pts;
}

}  // namespace

PseudoOrbit random_pseudo_orbit(const PAMap& g, const Rat& delta, std::size_t length, std::uint64_t seed) {
    PseudoOrbit po;
    po.delta = delta;
    po.points = grow_orbit(g, length, seed, [&](std::size_t) -> const Rat& { return delta; });
    return po;
}

PseudoOrbit random_asymptotic_pseudo_orbit(const PAMap& g, const std::vector<ScheduleLevel>& schedule,
                                           std::size_t length, std::uint64_t seed) {
    if (schedule.empty() || schedule.front().start != 0) throw PreconditionError("schedule must start at index 0");
    PseudoOrbit po;
    po.kind = OrbitKind::asymptotic;
    po.schedule = schedule;
    po.delta = schedule.front().delta;
    po.points = grow_orbit(g, length, seed, [&](std::size_t i) -> const Rat& {
        std::size_t n = 0;
        while (n + 1 < schedule.size() && schedule[n + 1].start <= i) ++n;
        return schedule[n].delta;
    });
    return po;
}

PseudoOrbit random_periodic_pseudo_orbit(const ShadowingKit& kit, const PAMap& g, unsigned period, std::uint64_t seed) {
    if (period == 0) throw DomainError("period must be positive");
    std::mt19937_64 eng(seed);
    const Partition& p = kit.partition;
    const std::size_t nc = p.cells();
    // cell-level covering graph of g
    std::vector<std::vector<std::size_t>> succ(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        IntervalQ img = g.image(p.points[c], p.points[c + 1]);
        auto first = std::lower_bound(p.points.begin(), p.points.end(), img.lo);
        for (std::size_t d = static_cast<std::size_t>(first - p.points.begin()); d < nc && p.points[d + 1] <= img.hi; ++d)
            succ[c].push_back(d);
    }
    for (std::size_t attempt = 0; attempt < 4 * nc; ++attempt) {
        std::size_t c0 = eng() % nc;
        // reach[j][c]: c reaches c0 in exactly j steps
        std::vector<std::vector<char>> reach(period + 1, std::vector<char>(nc, 0));
        reach[0][c0] = 1;
        for (unsigned j = 1; j <= period; ++j)
            for (std::size_t c = 0; c < nc; ++c)
                for (std::size_t d : succ[c])
                    if (reach[j - 1][d]) {
                        reach[j][c] = 1;
                        break;
                    }
        if (!reach[period][c0]) continue;
        std::vector<std::size_t> cyc{c0};
        for (unsigned j = period - 1; j >= 1; --j) {
            std::vector<std::size_t> opts;
            for (std::size_t d : succ[cyc.back()])
                if (reach[j][d]) opts.push_back(d);
            cyc.push_back(opts[eng() % opts.size()]);
        }
        std::vector<IntervalQ> loop;
        for (std::size_t c : cyc) loop.push_back({p.points[c], p.points[c + 1]});
        std::vector<IntervalQ> ks = backward(g, loop, loop.front());
        Pwl h = g.pwl().restrict(ks[0].lo, ks[0].hi);
        for (std::size_t i = 1; i < ks.size(); ++i) h = compose(g.pwl().restrict(ks[i].lo, ks[i].hi), h);
        std::vector<Rat> roots = pwl_fixed_points(h);
        if (roots.empty()) continue;
        std::vector<Rat> orbit_pts{roots.front()};
        for (unsigned i = 1; i < period; ++i) orbit_pts.push_back(g(orbit_pts.back()));
        // small per-point noise keeps every jump below delta
        Rat s = max_abs_slope(g);
        Rat amp = kit.delta / (4 * (s + 1));
        const Rat unit = Rat(1) / Rat(Int(1) << 40);
        PseudoOrbit po;
        po.delta = kit.delta;
        po.kind = OrbitKind::periodic;
        po.period = period;
        for (const Rat& x : orbit_pts) {
            Rat u = Rat(Int(static_cast<unsigned long>(bits40(eng)))) * unit;
            po.points.push_back(clamp01(x + amp * (2 * u - 1)));
        }
        try {
            validate_pseudo_orbit(g, po);
        } catch (const PreconditionError&) {
            po.points = orbit_pts;
        }
        return po;
    }
    throw ConstructionError("no covering cycle of length " + std::to_string(period) + " found");
}

}  // namespace pam
