#include "pam/conjugate.hpp"

#include <algorithm>

#include "pam/periodic.hpp"
#include "pam/shadowing.hpp"

namespace pam {

namespace {

using Kind = MeasureRep::Kind;

bool strictly_increasing(const PAMap& f) {
    for (std::size_t i = 0; i < f.pieces(); ++i)
        if (f.slope(i) <= 0) return false;
    return true;
}

void sort_unique(std::vector<Rat>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

Rat overlap(const IntervalQ& a, const Rat& lo, const Rat& hi) {
    Rat l = std::max(a.lo, lo), h = std::min(a.hi, hi);
    return l < h ? Rat(h - l) : Rat(0);
}

}  // namespace

MeasureRep MeasureRep::lebesgue() { return MeasureRep{}; }

MeasureRep MeasureRep::pa_density(PAMap cdf) {
    if (cdf.ys().front() != 0 || cdf.ys().back() != 1) throw MeasureError("distribution must run from 0 to 1");
    if (!strictly_increasing(cdf)) throw MeasureError("distribution must be strictly increasing");
    MeasureRep m;
    m.kind = Kind::pa_density;
    m.cdf = std::move(cdf);
    return m;
}

MeasureRep MeasureRep::atomic(std::vector<std::pair<Rat, Rat>> atoms) {
    if (atoms.empty()) throw MeasureError("no atoms");
    std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Rat, Rat>> merged;
    Rat total = 0;
    for (auto& [p, w] : atoms) {
        if (p < 0 || p > 1) throw MeasureError("atom " + str(p) + " outside [0,1]");
        if (w <= 0) throw MeasureError("atom weights must be positive");
        total += w;
        if (!merged.empty() && merged.back().first == p)
            merged.back().second += w;
        else
            merged.push_back({p, w});
    }
    if (total != 1) throw MeasureError("atom weights sum to " + str(total));
    MeasureRep m;
    m.kind = Kind::atomic;
    m.atoms = std::move(merged);
    return m;
}

MeasureRep MeasureRep::cantor(std::vector<std::vector<IntervalQ>> levels, std::vector<Rat> masses) {
    if (levels.empty()) throw MeasureError("no levels");
    for (std::size_t d = 0; d < levels.size(); ++d) {
        auto& lv = levels[d];
        if (lv.empty()) throw MeasureError("empty level " + std::to_string(d));
        std::sort(lv.begin(), lv.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
        for (std::size_t i = 0; i < lv.size(); ++i) {
            if (!(lv[i].lo < lv[i].hi) || lv[i].lo < 0 || lv[i].hi > 1)
                throw MeasureError("bad interval at level " + std::to_string(d));
            if (i > 0 && !(lv[i - 1].hi < lv[i].lo))
                throw MeasureError("intervals overlap at level " + std::to_string(d));
            if (d > 0) {
                bool inside = false;
                for (const auto& p : levels[d - 1]) inside = inside || p.contains(lv[i]);
                if (!inside) throw MeasureError("level " + std::to_string(d) + " is not nested in the previous one");
            }
        }
    }
    if (masses.size() != levels.back().size()) throw MeasureError("one mass per deepest interval required");
    Rat total = 0;
    for (const Rat& w : masses) {
        if (w <= 0) throw MeasureError("masses must be positive");
        total += w;
    }
    if (total != 1) throw MeasureError("masses sum to " + str(total));
    MeasureRep m;
    m.kind = Kind::cantor;
    m.levels = std::move(levels);
    m.masses = std::move(masses);
    return m;
}

MeasureRep MeasureRep::mixture(std::vector<WeightedMeasure> parts) {
    if (parts.empty()) throw MeasureError("empty mixture");
    Rat total = 0;
    for (const auto& p : parts) {
        if (p.weight <= 0) throw MeasureError("mixture weights must be positive");
        total += p.weight;
    }
    if (total != 1) throw MeasureError("mixture weights sum to " + str(total));
    MeasureRep m;
    m.kind = Kind::mixture;
    m.parts = std::move(parts);
    return m;
}

MeasureRep MeasureRep::pushforward(PAMap f, MeasureRep base) {
    for (std::size_t i = 0; i < f.pieces(); ++i)
        if (f.slope(i) == 0) throw MeasureError("pushforward by a map with a flat piece creates atoms");
    if (base.has_atoms()) throw MeasureError("pushforward base must be non-atomic");
    MeasureRep m;
    m.kind = Kind::pushforward;
    m.map = std::move(f);
    m.base = std::make_shared<const MeasureRep>(std::move(base));
    return m;
}

bool MeasureRep::has_atoms() const {
    if (kind == Kind::atomic) return true;
    if (kind == Kind::mixture)
        for (const auto& p : parts)
            if (p.measure.has_atoms()) return true;
    return false;
}

bool MeasureRep::depth_limited() const {
    switch (kind) {
        case Kind::cantor: return true;
        case Kind::mixture:
            for (const auto& p : parts)
                if (p.measure.depth_limited()) return true;
            return false;
        case Kind::pushforward: return base->depth_limited();
        default: return false;
    }
}

Rat mass(const MeasureRep& mu, const Rat& a, const Rat& b, bool closed_lo, bool closed_hi) {
    Rat lo = a, hi = b;
    if (lo < 0) {
        lo = 0;
        closed_lo = true;
    }
    if (hi > 1) {
        hi = 1;
        closed_hi = true;
    }
    if (lo > hi || (lo == hi && !(closed_lo && closed_hi))) return 0;
    switch (mu.kind) {
        case Kind::lebesgue: return hi - lo;
        case Kind::pa_density: return (*mu.cdf)(hi) - (*mu.cdf)(lo);
        case Kind::atomic: {
            Rat s = 0;
            for (const auto& [p, w] : mu.atoms) {
                bool in = (closed_lo ? p >= lo : p > lo) && (closed_hi ? p <= hi : p < hi);
                if (in) s += w;
            }
            return s;
        }
        case Kind::cantor: {
            Rat s = 0;
            const auto& deep = mu.levels.back();
            for (std::size_t j = 0; j < deep.size(); ++j) {
                Rat o = overlap(deep[j], lo, hi);
                if (o > 0) s += mu.masses[j] * o / deep[j].length();
            }
            return s;
        }
        case Kind::mixture: {
            Rat s = 0;
            for (const auto& p : mu.parts) s += p.weight * mass(p.measure, lo, hi, closed_lo, closed_hi);
            return s;
        }
        case Kind::pushforward: {
            // the base has no atoms and the map no flat pieces, so closedness is irrelevant
            const PAMap& f = *mu.map;
            Rat s = 0;
            for (std::size_t i = 0; i < f.pieces(); ++i) {
                const Rat& x0 = f.xs()[i];
                const Rat& y0 = f.ys()[i];
                const Rat& y1 = f.ys()[i + 1];
                Rat yl = std::max(lo, std::min(y0, y1)), yh = std::min(hi, std::max(y0, y1));
                if (yl > yh) continue;
                Rat sl = f.slope(i);
                Rat t1 = x0 + (yl - y0) / sl, t2 = x0 + (yh - y0) / sl;
                if (t2 < t1) std::swap(t1, t2);
                s += mass(*mu.base, t1, t2);
            }
            return s;
        }
    }
    return 0;
}

std::vector<Rat> breakpoints(const MeasureRep& mu) {
    std::vector<Rat> out;
    switch (mu.kind) {
        case Kind::lebesgue: break;
        case Kind::pa_density: out.assign(mu.cdf->xs().begin(), mu.cdf->xs().end()); break;
        case Kind::atomic:
            for (const auto& a : mu.atoms) out.push_back(a.first);
            break;
        case Kind::cantor:
            for (const auto& j : mu.levels.back()) {
                out.push_back(j.lo);
                out.push_back(j.hi);
            }
            break;
        case Kind::mixture:
            for (const auto& p : mu.parts) {
                auto b = breakpoints(p.measure);
                out.insert(out.end(), b.begin(), b.end());
            }
            break;
        case Kind::pushforward: {
            const PAMap& f = *mu.map;
            std::vector<Rat> xs(f.xs().begin(), f.xs().end());
            auto b = breakpoints(*mu.base);
            xs.insert(xs.end(), b.begin(), b.end());
            for (const Rat& x : xs) out.push_back(f(x));
            break;
        }
    }
    sort_unique(out);
    return out;
}

PAMap distribution(const MeasureRep& mu) {
    if (mu.has_atoms()) throw MeasureError("measure has atoms; its distribution is not continuous");
    std::vector<Rat> xs = breakpoints(mu);
    xs.push_back(0);
    xs.push_back(1);
    sort_unique(xs);
    std::vector<Rat> ys;
    ys.reserve(xs.size());
    for (const Rat& x : xs) ys.push_back(mass(mu, 0, x));
    ys.front() = 0;
    return PAMap(std::move(xs), std::move(ys));
}

Json measure_to_json(const MeasureRep& mu) {
    Json j;
    switch (mu.kind) {
        case Kind::lebesgue: j["type"] = "lebesgue"; break;
        case Kind::pa_density:
            j["type"] = "pa_density";
            j["cdf"] = map_to_json(*mu.cdf);
            break;
        case Kind::atomic:
            j["type"] = "atomic";
            j["atoms"] = Json::array();
            for (const auto& [p, w] : mu.atoms) j["atoms"].push_back({rat_to_json(p), rat_to_json(w)});
            break;
        case Kind::cantor:
            j["type"] = "cantor";
            j["levels"] = Json::array();
            for (const auto& lv : mu.levels) {
                Json l = Json::array();
                for (const auto& iv : lv) l.push_back({rat_to_json(iv.lo), rat_to_json(iv.hi)});
                j["levels"].push_back(l);
            }
            j["masses"] = rats_to_json(mu.masses);
            break;
        case Kind::mixture:
            j["type"] = "mixture";
            j["parts"] = Json::array();
            for (const auto& p : mu.parts)
                j["parts"].push_back({{"weight", rat_to_json(p.weight)}, {"measure", measure_to_json(p.measure)}});
            break;
        case Kind::pushforward:
            j["type"] = "pushforward";
            j["map"] = map_to_json(*mu.map);
            j["base"] = measure_to_json(*mu.base);
            break;
    }
    return j;
}

MeasureRep measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("type")) throw MeasureError("measure JSON needs a \"type\"");
    const std::string t = j.at("type").get<std::string>();
    try {
        if (t == "lebesgue") return MeasureRep::lebesgue();
        if (t == "pa_density") return MeasureRep::pa_density(map_from_json(j.at("cdf")));
        if (t == "atomic") {
            std::vector<std::pair<Rat, Rat>> atoms;
            for (const auto& a : j.at("atoms")) atoms.push_back({rat_from_json(a.at(0)), rat_from_json(a.at(1))});
            return MeasureRep::atomic(std::move(atoms));
        }
        if (t == "cantor") {
            std::vector<std::vector<IntervalQ>> levels;
            for (const auto& lv : j.at("levels")) {
                std::vector<IntervalQ> l;
                for (const auto& iv : lv) l.push_back({rat_from_json(iv.at(0)), rat_from_json(iv.at(1))});
                levels.push_back(std::move(l));
            }
            return MeasureRep::cantor(std::move(levels), rats_from_json(j.at("masses")));
        }
        if (t == "mixture") {
            std::vector<WeightedMeasure> parts;
            for (const auto& p : j.at("parts"))
                parts.push_back({rat_from_json(p.at("weight")), measure_from_json(p.at("measure"))});
            return MeasureRep::mixture(std::move(parts));
        }
        if (t == "pushforward") return MeasureRep::pushforward(map_from_json(j.at("map")), measure_from_json(j.at("base")));
    } catch (const Json::exception& e) {
        throw MeasureError(std::string("malformed measure JSON: ") + e.what());
    }
    throw MeasureError("unknown measure type \"" + t + "\"");
}

MeasureRep co_measure(const PAMap& f, const Rat& x, unsigned k) {
    if (k == 0) throw DomainError("k must be positive");
    std::vector<Rat> pts = orbit(f, x, k);
    Rat back = f(pts.back());
    if (back != x) throw PreconditionError("x is not in Fix(f," + std::to_string(k) + "): f^k(x) - x = " + str(back - x));
    std::vector<std::pair<Rat, Rat>> atoms;
    for (const Rat& p : pts) atoms.push_back({p, Rat(1) / Rat(static_cast<unsigned long>(k))});
    return MeasureRep::atomic(std::move(atoms));
}

namespace {

// mu atomic: the supremum over Borel A is attained on subsets of the atoms.
// Neighbourhoods of consecutive chosen atoms are merged as a union.
Rat defect_atomic(const MeasureRep& mu, const MeasureRep& nu, const Rat& eps) {
    const auto& a = mu.atoms;
    std::vector<Rat> best(a.size());
    Rat out = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const Rat& t = a[j].first;
        best[j] = a[j].second - mass(nu, t - eps, t + eps, false, false);
        for (std::size_t i = 0; i < j; ++i) {
            const Rat& s = a[i].first;
            Rat added = t - eps < s + eps ? mass(nu, s + eps, t + eps, true, false) : mass(nu, t - eps, t + eps, false, false);
            best[j] = std::max(best[j], Rat(best[i] + a[j].second - added));
        }
        out = std::max(out, best[j]);
    }
    return out;
}

// mu without atoms: A ranges over finite unions of closed intervals with
// endpoints on the grid.  Between grid points mu(A) and nu(B(A,eps)) are
// affine in each endpoint, and components closer than 2 eps can be merged
// without growing B(A,eps), so an optimal A has its endpoints on the grid.
Rat defect_grid(const MeasureRep& mu, const MeasureRep& nu, const Rat& eps) {
    std::vector<Rat> g = breakpoints(mu);
    std::vector<Rat> nb = breakpoints(nu);
    nb.push_back(0);
    nb.push_back(1);
    for (const Rat& b : nb) {
        g.push_back(b - eps);
        g.push_back(b + eps);
    }
    g.push_back(0);
    g.push_back(1);
    std::vector<Rat> grid;
    for (const Rat& x : g)
        if (x >= 0 && x <= 1) grid.push_back(x);
    sort_unique(grid);
    const std::size_t n = grid.size();
    std::vector<Rat> best(n);
    std::vector<bool> have(n, false);
    Rat out = 0;
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p <= q; ++p) {
            Rat gain = mass(mu, grid[p], grid[q]);
            Rat v = gain - mass(nu, grid[p] - eps, grid[q] + eps, false, false);
            for (std::size_t j = 0; j < p; ++j) {
                if (!have[j]) continue;
                Rat start = grid[j] + eps;
                Rat added = grid[p] - eps < start ? mass(nu, start, grid[q] + eps, true, false)
                                                  : mass(nu, grid[p] - eps, grid[q] + eps, false, false);
                v = std::max(v, Rat(best[j] + gain - added));
            }
            if (!have[q] || v > best[q]) {
                best[q] = v;
                have[q] = true;
            }
            out = std::max(out, v);
        }
    return out;
}

}  // namespace

Rat prohorov_defect(const MeasureRep& mu, const MeasureRep& nu, const Rat& eps) {
    if (mu.is_atomic()) return defect_atomic(mu, nu, eps);
    if (mu.has_atoms()) throw MeasureError("mixed atomic/continuous measures are not supported as the first argument");
    return defect_grid(mu, nu, eps);
}

ProhorovEnclosure prohorov(const MeasureRep& mu, const MeasureRep& nu, const Rat& tol) {
    if (tol <= 0) throw DomainError("tol must be positive");
    if (measure_to_json(mu) == measure_to_json(nu)) return {0, 0, "identical"};
    // D is symmetric; put an atomic measure first when there is one
    const bool swap = !mu.is_atomic() && nu.is_atomic();
    const MeasureRep& a = swap ? nu : mu;
    const MeasureRep& b = swap ? mu : nu;
    if (a.has_atoms() && !a.is_atomic()) throw MeasureError("mixed atomic/continuous measures are not supported");
    ProhorovEnclosure e{0, 1, a.is_atomic() ? "atom subsets" : "grid unions"};
    while (e.hi - e.lo > tol) {
        Rat mid = (e.lo + e.hi) / 2;
        if (prohorov_defect(a, b, mid) <= mid)
            e.hi = mid;
        else
            e.lo = mid;
    }
    return e;
}

Homeo homeo_from_map(const PAMap& forward) {
    if (forward.ys().front() != 0 || forward.ys().back() != 1 || !strictly_increasing(forward))
        throw MeasureError("homeomorphism must be strictly increasing from 0 to 1");
    Homeo h;
    h.forward = forward;
    h.inverse = PAMap(forward.ys(), forward.xs());
    return h;
}

Homeo cdf_homeo(const MeasureRep& nu) {
    if (nu.has_atoms()) throw MeasureError("measure has atoms; its distribution is not injective");
    PAMap F = distribution(nu);
    if (!strictly_increasing(F)) {
        for (std::size_t i = 0; i < F.pieces(); ++i)
            if (F.slope(i) == 0)
                throw MeasureError("measure has no mass on [" + str(F.xs()[i]) + ", " + str(F.xs()[i + 1]) +
                                   "]; its distribution is not a homeomorphism");
    }
    Homeo h = homeo_from_map(F);
    h.approximate = nu.depth_limited();
    return h;
}

Json homeo_to_json(const Homeo& h) {
    return {{"forward", map_to_json(h.forward)}, {"inverse", map_to_json(h.inverse)}, {"approximate", h.approximate}};
}

Homeo homeo_from_json(const Json& j) {
    Json f = j.contains("forward") ? j.at("forward") : j;
    Homeo h = homeo_from_map(map_from_json(f));
    if (j.contains("inverse") && map_from_json(j.at("inverse")) != h.inverse)
        throw MeasureError("stored inverse does not invert the forward map");
    if (j.contains("approximate")) h.approximate = j.at("approximate").get<bool>();
    return h;
}

PAMap conjugate(const PAMap& f, const Homeo& h) { return compose(h.forward, compose(f, h.inverse)); }

bool preserves(const PAMap& f, const MeasureRep& nu) {
    if (nu.kind == Kind::lebesgue) return verify_lebesgue(f).ok;
    return verify_lebesgue(conjugate(f, cdf_homeo(nu))).ok;
}

namespace {

std::vector<IntervalQ> monotone_laps(const PAMap& fk, const IntervalQ& j) {
    Pwl r = fk.pwl().restrict(j.lo, j.hi);
    std::vector<IntervalQ> laps;
    Rat start = r.xs().front();
    for (std::size_t i = 1; i < r.pieces(); ++i)
        if (sgn(r.slope(i)) != sgn(r.slope(i - 1))) {
            laps.push_back({start, r.xs()[i]});
            start = r.xs()[i];
        }
    laps.push_back({start, r.xs().back()});
    return laps;
}

bool disjoint(const IntervalQ& a, const IntervalQ& b) { return a.hi < b.lo || b.hi < a.lo; }

struct Horseshoe {
    IntervalQ j;
    std::vector<IntervalQ> images;    // f^i(J)
    std::vector<IntervalQ> branches;  // f^k maps each exactly onto J
};

std::optional<Horseshoe> try_horseshoe(const PAMap& f, const PAMap& fk, const Rat& x, unsigned k, const Rat& eps,
                                       const Rat& r) {
    Horseshoe h;
    h.j = {std::max(Rat(0), Rat(x - r)), std::min(Rat(1), Rat(x + r))};
    IntervalQ img = h.j;
    for (unsigned i = 0; i < k; ++i) {
        if (img.length() >= eps) return std::nullopt;
        for (const auto& prev : h.images)
            if (!disjoint(prev, img)) return std::nullopt;
        h.images.push_back(img);
        img = f.image(img.lo, img.hi);
    }
    std::vector<IntervalQ> cover;
    std::optional<IntervalQ> own;
    for (const auto& lap : monotone_laps(fk, h.j)) {
        if (!fk.image(lap.lo, lap.hi).contains(h.j)) continue;
        IntervalQ b = onto_subinterval(fk, lap, h.j);
        if (b.contains(x) && !own) own = b;
        cover.push_back(b);
    }
    if (!own) return std::nullopt;
    h.branches.push_back(*own);
    for (const auto& b : cover) {
        bool ok = true;
        for (const auto& s : h.branches) ok = ok && disjoint(s, b);
        if (ok) h.branches.push_back(b);
    }
    if (h.branches.size() < 2) return std::nullopt;
    std::sort(h.branches.begin(), h.branches.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
    return h;
}

}  // namespace

CantorSmoothing cantor_smooth(const PAMap& f, const Rat& x, unsigned k, const Rat& eps, unsigned depth) {
    if (k == 0 || depth == 0) throw DomainError("k and depth must be positive");
    if (eps <= 0) throw DomainError("eps must be positive");
    if (x < 0 || x > 1) throw DomainError("x outside [0,1]");
    {
        std::vector<Rat> orb = orbit(f, x, k + 1);
        if (orb[k] != x) throw PreconditionError("x is not in Fix(f," + std::to_string(k) + ")");
        for (unsigned d = 1; d < k; ++d)
            if (orb[d] == x) throw PreconditionError("x has least period " + std::to_string(d) + ", not " + std::to_string(k));
    }
    PAMap fk = iterate(f, k);
    // radii: powers of 1/2 below eps/2, and the distances from x to nearby
    // nodes of f^k (those fit J to a window exactly)
    std::vector<Rat> radii;
    Rat r = pow2_at_most(eps / 2);
    if (r == eps / 2) r /= 2;
    for (int t = 0; t < 64; ++t, r /= 2) radii.push_back(r);
    for (const Rat& n : fk.xs()) {
        Rat d = rabs(n - x);
        if (d > 0 && d < eps / 2) radii.push_back(d);
    }
    sort_unique(radii);
    std::optional<Horseshoe> hs;
    for (auto it = radii.rbegin(); it != radii.rend() && !hs; ++it) hs = try_horseshoe(f, fk, x, k, eps, *it);
    if (!hs)
        throw ConstructionError("no nested period-" + std::to_string(k) + " branch family around " + str(x) +
                                " (need two disjoint branches of f^k covering a small interval)");
    Int count = 1;
    for (unsigned d = 1; d < depth; ++d) count *= static_cast<unsigned long>(hs->branches.size());
    if (count > Int(100000)) throw ResourceError("nested system would hold " + count.get_str() + " intervals");

    CantorSmoothing out;
    out.orbit_images = hs->images;
    out.system.push_back({hs->j});
    if (depth > 1) out.system.push_back(hs->branches);
    for (unsigned d = 2; d < depth; ++d) {
        std::vector<IntervalQ> next;
        for (const auto& b : hs->branches)
            for (const auto& l : out.system.back()) next.push_back(onto_subinterval(fk, b, l));
        std::sort(next.begin(), next.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
        out.system.push_back(std::move(next));
    }
    const std::size_t deep = out.system.back().size();
    std::vector<Rat> masses(deep, Rat(1) / Rat(static_cast<unsigned long>(deep)));
    out.nu_hat = MeasureRep::cantor(out.system, masses);
    if (k == 1) {
        out.nu = out.nu_hat;
    } else {
        std::vector<WeightedMeasure> parts;
        Rat w = Rat(1) / Rat(static_cast<unsigned long>(k));
        parts.push_back({w, out.nu_hat});
        PAMap fi = f;
        for (unsigned i = 1; i < k; ++i) {
            parts.push_back({w, MeasureRep::pushforward(fi, out.nu_hat)});
            fi = compose(f, fi);
        }
        out.nu = MeasureRep::mixture(std::move(parts));
    }

    ClauseResult disj{"orbit-images-disjoint"}, diam{"orbit-images-small"}, nest{"nested"}, lvl{"level-disjoint"},
        cov{"branch-covering"}, hasx{"contains-x"}, cert{"ball-mass"};
    for (std::size_t i = 0; i < out.orbit_images.size(); ++i) {
        if (out.orbit_images[i].length() >= eps) diam.ok = false;
        for (std::size_t j = 0; j < i; ++j)
            if (!disjoint(out.orbit_images[i], out.orbit_images[j])) disj.ok = false;
    }
    for (std::size_t d = 0; d < out.system.size(); ++d) {
        const auto& lv = out.system[d];
        bool xin = false;
        for (std::size_t i = 0; i < lv.size(); ++i) {
            xin = xin || lv[i].contains(x);
            if (i > 0 && !(lv[i - 1].hi < lv[i].lo)) lvl.ok = false;
            if (d > 0) {
                bool in = false;
                for (const auto& p : out.system[d - 1]) in = in || p.contains(lv[i]);
                if (!in) nest.ok = false;
            }
        }
        if (!xin) {
            hasx.ok = false;
            hasx.detail = "level " + std::to_string(d);
        }
    }
    for (const auto& b : hs->branches)
        if (fk.image(b.lo, b.hi) != hs->j) cov.ok = false;
    Rat y = x;
    Rat need = Rat(1) / Rat(static_cast<unsigned long>(k));
    for (unsigned i = 0; i < k; ++i, y = f(y)) {
        Rat m = mass(out.nu, y - eps, y + eps, false, false);
        if (m < need) {
            cert.ok = false;
            cert.detail = "nu(B(f^" + std::to_string(i) + "(x), eps)) = " + str(m);
        }
    }
    if (cert.ok) cert.detail = "every ball holds at least 1/" + std::to_string(k);
    out.certificate = {disj, diam, nest, lvl, cov, hasx, cert};
    return out;
}

DemoReport full_measure_demo(const PAMap& f, unsigned K, const std::vector<Rat>& eps_schedule, unsigned depth,
                             const Rat& cantor_eps) {
    if (K == 0) throw DomainError("K must be positive");
    DemoReport rep;
    std::vector<WeightedMeasure> eta_parts;
    Rat tail = Rat(1) / Rat(Int(1) << K);
    rep.truncated_tail = tail;
    for (unsigned k = 1; k <= K; ++k) {
        std::optional<CantorSmoothing> cs;
        Rat chosen;
        std::string last;
        for (const auto& p : per_points(f, k)) {
            if (!p.is_point()) continue;
            try {
                cs = cantor_smooth(f, p.x(), k, cantor_eps, depth);
                chosen = p.x();
                break;
            } catch (const ConstructionError& e) {
                last = e.what();
            }
        }
        if (!cs) throw ConstructionError("period " + std::to_string(k) + ": no Cantor smoothing (" + last + ")");
        Rat w = (Rat(1) / Rat(Int(1) << k)) / (1 - tail);
        rep.carriers.push_back({k, chosen, w, cs->orbit_images});
        eta_parts.push_back({w, cs->nu});
    }
    MeasureRep eta = MeasureRep::mixture(std::move(eta_parts));
    for (const Rat& e : eps_schedule) {
        if (e < 0 || e >= 1) throw DomainError("schedule entries must lie in [0,1)");
        DemoRow row;
        row.eps = e;
        Homeo h;
        std::optional<MeasureRep> nu;
        if (e > 0) {
            nu = MeasureRep::mixture({{e, eta}, {1 - e, MeasureRep::lebesgue()}});
            h = cdf_homeo(*nu);
        }
        row.approximate = h.approximate;
        PAMap g = e > 0 ? conjugate(f, h) : f;
        row.rho = uniform_distance(g, f);
        row.lebesgue = verify_lebesgue(g).ok;
        for (const auto& c : rep.carriers) {
            Rat lam = 0, direct = 0;
            for (const auto& iv : c.carrier) {
                lam += h.forward(iv.hi) - h.forward(iv.lo);
                direct += nu ? mass(*nu, iv.lo, iv.hi) : iv.length();
            }
            row.carrier_mass.push_back(lam);
            row.lower_bound.push_back(e * c.weight);
            if (lam != direct) row.interval_identity = false;
        }
        rep.rows.push_back(std::move(row));
    }
    std::vector<const DemoRow*> sorted;
    for (const auto& r : rep.rows) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const DemoRow* a, const DemoRow* b) { return a->eps < b->eps; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i]->rho < sorted[i - 1]->rho) rep.rho_monotone = false;
    rep.flags.push_back("Cantor components are depth-" + std::to_string(depth) + " surrogates");
    rep.flags.push_back("periods above " + std::to_string(K) + " dropped (mass " + str(tail) + "), weights renormalized");
    for (const auto& r : rep.rows)
        if (!r.lebesgue) {
            rep.flags.push_back("some g_eps are not exactly lambda-preserving at this depth");
            break;
        }
    return rep;
}

Json demo_to_json(const DemoReport& r) {
    Json j;
    j["truncated_tail"] = rat_to_json(r.truncated_tail);
    j["rho_monotone"] = r.rho_monotone;
    j["flags"] = r.flags;
    j["carriers"] = Json::array();
    for (const auto& c : r.carriers) {
        Json iv = Json::array();
        for (const auto& i : c.carrier) iv.push_back({rat_to_json(i.lo), rat_to_json(i.hi)});
        j["carriers"].push_back({{"k", c.k}, {"x", rat_to_json(c.x)}, {"weight", rat_to_json(c.weight)}, {"intervals", iv}});
    }
    j["rows"] = Json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{"eps", rat_to_json(row.eps)},
                             {"rho", rat_to_json(row.rho)},
                             {"lebesgue", row.lebesgue},
                             {"approximate", row.approximate},
                             {"identity", row.interval_identity},
                             {"carrier_mass", rats_to_json(row.carrier_mass)},
                             {"lower_bound", rats_to_json(row.lower_bound)}});
    return j;
}

}  // namespace pam
