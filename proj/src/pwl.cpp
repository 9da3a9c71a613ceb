#include "pam/pwl.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace pam {

std::size_t piece_cap() {
    static const std::size_t cap = [] {
        const char* env = std::getenv("PAMLAB_PIECE_CAP");
        if (!env || !*env) return std::size_t(10'000'000);
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || v == 0) return std::size_t(10'000'000);
        return std::size_t(v);
    }();
    return cap;
}

namespace {

// (x0,y0),(x1,y1),(x2,y2) on one line
bool collinear(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1, const Rat& x2,
               const Rat& y2) {
    return (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0);
}

}  // namespace

Pwl::Pwl(std::vector<Rat> xs, std::vector<Rat> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size()) throw InvariantError("breakpoints and values differ in length");
    if (xs_.size() < 2) throw InvariantError("need at least two nodes");
    for (std::size_t i = 1; i < xs_.size(); ++i)
        if (!(xs_[i - 1] < xs_[i])) throw InvariantError("breakpoints not strictly increasing at " + str(xs_[i]));
    canonicalize();
}

Pwl Pwl::affine(const Rat& x0, const Rat& x1, const Rat& y0, const Rat& y1) {
    return Pwl({x0, x1}, {y0, y1});
}

bool Pwl::is_canonical(const std::vector<Rat>& xs, const std::vector<Rat>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) return false;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i - 1] < xs[i])) return false;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i)
        if (collinear(xs[i - 1], ys[i - 1], xs[i], ys[i], xs[i + 1], ys[i + 1])) return false;
    return true;
}

void Pwl::canonicalize() {
    std::size_t w = 1;
    for (std::size_t r = 1; r < xs_.size(); ++r) {
        if (w >= 2 && collinear(xs_[w - 2], ys_[w - 2], xs_[w - 1], ys_[w - 1], xs_[r], ys_[r])) {
            xs_[w - 1].swap(xs_[r]);
            ys_[w - 1].swap(ys_[r]);
            continue;
        }
        if (w != r) {
            xs_[w].swap(xs_[r]);
            ys_[w].swap(ys_[r]);
        }
        ++w;
    }
    xs_.resize(w);
    ys_.resize(w);
}

std::size_t Pwl::piece_of(const Rat& x) const {
    if (x < xs_.front() || x > xs_.back())
        throw DomainError("point " + str(x) + " outside [" + str(lo()) + ", " + str(hi()) + "]");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = std::size_t(it - xs_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, pieces() - 1);
}

Rat Pwl::slope(std::size_t i) const { return (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]); }

Rat Pwl::operator()(const Rat& x) const {
    std::size_t i = piece_of(x);
    if (x == xs_[i]) return ys_[i];
    if (x == xs_[i + 1]) return ys_[i + 1];
    return ys_[i] + (ys_[i + 1] - ys_[i]) * (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
}

std::pair<Rat, Rat> Pwl::range() const {
    auto [mn, mx] = std::minmax_element(ys_.begin(), ys_.end());
    return {*mn, *mx};
}

IntervalQ Pwl::image(const Rat& a, const Rat& b) const {
    Rat fa = (*this)(a), fb = (*this)(b);
    IntervalQ r{std::min(fa, fb), std::max(fa, fb)};
    auto first = std::upper_bound(xs_.begin(), xs_.end(), a);
    for (auto it = first; it != xs_.end() && *it < b; ++it) {
        const Rat& y = ys_[std::size_t(it - xs_.begin())];
        if (y < r.lo) r.lo = y;
        if (y > r.hi) r.hi = y;
    }
    return r;
}

Pwl Pwl::restrict(const Rat& a, const Rat& b) const {
    if (!(a < b)) throw DomainError("restrict: empty interval");
    std::vector<Rat> xs{a}, ys{(*this)(a)};
    auto first = std::upper_bound(xs_.begin(), xs_.end(), a);
    for (auto it = first; it != xs_.end() && *it < b; ++it) {
        xs.push_back(*it);
        ys.push_back(ys_[std::size_t(it - xs_.begin())]);
    }
    xs.push_back(b);
    ys.push_back((*this)(b));
    return Pwl(std::move(xs), std::move(ys));
}

Pwl compose(const Pwl& f, const Pwl& g) {
    auto [gmin, gmax] = g.range();
    if (gmin < f.lo() || gmax > f.hi()) throw DomainError("compose: range of inner map leaves outer domain");
    const auto& fx = f.xs();
    const auto& fy = f.ys();
    const auto& gx = g.xs();
    const auto& gy = g.ys();
    std::vector<Rat> xs, ys;
    xs.reserve(gx.size());
    ys.reserve(gx.size());
    const std::size_t cap = piece_cap();
    for (std::size_t i = 0; i + 1 < gx.size(); ++i) {
        xs.push_back(gx[i]);
        ys.push_back(f(gy[i]));
        const Rat& y0 = gy[i];
        const Rat& y1 = gy[i + 1];
        if (y0 == y1) continue;
        Rat slope_inv = (gx[i + 1] - gx[i]) / (y1 - y0);
        if (y0 < y1) {
            auto b = std::upper_bound(fx.begin(), fx.end(), y0);
            auto e = std::lower_bound(fx.begin(), fx.end(), y1);
            for (auto it = b; it < e; ++it) {
                xs.push_back(gx[i] + (*it - y0) * slope_inv);
                ys.push_back(fy[std::size_t(it - fx.begin())]);
            }
        } else {
            auto b = std::upper_bound(fx.begin(), fx.end(), y1);
            auto e = std::lower_bound(fx.begin(), fx.end(), y0);
            for (auto it = e; it > b;) {
                --it;
                xs.push_back(gx[i] + (*it - y0) * slope_inv);
                ys.push_back(fy[std::size_t(it - fx.begin())]);
            }
        }
        if (xs.size() > cap + 1)
            throw ResourceError("piece count exceeds cap " + std::to_string(cap) + " (set PAMLAB_PIECE_CAP)");
    }
    xs.push_back(gx.back());
    ys.push_back(f(gy.back()));
    return Pwl(std::move(xs), std::move(ys));
}

Pwl join(const std::vector<Pwl>& parts) {
    if (parts.empty()) throw InvariantError("join: nothing to join");
    std::vector<Rat> xs(parts[0].xs()), ys(parts[0].ys());
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const Pwl& q = parts[p];
        if (q.lo() != xs.back()) throw InvariantError("join: domains are not adjacent");
        if (q.ys().front() != ys.back()) throw InvariantError("join: discontinuity at " + str(q.lo()));
        xs.insert(xs.end(), q.xs().begin() + 1, q.xs().end());
        ys.insert(ys.end(), q.ys().begin() + 1, q.ys().end());
    }
    return Pwl(std::move(xs), std::move(ys));
}

Rat sup_distance(const Pwl& f, const Pwl& g) {
    if (f.lo() != g.lo() || f.hi() != g.hi()) throw DomainError("sup_distance: different domains");
    std::vector<Rat> pts;
    pts.reserve(f.xs().size() + g.xs().size());
    std::merge(f.xs().begin(), f.xs().end(), g.xs().begin(), g.xs().end(), std::back_inserter(pts));
    Rat best(0);
    for (const Rat& x : pts) {
        Rat d = rabs(f(x) - g(x));
        if (d > best) best = d;
    }
    return best;
}

std::vector<Rat> preimages(const Pwl& f, const Rat& y) {
    std::vector<Rat> out;
    const auto& xs = f.xs();
    const auto& ys = f.ys();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const Rat& y0 = ys[i];
        const Rat& y1 = ys[i + 1];
        if (y0 == y1) {
            if (y0 == y) {
                out.push_back(xs[i]);
                out.push_back(xs[i + 1]);
            }
            continue;
        }
        if ((y0 <= y && y <= y1) || (y1 <= y && y <= y0))
            out.push_back(xs[i] + (y - y0) * (xs[i + 1] - xs[i]) / (y1 - y0));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Rat StepDensity::at(const Rat& y) const {
    if (cuts.empty() || y < cuts.front() || y > cuts.back()) return Rat(0);
    auto it = std::upper_bound(cuts.begin(), cuts.end(), y);
    std::size_t c = std::size_t(it - cuts.begin());
    if (c == 0 || c > sums.size()) return Rat(0);
    return sums[c - 1];
}

StepDensity branch_density(const Pwl& f) {
    StepDensity d;
    d.cuts = f.ys();
    std::sort(d.cuts.begin(), d.cuts.end());
    d.cuts.erase(std::unique(d.cuts.begin(), d.cuts.end()), d.cuts.end());
    if (d.cuts.size() < 2) throw FlatPieceError("constant map");
    std::vector<Rat> diff(d.cuts.size());
    for (std::size_t i = 0; i < f.pieces(); ++i) {
        const Rat& y0 = f.ys()[i];
        const Rat& y1 = f.ys()[i + 1];
        if (y0 == y1) throw FlatPieceError("zero slope on [" + str(f.xs()[i]) + ", " + str(f.xs()[i + 1]) + "]");
        Rat w = rabs((f.xs()[i + 1] - f.xs()[i]) / (y1 - y0));
        const Rat& lo = y0 < y1 ? y0 : y1;
        const Rat& hi = y0 < y1 ? y1 : y0;
        auto a = std::size_t(std::lower_bound(d.cuts.begin(), d.cuts.end(), lo) - d.cuts.begin());
        auto b = std::size_t(std::lower_bound(d.cuts.begin(), d.cuts.end(), hi) - d.cuts.begin());
        diff[a] += w;
        diff[b] -= w;
    }
    d.sums.resize(d.cuts.size() - 1);
    Rat acc(0);
    for (std::size_t c = 0; c + 1 < d.cuts.size(); ++c) {
        acc += diff[c];
        d.sums[c] = acc;
    }
    return d;
}

EquivalenceCheck lambda_equivalent(const Pwl& f, const Pwl& g) {
    StepDensity df = branch_density(f), dg = branch_density(g);
    std::vector<Rat> cuts;
    std::merge(df.cuts.begin(), df.cuts.end(), dg.cuts.begin(), dg.cuts.end(), std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    EquivalenceCheck r;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        Rat mid = (cuts[c] + cuts[c + 1]) / 2;
        Rat a = df.at(mid), b = dg.at(mid);
        if (a != b) {
            r.ok = false;
            r.cell = {cuts[c], cuts[c + 1]};
            r.lhs = a;
            r.rhs = b;
            return r;
        }
    }
    return r;
}

}  // namespace pam
