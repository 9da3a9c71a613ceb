#include <gtest/gtest.h>

#include "pam/circle.hpp"
#include "support.hpp"

using namespace pam;

namespace {

LiftPAMap doubling() { return LiftPAMap::linear(2); }

Rat lift_power(const LiftPAMap& f, Rat x, unsigned k) {
    for (unsigned i = 0; i < k; ++i) x = f(x);
    return x;
}

// Sign chase on a uniform grid: on each grid cell where x -> F^k(x) - x is
// monotone, the integers strictly crossed plus exact integer hits at grid
// points count the solutions.  Exact for lifts whose iterate is affine
// between grid points.
std::size_t grid_fix_count(const LiftPAMap& f, unsigned k, unsigned n) {
    std::size_t count = 0;
    Rat prev = lift_power(f, Rat(0), k);
    for (unsigned j = 0; j < n; ++j) {
        Rat x0 = make_rat(j, n), x1 = make_rat(j + 1, n);
        Rat d0 = prev - x0;
        Rat y1 = lift_power(f, x1, k);
        Rat d1 = y1 - x1;
        prev = y1;
        if (d0.get_den() == 1) ++count;  // hit at x0
        Rat lo = std::min(d0, d1), hi = std::max(d0, d1);
        // integers in the open interval (lo, hi)
        Int a = floor_int(lo) + 1;
        Int b = -floor_int(Rat(-hi)) - 1;
        if (b >= a) count += Int(b - a + 1).get_ui();
    }
    return count;
}

// lambda of the preimage of [c,d] mod 1, piece by piece over translates
Rat circle_preimage(const LiftPAMap& f, const Rat& c, const Rat& d) {
    const Pwl& p = f.base();
    Rat total = 0;
    for (std::size_t i = 0; i < p.pieces(); ++i) {
        Rat y0 = p.ys()[i], y1 = p.ys()[i + 1];
        Rat lo = std::min(y0, y1), hi = std::max(y0, y1);
        Rat w = (p.xs()[i + 1] - p.xs()[i]) / (hi - lo);
        for (Int n = floor_int(lo) - 1; n <= hi; ++n) {
            Rat a = std::max(lo, Rat(c + n)), b = std::min(hi, Rat(d + n));
            if (a < b) total += (b - a) * w;
        }
    }
    return total;
}

LiftPAMap random_lift(pamtest::Rng& r, long degree) {
    for (;;) {
        std::vector<Rat> xs{Rat(0)};
        while (xs.size() < 4) {
            Rat x = r.dyadic(5);
            if (x > 0 && x < 1 && std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
        }
        std::sort(xs.begin(), xs.end());
        xs.push_back(1);
        std::vector<Rat> ys;
        Rat y0 = r.dyadic(4);
        ys.push_back(y0);
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) ys.push_back(Rat(2 * r.dyadic(5) - 1 + xs[i] * degree));
        ys.push_back(y0 + degree);
        bool good = true;
        for (std::size_t i = 0; i + 1 < ys.size(); ++i) good = good && ys[i] != ys[i + 1];
        for (std::size_t i = 1; i + 1 < xs.size(); ++i)
            good = good && (ys[i] - ys[i - 1]) * (xs[i + 1] - xs[i]) != (ys[i + 1] - ys[i]) * (xs[i] - xs[i - 1]);
        if (good) return LiftPAMap(xs, ys, degree);
    }
}

// Compositions of rotations, linear lifts and the tent as a degree-0 map.
LiftPAMap random_mp_lift(pamtest::Rng& r) {
    LiftPAMap tent(PAMap::tent().pwl(), 0);
    LiftPAMap f = LiftPAMap::rotation(r.dyadic(5));
    for (int i = 0; i < 2; ++i) {
        switch (r.below(4)) {
            case 0: f = lift_compose(LiftPAMap::linear(r.below(2) ? 2 : -3), f); break;
            case 1: f = lift_compose(tent, f); break;
            case 2: f = lift_compose(f, LiftPAMap::linear(3)); break;
            default: f = lift_compose(LiftPAMap::rotation(r.dyadic(6)), f); break;
        }
    }
    return f;
}

}  // namespace

TEST(Lift, Construction) {
    EXPECT_THROW(LiftPAMap({Rat(0), Rat(1)}, {Rat(0), Rat(3, 2)}, 1), ContinuityError);
    LiftPAMap f = doubling();
    EXPECT_EQ(f(Rat(7, 4)), Rat(7, 2));
    EXPECT_EQ(f(Rat(-1, 4)), Rat(-1, 2));
    LiftPAMap back = lift_from_json(lift_to_json(f));
    EXPECT_EQ(back, f);
    EXPECT_EQ(lift_to_json(f)["degree"], 2);
    EXPECT_THROW(lift_from_json(Json{{"breakpoints", {"0", "1"}}, {"values", {"0", "1"}}}), InputError);
}

TEST(Lift, ComposeMatchesPointwise) {
    pamtest::Rng r(5);
    for (int t = 0; t < 20; ++t) {
        LiftPAMap f = random_lift(r, static_cast<long>(r.below(5)) - 2);
        LiftPAMap g = random_lift(r, static_cast<long>(r.below(5)) - 2);
        LiftPAMap h = lift_compose(f, g);
        EXPECT_EQ(h.degree(), f.degree() * g.degree());
        for (int s = 0; s < 10; ++s) {
            Rat x = r.dyadic(7) * 3 - 1;
            EXPECT_EQ(h(x), f(g(x)));
        }
    }
}

TEST(CircleLebesgue, Examples) {
    EXPECT_TRUE(circle_verify_lebesgue(doubling()).ok);
    EXPECT_TRUE(circle_verify_lebesgue(LiftPAMap::rotation(Rat(1, 3))).ok);
    // x^2-shaped distortion of degree 1
    LebesgueCheck c = circle_verify_lebesgue(LiftPAMap({Rat(0), Rat(1, 2), Rat(1)}, {Rat(0), Rat(1, 4), Rat(1)}, 1));
    EXPECT_FALSE(c.ok);
    EXPECT_EQ(c.cell, (IntervalQ{Rat(0), Rat(1, 4)}));
    EXPECT_EQ(c.sum, 2);
    EXPECT_THROW(circle_verify_lebesgue(LiftPAMap({Rat(0), Rat(1, 2), Rat(1)}, {Rat(0), Rat(0), Rat(1)}, 1)),
                 FlatPieceError);
}

TEST(CircleLebesgue, AgreesWithPreimageMeasure) {
    pamtest::Rng r(12);
    int mp = 0;
    for (int t = 0; t < 60; ++t) {
        LiftPAMap f = t % 2 ? random_mp_lift(r) : random_lift(r, static_cast<long>(r.below(3)));
        LebesgueCheck c = circle_verify_lebesgue(f);
        if (c.ok) {
            ++mp;
            for (int s = 0; s < 20; ++s) {
                Rat a = r.dyadic(8), b = r.dyadic(8);
                if (b < a) std::swap(a, b);
                EXPECT_EQ(circle_preimage(f, a, b), b - a);
            }
        } else {
            EXPECT_NE(circle_preimage(f, c.cell.lo, c.cell.hi), c.cell.length());
        }
    }
    EXPECT_GE(mp, 30);
}

TEST(CircleLebesgue, RotationConjugacyInvariant) {
    pamtest::Rng r(17);
    for (int t = 0; t < 40; ++t) {
        LiftPAMap f = t % 2 ? random_mp_lift(r) : random_lift(r, static_cast<long>(r.below(4)) - 1);
        Rat a = r.dyadic(6) * 2 - 1;
        LiftPAMap g = rotate_conjugate(f, a);
        EXPECT_EQ(g.degree(), f.degree());
        EXPECT_EQ(g(Rat(1, 3)), f(Rat(1, 3) - a) + a);
        EXPECT_EQ(circle_verify_lebesgue(g).ok, circle_verify_lebesgue(f).ok);
        EXPECT_EQ(rotate_conjugate(g, -a), f);
    }
}

TEST(CircleFix, DoublingFixedPoint) {
    auto pts = circle_fix(doubling(), 1);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].x(), 0);
    EXPECT_EQ(pts[0].translate, 0);
}

TEST(CircleFix, DoublingCounts) {
    for (unsigned k = 1; k <= 10; ++k) {
        auto pts = circle_fix(doubling(), k);
        EXPECT_EQ(pts.size(), (std::size_t(1) << k) - 1) << k;
        EXPECT_EQ(grid_fix_count(doubling(), k, 4u << k), pts.size()) << k;
    }
}

TEST(CircleFix, LinearDegreeCounts) {
    for (long d : {2L, 3L, -2L, -3L})
        for (unsigned k = 1; k <= 8; ++k) {
            LiftPAMap f = LiftPAMap::linear(d);
            auto pts = circle_fix(f, k);
            long dk = 1;
            for (unsigned i = 0; i < k; ++i) dk *= d;
            EXPECT_EQ(pts.size(), static_cast<std::size_t>(std::labs(dk - 1))) << d << " " << k;
            for (const auto& p : pts) {
                ASSERT_TRUE(p.is_point());
                EXPECT_EQ(lift_power(f, p.x(), k) - p.x(), Rat(p.translate));
                EXPECT_LT(p.x(), 1);
            }
        }
}

TEST(CircleFix, RandomLiftsSolutionsExact) {
    pamtest::Rng r(29);
    for (int t = 0; t < 20; ++t) {
        LiftPAMap f = random_lift(r, 2 + static_cast<long>(r.below(2)));
        for (unsigned k = 1; k <= 3; ++k) {
            auto pts = circle_fix(f, k);
            for (const auto& p : pts) {
                EXPECT_EQ(lift_power(f, p.x(), k) - p.x(), Rat(p.translate));
                EXPECT_EQ(k % p.least_period, 0u);
            }
            // every sign change on the grid is a solution, so the count is a lower bound
            bool points = std::all_of(pts.begin(), pts.end(), [](const CirclePoint& p) { return p.is_point(); });
            if (points) EXPECT_LE(grid_fix_count(f, k, 512), pts.size()) << t << " " << k;
        }
    }
}

TEST(CircleFix, RotationPlateau) {
    LiftPAMap f = LiftPAMap::rotation(Rat(1, 3));
    EXPECT_TRUE(circle_fix(f, 1).empty());
    EXPECT_TRUE(circle_fix(f, 2).empty());
    auto pts = circle_fix(f, 3);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].location, (IntervalQ{Rat(0), Rat(1)}));
    EXPECT_EQ(pts[0].translate, 1);
    EXPECT_EQ(pts[0].least_period, 3u);
}

TEST(CircleFix, RotationConjugacyShiftsPoints) {
    pamtest::Rng r(41);
    for (int t = 0; t < 10; ++t) {
        LiftPAMap f = random_lift(r, 2);
        Rat a = r.dyadic(6);
        LiftPAMap g = rotate_conjugate(f, a);
        for (unsigned k = 1; k <= 3; ++k) {
            auto pf = circle_fix(f, k), pg = circle_fix(g, k);
            ASSERT_EQ(pf.size(), pg.size());
            std::vector<Rat> shifted, got;
            for (const auto& p : pf) shifted.push_back(frac(Rat(p.x() + a)));
            for (const auto& p : pg) got.push_back(p.x());
            std::sort(shifted.begin(), shifted.end());
            EXPECT_EQ(shifted, got);
        }
    }
}

TEST(Invertibility, Examples) {
    EXPECT_TRUE(invertibility_test(LiftPAMap::rotation(Rat(1, 3))).invertible);
    LiftPAMap fold({Rat(0), Rat(1, 2), Rat(3, 4), Rat(1)}, {Rat(0), Rat(3, 4), Rat(1, 2), Rat(1)}, 1);
    Invertibility v = invertibility_test(fold);
    ASSERT_FALSE(v.invertible);
    EXPECT_NE(v.x, v.y);
    EXPECT_EQ(frac(fold(v.x)), frac(fold(v.y)));
    EXPECT_THROW(invertibility_test(doubling()), DomainError);
}

TEST(Invertibility, RandomFoldsHaveWitness) {
    pamtest::Rng r(53);
    for (int t = 0; t < 60; ++t) {
        LiftPAMap f = random_lift(r, 1);
        bool monotone = true;
        for (std::size_t i = 0; i < f.base().pieces(); ++i) monotone = monotone && f.base().slope(i) > 0;
        Invertibility v = invertibility_test(f);
        EXPECT_EQ(v.invertible, monotone);
        if (!v.invertible) {
            EXPECT_NE(v.x, v.y);
            EXPECT_EQ(frac(f(v.x)), frac(f(v.y)));
        }
    }
}

TEST(PeriodicSearch, Rotations) {
    auto s = has_periodic_point(LiftPAMap::rotation(Rat(1, 3)), 3);
    EXPECT_TRUE(s.found);
    EXPECT_EQ(s.k, 3u);
    LiftPAMap surrogate = LiftPAMap::rotation(frac(Rat(355, 113)));
    EXPECT_FALSE(has_periodic_point(surrogate, 112).found);
    EXPECT_EQ(has_periodic_point(surrogate, 113).k, 113u);
    // invertible rotations: periodic exactly at the denominator
    for (unsigned q = 1; q <= 12; ++q)
        for (unsigned p = 0; p < q; ++p) {
            Rat a(p, q);
            a.canonicalize();
            if (a.get_den() != q) continue;
            LiftPAMap f = LiftPAMap::rotation(a);
            ASSERT_TRUE(invertibility_test(f).invertible);
            EXPECT_EQ(has_periodic_point(f, q).k, q);
            if (q > 1) EXPECT_FALSE(has_periodic_point(f, q - 1).found);
        }
    EXPECT_THROW(has_periodic_point(doubling(), 3), DomainError);
}

TEST(PeriodicSearch, TransverseWitnessMatchesIntervalModule) {
    std::vector<Rat> xs{Rat(0), Rat(1, 4), Rat(3, 4), Rat(1)}, ys{Rat(0), Rat(1, 8), Rat(7, 8), Rat(1)};
    LiftPAMap f(xs, ys, 1);
    auto s = has_periodic_point(f, 4);
    ASSERT_TRUE(s.found);
    EXPECT_EQ(s.k, 1u);
    ASSERT_TRUE(s.witness);
    EXPECT_TRUE(s.witness->transverse);
    PAMap g(xs, ys);  // the same lift is an interval map
    for (const auto& p : circle_fix(f, 2)) {
        if (p.x() == 0) {
            EXPECT_TRUE(p.transverse);  // no boundary on the circle
            continue;
        }
        PeriodicPoint q;
        q.location = p.location;
        q.horizon = 2;
        EXPECT_EQ(classify_transverse(g, q).transverse, p.transverse) << str(p.x());
    }
}
