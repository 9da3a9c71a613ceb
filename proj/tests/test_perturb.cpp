#include <gtest/gtest.h>

#include "pam/catalog.hpp"
#include "pam/periodic.hpp"
#include "pam/perturb.hpp"
#include "pam/window.hpp"
#include "support.hpp"

using namespace pam;
using pamtest::Rng;

namespace {

Rat q(const char* s) { return parse_rat(s); }

// Orbit chase from each critical point: the first k-step hit of a node with
// a slope sign change, found by evaluation only.
std::vector<std::pair<Rat, Rat>> chase_connections(const PAMap& f, unsigned k) {
    std::vector<std::pair<Rat, Rat>> out;
    auto turning = [&](const Rat& x) {
        if (x <= 0 || x >= 1) return false;
        Rat e = Rat(1, 1u << 20) / (1u << 20);
        Rat l = f(x) - f(x - e), r = f(x + e) - f(x);
        return sgn(l) * sgn(r) < 0;
    };
    for (const Rat& c : f.xs()) {
        if (!turning(c)) continue;
        Rat y = c;
        for (unsigned i = 1; i <= k; ++i) {
            y = f(y);
            if (turning(y)) {
                out.push_back({c, y});
                break;
            }
        }
    }
    return out;
}

}  // namespace

TEST(WindowMfold, ValleyThreeFold) {
    PAMap g = window_mfold(PAMap::valley(), {{q("7/16"), q("5/8")}, 3});
    EXPECT_EQ(g(q("7/16")), q("1/8"));
    EXPECT_EQ(g(q("11/24")), 0);
    EXPECT_EQ(g(q("1/2")), q("1/4"));
    EXPECT_EQ(g(q("9/16")), q("1/8"));
    EXPECT_EQ(g(q("5/8")), q("1/4"));
    EXPECT_TRUE(verify_lebesgue(g).ok);
}

TEST(WindowMfold, Errors) {
    PAMap T = PAMap::tent();
    EXPECT_EQ(window_mfold(T, {{q("1/8"), q("3/8")}, 1}), T);
    EXPECT_THROW(window_mfold(T, {{q("1/8"), q("3/8")}, 2}), ContinuityError);
    EXPECT_NO_THROW(window_mfold(T, {{q("1/4"), q("3/4")}, 2}));
    EXPECT_THROW(window_mfold(T, {{q("1/2"), q("3/2")}, 3}), WindowError);
    EXPECT_THROW(window_mfold(T, {{q("1/2"), q("1/2")}, 3}), WindowError);
}

TEST(WindowReplace, Examples) {
    PAMap T = PAMap::tent();
    IntervalQ w{q("1/8"), q("5/8")};
    EXPECT_EQ(window_replace(T, w, T.pwl().restrict(w.lo, w.hi)), T);
    PAMap five = window_mfold(T, {w, 5});
    EXPECT_EQ(window_replace(T, w, five.pwl().restrict(w.lo, w.hi)), five);
    // boundary 2-fold: accepted only with the waiver
    Pwl h2 = window_mfold(T, {{0, q("1/8")}, 2, true}).pwl().restrict(0, q("1/8"));
    EXPECT_THROW(window_replace(T, {0, q("1/8")}, h2), EquivalenceError);
    PAMap g = window_replace(T, {0, q("1/8")}, h2, true);
    EXPECT_EQ(g(0), q("1/4"));
    EXPECT_TRUE(verify_lebesgue(g).ok);
    // a monotone replacement with the wrong slope is not lambda-equivalent
    Pwl bad({q("1/8"), q("3/16"), q("5/8")}, {q("1/4"), q("1/2"), q("3/4")});
    try {
        window_replace(T, w, bad);
        FAIL();
    } catch (const EquivalenceError& e) {
        EXPECT_NE(std::string(e.what()).find("cell"), std::string::npos);
    }
}

TEST(Property, WindowMfoldInvariants) {
    Rng rng(31);
    for (int t = 0; t < 60; ++t) {
        PAMap f = pamtest::random_mp_map(rng, 2);
        Rat a = rng.dyadic(7), b = rng.dyadic(7);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        unsigned m = 2 * static_cast<unsigned>(rng.below(4)) + 1;
        PAMap g = window_mfold(f, {{a, b}, m});
        ASSERT_TRUE(verify_lebesgue(g).ok);
        ASSERT_EQ(g(a), f(a));
        ASSERT_EQ(g(b), f(b));
        for (const Rat& x : f.xs())
            if (x < a || x > b) ASSERT_EQ(g(x), f(x));
        for (const Rat& x : g.xs())
            if (x < a || x > b) ASSERT_EQ(g(x), f(x));
        ASSERT_LE(uniform_distance(f, g), f.image(a, b).length());
    }
}

TEST(Connections, Examples) {
    EXPECT_TRUE(find_critical_connections(PAMap::tent(), 3).empty());
    EXPECT_TRUE(find_critical_connections(PAMap::valley(), 2).empty());
    PAMap f({0, q("1/4"), q("1/2"), q("3/4"), 1}, {0, q("3/4"), 0, 1, 0});
    auto c = find_critical_connections(f, 3);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].source, q("1/4"));
    EXPECT_EQ(c[0].target, q("3/4"));
    EXPECT_EQ(c[0].length, 1u);
    EXPECT_EQ(f(c[0].source), c[0].target);
    auto chase = chase_connections(f, 3);
    ASSERT_EQ(chase.size(), 1u);
    EXPECT_EQ(chase[0].first, c[0].source);
}

TEST(Connections, AgreeWithOrbitChase) {
    Rng rng(32);
    for (int t = 0; t < 30; ++t) {
        PAMap f = pamtest::random_mp_map(rng, 3);
        for (unsigned k : {1u, 2u, 3u}) {
            auto c = find_critical_connections(f, k);
            auto chase = chase_connections(f, k);
            ASSERT_EQ(c.size(), chase.size());
            for (std::size_t j = 1; j < c.size(); ++j)
                ASSERT_TRUE(c[j - 1].length < c[j].length ||
                            (c[j - 1].length == c[j].length && c[j - 1].source < c[j].source));
            for (const auto& cc : c) {
                Rat y = cc.source;
                for (unsigned i = 0; i < cc.length; ++i) y = f(y);
                ASSERT_EQ(y, cc.target);
            }
        }
    }
}

TEST(BoundaryFix, TentFixedAtZero) {
    PAMap T = PAMap::tent();
    PAMap g = remove_boundary_fix(T, 1, q("1/10"));
    EXPECT_GT(g(0), 0);
    EXPECT_TRUE(verify_lebesgue(g).ok);
    EXPECT_LT(uniform_distance(T, g), q("1/10"));
    for (const auto& p : fix_points(g, 1)) {
        EXPECT_NE(p.x(), 0);
        EXPECT_NE(p.x(), 1);
    }
}

TEST(BoundaryFix, NothingToDo) {
    PAMap g = transverse_base();
    EXPECT_EQ(remove_boundary_fix(g, 3), g);
}

TEST(BoundaryFix, PeriodTwoBoundaryOrbit) {
    // 3-fold flip: f(0) = 1, f(1) = 0, slopes +-3
    PAMap f({0, q("1/3"), q("2/3"), 1}, {1, 0, 1, 0});
    ASSERT_TRUE(verify_lebesgue(f).ok);
    ASSERT_EQ(f(f(Rat(0))), 0);
    PAMap g = remove_boundary_fix(f, 2, q("1/10"));
    EXPECT_NE(g(g(Rat(0))), 0);
    EXPECT_NE(g(g(Rat(1))), 1);
    EXPECT_TRUE(verify_lebesgue(g).ok);
    EXPECT_LT(uniform_distance(f, g), q("1/10"));
}

TEST(ShiftTurningPoint, KeepsPeakValueAndMeasure) {
    PAMap f({0, q("1/4"), q("1/2"), q("3/4"), 1}, {0, q("3/4"), 0, 1, 0});
    PAMap g = shift_turning_point(f, q("3/4"), q("1/8"), {q("1/4")});
    EXPECT_TRUE(lambda_equivalent(f.pwl(), g.pwl()).ok);
    EXPECT_TRUE(find_critical_connections(g, 1).empty());
    auto c = crit(g);
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(g(c[2]), 1);
    EXPECT_LE(uniform_distance(f, g), q("1/8"));
}

TEST(MakeTransverse, Tent) {
    auto r = make_transverse(PAMap::tent(), 1, q("1/100"));
    EXPECT_LT(r.distance, q("1/100"));
    EXPECT_TRUE(audit_transverse(r.g, 1).ok) << audit_transverse(r.g, 1).failure;
    for (const auto& p : fix_points(r.g, 1)) EXPECT_TRUE(classify_transverse(r.g, p).transverse);
}

TEST(MakeTransverse, Identity) {
    auto r = make_transverse(PAMap::identity(), 1, q("1/100"));
    EXPECT_LT(r.distance, q("1/100"));
    auto pts = fix_points(r.g, 1);
    EXPECT_FALSE(pts.empty());
    for (const auto& p : pts) {
        EXPECT_TRUE(p.is_point());
        EXPECT_TRUE(classify_transverse(r.g, p).transverse);
    }
    for (std::size_t i = 0; i < r.g.pieces(); ++i) EXPECT_NE(rabs(r.g.slope(i)), 1);
    EXPECT_TRUE(find_critical_connections(r.g, 1).empty());
}

TEST(MakeTransverse, HigherHorizons) {
    for (unsigned k : {2u, 3u}) {
        for (const PAMap& f : {PAMap::tent(), PAMap::valley()}) {
            auto r = make_transverse(f, k, q("1/50"));
            EXPECT_LT(r.distance, q("1/50"));
            TransverseAudit a = audit_transverse(r.g, k);
            EXPECT_TRUE(a.ok) << "k=" << k << ": " << a.failure;
            EXPECT_TRUE(verify_lebesgue(r.g).ok);
        }
    }
}

TEST(MakeTransverse, RejectsNonMeasurePreserving) {
    EXPECT_THROW(make_transverse(PAMap({0, 1}, {0, q("1/2")}), 1, q("1/10")), PreconditionError);
}
