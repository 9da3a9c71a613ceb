#include <gtest/gtest.h>

#include "pam/io.hpp"
#include "pam/map.hpp"
#include "pam/window.hpp"
#include "support.hpp"

using namespace pam;
using pamtest::Rng;

namespace {

Rat q(const char* s) { return parse_rat(s); }

// Number of monotone pieces of f seen on a uniform grid: count sign changes
// of consecutive differences.
std::size_t grid_monotone_pieces(const PAMap& f, unsigned k, unsigned cells) {
    std::size_t pieces = 1;
    int last = 0;
    Rat prev = pamtest::iterate_at(f, Rat(0), k);
    for (unsigned j = 1; j <= cells; ++j) {
        Rat v = pamtest::iterate_at(f, Rat(Rat(j) / cells), k);
        int s = sgn(Rat(v - prev));
        if (s != 0 && last != 0 && s != last) ++pieces;
        if (s != 0) last = s;
        prev = v;
    }
    return pieces;
}

// Interior grid points where the slope sign flips.
std::size_t grid_sign_changes(const PAMap& f, const Rat& lo, const Rat& hi, unsigned cells) {
    std::size_t count = 0;
    int last = 0;
    Rat step = (hi - lo) / cells;
    Rat prev = f(lo);
    for (unsigned j = 1; j <= cells; ++j) {
        Rat v = f(lo + step * j);
        int s = sgn(Rat(v - prev));
        if (s != 0 && last != 0 && s != last) ++count;
        if (s != 0) last = s;
        prev = v;
    }
    return count;
}

Rat grid_max_distance(const PAMap& f, const PAMap& g, unsigned cells) {
    Rat best(0);
    for (unsigned j = 0; j <= cells; ++j) {
        Rat x = Rat(j) / cells;
        best = std::max(best, rabs(f(x) - g(x)));
    }
    return best;
}

}  // namespace

TEST(Eval, TentAndValley) {
    PAMap T = PAMap::tent();
    EXPECT_EQ(T(q("1/2")), 1);
    EXPECT_EQ(T(q("1/4")), q("1/2"));
    EXPECT_EQ(PAMap::valley()(q("7/16")), q("1/8"));
    EXPECT_THROW(T(q("3/2")), DomainError);
    EXPECT_THROW(T(q("-1/8")), DomainError);
}

TEST(Rat, ParseRejectsGarbage) {
    EXPECT_EQ(parse_rat("6/8"), q("3/4"));
    EXPECT_EQ(parse_rat("-2"), -2);
    EXPECT_THROW(parse_rat("1/0"), InputError);
    EXPECT_THROW(parse_rat("0.5"), InputError);
    EXPECT_THROW(parse_rat(""), InputError);
}

TEST(Compose, IdentityAndTentSquare) {
    PAMap T = PAMap::tent();
    EXPECT_EQ(compose(PAMap::identity(), T), T);
    PAMap T2 = compose(T, T);
    std::vector<Rat> xs{0, q("1/4"), q("1/2"), q("3/4"), 1};
    std::vector<Rat> ys{0, 1, 0, 1, 0};
    EXPECT_EQ(T2.xs(), xs);
    EXPECT_EQ(T2.ys(), ys);
}

TEST(Compose, TentCubeHasEightPieces) {
    PAMap T = PAMap::tent();
    PAMap T3 = compose(T, compose(T, T));
    std::size_t oracle = grid_monotone_pieces(T, 3, 4096);
    EXPECT_EQ(oracle, 8u);
    EXPECT_EQ(T3.pieces(), oracle);
    EXPECT_EQ(iterate(T, 3), T3);
    for (std::size_t i = 0; i < T3.pieces(); ++i) {
        EXPECT_EQ(T3.ys()[i], i % 2 == 0 ? 0 : 1);
        EXPECT_EQ(rabs(T3.slope(i)), 8);
    }
}

TEST(Iterate, Basics) {
    PAMap T = PAMap::tent();
    EXPECT_EQ(iterate(T, 1), T);
    EXPECT_EQ(iterate(PAMap::identity(), 100), PAMap::identity());
    EXPECT_THROW(iterate(T, 0), DomainError);
    EXPECT_EQ(iterate(T, 12).pieces(), 4096u);
}

TEST(Distance, Examples) {
    PAMap T = PAMap::tent();
    EXPECT_EQ(uniform_distance(T, T), 0);
    EXPECT_EQ(uniform_distance(T, PAMap::valley()), 1);
    PAMap h = window_mfold(T, {{q("7/16"), q("5/8")}, 3});
    // breakpoints of both maps have denominators dividing 48
    Rat oracle = grid_max_distance(T, h, 4800);
    EXPECT_EQ(uniform_distance(T, h), oracle);
    EXPECT_EQ(oracle, q("1/4"));
}

TEST(Lebesgue, Examples) {
    EXPECT_TRUE(verify_lebesgue(PAMap::tent()).ok);
    EXPECT_TRUE(verify_lebesgue(PAMap::identity()).ok);
    LebesgueCheck half = verify_lebesgue(PAMap({0, 1}, {0, q("1/2")}));
    EXPECT_FALSE(half.ok);
    EXPECT_GE(half.cell.lo, q("1/2"));
    EXPECT_LE(half.cell.hi, 1);
    EXPECT_EQ(half.sum, 0);
    EXPECT_THROW(verify_lebesgue(PAMap({0, q("1/2"), 1}, {0, q("1/2"), q("1/2")})), FlatPieceError);
}

TEST(Lebesgue, WindowOfTentAgreesWithPreimageOracle) {
    Rng rng(7);
    PAMap h = window_mfold(PAMap::tent(), {{q("7/16"), q("5/8")}, 3});
    EXPECT_TRUE(verify_lebesgue(h).ok);
    for (int t = 0; t < 1000; ++t) {
        Rat c = rng.dyadic(20), d = rng.dyadic(20);
        if (d < c) std::swap(c, d);
        ASSERT_EQ(pamtest::preimage_measure(h, c, d), d - c);
    }
}

TEST(Crit, Examples) {
    EXPECT_EQ(crit(PAMap::tent()), std::vector<Rat>{q("1/2")});
    EXPECT_TRUE(crit(PAMap::identity()).empty());
    EXPECT_TRUE(xi_set(PAMap::identity()).empty());
    PAMap T = PAMap::tent();
    PAMap h = window_mfold(T, {{q("7/16"), q("5/8")}, 3});
    std::size_t before = grid_sign_changes(T, q("7/16"), q("5/8"), 4800);
    std::size_t after = grid_sign_changes(h, q("7/16"), q("5/8"), 4800);
    // T already turns at 1/2; each of the three copies of T|window turns
    // once and the two fold seams add two more.
    EXPECT_EQ(before, 1u);
    EXPECT_EQ(after, 5u);
    EXPECT_EQ(crit(h).size() - crit(T).size(), after - before);
    std::vector<Rat> expect{q("11/24"), q("1/2"), q("13/24"), q("9/16"), q("7/12")};
    EXPECT_EQ(crit(h), expect);
    for (const Rat& c : crit(h)) EXPECT_NE(std::find(xi_set(h).begin(), xi_set(h).end(), c), xi_set(h).end());
}

TEST(Canonical, MergesCollinearNodes) {
    PAMap f({0, q("1/4"), q("1/2"), 1}, {0, q("1/4"), q("1/2"), 1});
    EXPECT_EQ(f, PAMap::identity());
    EXPECT_EQ(f.pieces(), 1u);
    EXPECT_THROW(PAMap({0, q("1/2"), q("1/2"), 1}, {0, 0, 1, 1}), InvariantError);
    EXPECT_THROW(PAMap({0, 1}, {0, 2}), InvariantError);
    EXPECT_THROW(PAMap({q("1/8"), 1}, {0, 1}), InvariantError);
}

TEST(Json, RoundTripAndRejectsNonCanonical) {
    PAMap h = window_mfold(PAMap::valley(), {{q("7/16"), q("5/8")}, 3});
    EXPECT_EQ(map_from_json(map_to_json(h)), h);
    Json bad = {{"breakpoints", {"0", "1/2", "1"}}, {"values", {"0", "1/2", "1"}}};
    EXPECT_THROW(map_from_json(bad), InvariantError);
    Json ints = {{"breakpoints", {0, "7/16", 1}}, {"values", {1, "1/8", 1}}};
    EXPECT_EQ(map_from_json(ints).pieces(), 2u);
    Json junk = {{"breakpoints", {"0", "x"}}, {"values", {"0", "1"}}};
    EXPECT_THROW(map_from_json(junk), InputError);
}

TEST(Property, ComposeIsAssociative) {
    Rng rng(11);
    for (int t = 0; t < 40; ++t) {
        PAMap f = pamtest::random_map(rng), g = pamtest::random_map(rng), h = pamtest::random_map(rng);
        ASSERT_EQ(compose(compose(f, g), h), compose(f, compose(g, h)));
    }
}

TEST(Property, MeasurePreservationClosedUnderComposition) {
    Rng rng(12);
    for (int t = 0; t < 40; ++t) {
        PAMap f = pamtest::random_mp_map(rng), g = pamtest::random_mp_map(rng);
        ASSERT_TRUE(verify_lebesgue(f).ok);
        ASSERT_TRUE(verify_lebesgue(g).ok);
        ASSERT_TRUE(verify_lebesgue(compose(f, g)).ok);
    }
}

TEST(Property, UniformDistanceIsAMetric) {
    Rng rng(13);
    for (int t = 0; t < 60; ++t) {
        PAMap f = pamtest::random_map(rng), g = pamtest::random_map(rng), h = pamtest::random_map(rng);
        Rat fg = uniform_distance(f, g), gf = uniform_distance(g, f);
        ASSERT_EQ(fg, gf);
        ASSERT_EQ(uniform_distance(f, f), 0);
        ASSERT_EQ(fg == 0, f == g);
        ASSERT_LE(uniform_distance(f, h), fg + uniform_distance(g, h));
        ASSERT_GE(fg, grid_max_distance(f, g, 256));
    }
}

TEST(Property, PreimageMeasureOfIntervals) {
    Rng rng(14);
    for (int t = 0; t < 30; ++t) {
        PAMap f = pamtest::random_mp_map(rng, 3);
        for (int s = 0; s < 30; ++s) {
            Rat c = rng.dyadic(12), d = rng.dyadic(12);
            if (d < c) std::swap(c, d);
            ASSERT_EQ(pamtest::preimage_measure(f, c, d), d - c);
        }
    }
}

TEST(Property, LebesgueFalseGivesARealWitness) {
    Rng rng(15);
    for (int t = 0; t < 40; ++t) {
        PAMap f = pamtest::random_map(rng);
        bool flat = false;
        for (std::size_t i = 0; i < f.pieces(); ++i) flat = flat || f.slope(i) == 0;
        if (flat) continue;
        LebesgueCheck c = verify_lebesgue(f);
        if (c.ok) continue;
        Rat lo = c.cell.lo, hi = c.cell.hi;
        ASSERT_LT(lo, hi);
        ASSERT_NE(pamtest::preimage_measure(f, lo, hi), hi - lo);
    }
}
