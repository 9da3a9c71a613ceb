#include <gtest/gtest.h>

#include "pam/shadowing.hpp"
#include "pam/window.hpp"
#include "support.hpp"

using namespace pam;

namespace {

// Image of [a,b] by a direct scan of the node list.
IntervalQ scan_image(const PAMap& f, const Rat& a, const Rat& b) {
    Rat lo = f(a), hi = lo;
    Rat fb = f(b);
    lo = std::min(lo, fb);
    hi = std::max(hi, fb);
    const auto& xs = f.xs();
    const auto& ys = f.ys();
    auto first = std::upper_bound(xs.begin(), xs.end(), a) - xs.begin();
    for (std::size_t i = static_cast<std::size_t>(first); i < xs.size() && xs[i] < b; ++i) {
        lo = std::min(lo, ys[i]);
        hi = std::max(hi, ys[i]);
    }
    return {lo, hi};
}

struct Fixture {
    PAMap T = steepen(PAMap::tent());
    ShadowingKit kit = shadowing_perturbation(T, Rat(1, 10));
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST(Steepen, TentBecomesSlopeSix) {
    PAMap s = steepen(PAMap::tent());
    for (std::size_t i = 0; i < s.pieces(); ++i) EXPECT_EQ(rabs(s.slope(i)), 6);
    EXPECT_EQ(s.pieces(), 6u);
    EXPECT_TRUE(verify_lebesgue(s).ok);
    EXPECT_LE(uniform_distance(s, PAMap::tent()), 1);
}

TEST(Steepen, SteepMapUnchanged) {
    PAMap t2 = iterate(PAMap::tent(), 2);  // slopes +-4
    EXPECT_EQ(steepen(t2), t2);
    PAMap v = window_mfold(PAMap::valley(), {{Rat(0), Rat(1, 2)}, 5});
    PAMap sv = steepen(v);
    for (std::size_t i = 0; i < sv.pieces(); ++i) EXPECT_GE(rabs(sv.slope(i)), 4);
    EXPECT_TRUE(verify_lebesgue(sv).ok);
}

TEST(Steepen, RandomMapsStayMeasurePreserving) {
    pamtest::Rng r(11);
    for (int t = 0; t < 10; ++t) {
        PAMap f = pamtest::random_mp_map(r, 2);
        PAMap s = steepen(f);
        EXPECT_TRUE(verify_lebesgue(s).ok);
        for (std::size_t i = 0; i < s.pieces(); ++i) EXPECT_GE(rabs(s.slope(i)), 4);
    }
}

TEST(Partition, RejectsShallowMaps) {
    EXPECT_THROW(build_partition(PAMap::identity(), Rat(1, 10)), PreconditionError);
    EXPECT_THROW(build_partition(PAMap::tent(), Rat(1, 10)), PreconditionError);
}

TEST(Partition, ClausesAtOneTenth) {
    const auto& f = fx();
    const Partition& p = f.kit.partition;
    for (const auto& c : check_partition(f.T, p, Rat(1, 10))) EXPECT_TRUE(c.ok) << c.name << " " << c.detail;
    // independent re-check of (ii) and (iii)
    std::vector<Rat> cv;
    for (const Rat& c : crit(f.T)) cv.push_back(f.T(c));
    for (std::size_t i = 1; i + 1 < p.points.size(); ++i) {
        Rat y = f.T(p.points[i]);
        if (y == 0 || y == 1) continue;
        for (const Rat& a : p.points) EXPECT_NE(y, a);
        for (const Rat& v : cv) EXPECT_NE(p.points[i], v);
    }
    EXPECT_EQ(p.gamma, Rat(1, 120));
    EXPECT_EQ(p.cells(), 122u);
}

TEST(Kit, InvariantsAtOneTenth) {
    const auto& f = fx();
    for (const auto& c : verify_kit(f.kit, f.T)) EXPECT_TRUE(c.ok) << c.name << " " << c.detail;
    EXPECT_EQ(f.kit.delta, Rat(1, 1024));
    EXPECT_EQ(f.kit.m, 1025u);
    EXPECT_LT(uniform_distance(f.T, f.kit.F), Rat(1, 20));
    EXPECT_EQ(uniform_distance(f.T, f.kit.F), Rat(6144, 124025));
    EXPECT_EQ(f.kit.F.pieces(), 129030u);
}

TEST(Kit, FoldCountIsMinimalOdd) {
    const auto& k = fx().kit;
    EXPECT_LT(Rat(1) / Rat(Int(static_cast<unsigned long>(k.m))), k.delta);
    EXPECT_EQ(k.m % 2, 1u);
    EXPECT_GE(Rat(1) / Rat(Int(static_cast<unsigned long>(k.m - 2))), k.delta);
}

TEST(Kit, CoverIdentityByScan) {
    const auto& f = fx();
    const auto& a = f.kit.partition.points;
    const Rat& d = f.kit.delta;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        IntervalQ want = scan_image(f.T, a[i], a[i + 1]);
        EXPECT_EQ(scan_image(f.kit.F, a[i], a[i] + d), want) << "cell " << i;
        EXPECT_EQ(scan_image(f.kit.F, a[i + 1] - d, a[i + 1]), want) << "cell " << i;
    }
}

TEST(Kit, TranslatesDeltaNeighbourhood) {
    // no image cell boundary within 3 delta of a partition point it does not touch
    const auto& f = fx();
    const auto& a = f.kit.partition.points;
    const Rat& d = f.kit.delta;
    for (std::size_t j = 0; j + 1 < a.size(); ++j) {
        IntervalQ img = scan_image(f.T, a[j], a[j + 1]);
        for (std::size_t i = 1; i + 1 < a.size(); ++i) {
            if (img.lo > 0) EXPECT_FALSE(a[i] < img.lo && a[i] > img.lo - 3 * d);
            if (img.hi < 1) EXPECT_FALSE(a[i] > img.hi && a[i] < img.hi + 3 * d);
        }
    }
}

TEST(Trace, TrueOrbit) {
    const auto& f = fx();
    PseudoOrbit po;
    po.delta = Rat(1, 1 << 20);
    po.points = orbit(f.kit.F, Rat(1, 3), 60);
    Trace t = trace(f.kit, f.kit.F, po);
    EXPECT_LT(t.max_err, 2 * f.kit.partition.gamma);
}

TEST(Trace, RandomPseudoOrbits) {
    const auto& f = fx();
    Rat worst = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        PseudoOrbit po = random_pseudo_orbit(f.kit.F, f.kit.delta, 200, seed);
        Trace t = trace(f.kit, f.kit.F, po);
        ASSERT_EQ(t.chain.size(), 200u);
        // covering and errors recomputed independently
        Rat y = t.z;
        for (std::size_t i = 0; i < 200; ++i) {
            if (i > 0) {
                IntervalQ img = scan_image(f.kit.F, t.chain[i - 1].lo, t.chain[i - 1].hi);
                ASSERT_TRUE(img.contains(t.chain[i])) << "seed " << seed << " index " << i;
                ASSERT_LE(t.chain[i].length(), f.kit.partition.gamma);
            }
            ASSERT_EQ(rabs(y - po.points[i]), t.errors[i]);
            y = f.kit.F(y);
        }
        worst = std::max(worst, t.max_err);
    }
    EXPECT_LT(worst, Rat(1, 10));
}

TEST(Trace, NearbyMap) {
    const auto& f = fx();
    PAMap g = window_mfold(f.kit.F, {{Rat(1, 3), Rat(1, 3) + Rat(1, 1 << 24)}, 3});
    ASSERT_LT(uniform_distance(f.kit.F, g), f.kit.delta);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PseudoOrbit po = random_pseudo_orbit(g, f.kit.delta, 200, seed);
        EXPECT_LT(trace(f.kit, g, po).max_err, Rat(1, 10));
    }
}

TEST(Trace, Rejections) {
    const auto& f = fx();
    PseudoOrbit po = random_pseudo_orbit(f.kit.F, f.kit.delta, 20, 3);
    po.delta = 2 * f.kit.delta;
    EXPECT_THROW(trace(f.kit, f.kit.F, po), PreconditionError);
    // a far map
    PseudoOrbit ok = random_pseudo_orbit(f.T, f.kit.delta, 20, 3);
    EXPECT_THROW(trace(f.kit, f.T, ok), PreconditionError);
    // a jump that is too large
    PseudoOrbit bad = random_pseudo_orbit(f.kit.F, f.kit.delta, 20, 3);
    bad.points[7] = f.kit.F(bad.points[6]) + f.kit.delta > 1 ? Rat(0) : Rat(1);
    try {
        trace(f.kit, f.kit.F, bad);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("index 6"), std::string::npos) << e.what();
    }
}

TEST(Trace, PeriodicExact) {
    const auto& f = fx();
    for (unsigned n = 1; n <= 10; ++n) {
        PseudoOrbit po = random_periodic_pseudo_orbit(f.kit, f.kit.F, n, 100 + n);
        PeriodicTrace t = trace_periodic(f.kit, f.kit.F, po);
        EXPECT_EQ(t.period % n, 0u);
        EXPECT_LE(t.s, 3 * f.kit.partition.cells() + 2);
        Rat y = t.z;
        for (std::size_t i = 0; i < t.period; ++i) y = f.kit.F(y);
        EXPECT_EQ(y, t.z) << "N = " << n;
        EXPECT_LT(t.max_err, Rat(1, 10));
    }
}

TEST(Trace, PeriodicFromTrueCycle) {
    // a true fixed point of F in the right half
    const auto& f = fx();
    std::vector<Rat> fixes;
    for (std::size_t i = 0; i + 1 < f.kit.F.xs().size() && fixes.size() < 3; ++i) {
        Rat d0 = f.kit.F.ys()[i] - f.kit.F.xs()[i], d1 = f.kit.F.ys()[i + 1] - f.kit.F.xs()[i + 1];
        if (d0 != 0 && d1 != 0 && sgn(d0) != sgn(d1) && f.kit.F.xs()[i] > Rat(1, 2))
            fixes.push_back(f.kit.F.xs()[i] + d0 * (f.kit.F.xs()[i + 1] - f.kit.F.xs()[i]) / (d0 - d1));
    }
    ASSERT_FALSE(fixes.empty());
    PseudoOrbit po;
    po.delta = f.kit.delta;
    po.kind = OrbitKind::periodic;
    po.period = 1;
    po.points = {fixes.front()};
    PeriodicTrace t = trace_periodic(f.kit, f.kit.F, po);
    EXPECT_EQ(f.kit.F(t.z), t.z);
    EXPECT_LT(t.max_err, 2 * f.kit.partition.gamma);
}

TEST(Onto, ExactImage) {
    PAMap T = PAMap::tent();
    IntervalQ s = onto_subinterval(T, {Rat(0), Rat(1)}, {Rat(1, 4), Rat(1, 2)});
    EXPECT_EQ(s.lo, Rat(1, 8));
    EXPECT_EQ(s.hi, Rat(1, 4));
    EXPECT_EQ(T.image(s.lo, s.hi), (IntervalQ{Rat(1, 4), Rat(1, 2)}));
    EXPECT_THROW(onto_subinterval(T, {Rat(0), Rat(1, 8)}, {Rat(1, 2), Rat(1)}), ConstructionError);
    pamtest::Rng r(5);
    for (int t = 0; t < 50; ++t) {
        PAMap f = pamtest::random_mp_map(r, 3);
        Rat a = r.dyadic(5), b = r.dyadic(5);
        if (a == b) continue;
        if (b < a) std::swap(a, b);
        IntervalQ img = f.image(a, b);
        if (img.length() == 0) continue;
        IntervalQ k{img.lo + img.length() / 3, img.hi - img.length() / 3};
        IntervalQ sub = onto_subinterval(f, {a, b}, k);
        EXPECT_TRUE((IntervalQ{a, b}).contains(sub));
        EXPECT_EQ(scan_image(f, sub.lo, sub.hi), k);
    }
}

TEST(Onto, FixedPointsOfRestriction) {
    Pwl h({Rat(0), Rat(1, 2), Rat(1)}, {Rat(1), Rat(0), Rat(1)});
    std::vector<Rat> fx = pwl_fixed_points(h);
    ASSERT_EQ(fx.size(), 2u);
    EXPECT_EQ(fx[0], Rat(1, 3));
    EXPECT_EQ(fx[1], Rat(1));
}

TEST(Tower, DepthOneIsTheKit) {
    const auto& f = fx();
    SLimitTower t = s_limit_tower(f.T, Rat(1, 5), 1);
    ASSERT_EQ(t.levels.size(), 1u);
    EXPECT_EQ(t.levels[0].kit.F, fx().kit.F);  // eps_1 = 1/10
    for (const auto& c : t.checks) EXPECT_TRUE(c.ok) << c.name << " " << c.detail;
}

TEST(Tower, DeeperLevelsExceedTheCap) {
    PAMap T = steepen(PAMap::tent());
    try {
        s_limit_tower(T, Rat(1, 8), 3);
        FAIL() << "expected the resource cap";
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("level 2"), std::string::npos) << e.what();
    }
}

TEST(Tower, EstimateIsALowerBoundForTheKit) {
    // the level-1 kit obeys the same mesh/fold law the estimate uses
    const auto& f = fx();
    TowerEstimate e = estimate_next_level(f.T, Rat(1, 4), Rat(1, 10));
    EXPECT_LE(e.cells, Rat(static_cast<unsigned long>(f.kit.partition.cells())));
    EXPECT_LE(e.pieces, Rat(static_cast<unsigned long>(f.kit.F.pieces())));
}

TEST(Asymptotic, ConstantScheduleMatchesTrace) {
    const auto& f = fx();
    SLimitTower t = s_limit_tower(f.T, Rat(1, 5), 1);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PseudoOrbit po = random_pseudo_orbit(f.kit.F, f.kit.delta, 100, seed);
        Trace plain = trace(f.kit, f.kit.F, po);
        po.kind = OrbitKind::asymptotic;
        po.schedule = {{0, f.kit.delta}};
        AsymptoticTrace a = trace_asymptotic(t, po);
        EXPECT_EQ(a.z, plain.z);
        EXPECT_EQ(a.chain, plain.chain);
        EXPECT_EQ(a.max_err, plain.max_err);
    }
}

TEST(Asymptotic, ScheduleViolationNamesIndex) {
    const auto& f = fx();
    PseudoOrbit po = random_pseudo_orbit(f.kit.F, f.kit.delta / 16, 60, 9);
    po.kind = OrbitKind::asymptotic;
    po.schedule = {{0, f.kit.delta}, {30, f.kit.delta / 8}};
    // jumps below delta/4 but not below delta/8 for some i >= 30
    Rat x = f.kit.F(po.points[40]);
    po.points[41] = x + (x < Rat(1, 2) ? 1 : -1) * (f.kit.delta / 6);
    try {
        validate_pseudo_orbit(f.kit.F, po);
        FAIL() << "expected a schedule rejection";
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("index 40"), std::string::npos) << e.what();
    }
    po.schedule = {{5, f.kit.delta}};
    EXPECT_THROW(validate_pseudo_orbit(f.kit.F, po), PreconditionError);
}

TEST(Generators, Deterministic) {
    const auto& f = fx();
    PseudoOrbit a = random_pseudo_orbit(f.kit.F, f.kit.delta, 50, 42);
    PseudoOrbit b = random_pseudo_orbit(f.kit.F, f.kit.delta, 50, 42);
    EXPECT_EQ(a.points, b.points);
    EXPECT_NO_THROW(validate_pseudo_orbit(f.kit.F, a));
    PseudoOrbit p = random_periodic_pseudo_orbit(f.kit, f.kit.F, 7, 42);
    EXPECT_EQ(p.points.size(), 7u);
    EXPECT_NO_THROW(validate_pseudo_orbit(f.kit.F, p));
}

TEST(Generators, AsymptoticScheduleRespected) {
    const auto& f = fx();
    std::vector<ScheduleLevel> s{{0, f.kit.delta}, {50, f.kit.delta / 4}, {100, f.kit.delta / 16}};
    PseudoOrbit po = random_asymptotic_pseudo_orbit(f.kit.F, s, 150, 3);
    EXPECT_EQ(po.points.size(), 150u);
    EXPECT_NO_THROW(validate_pseudo_orbit(f.kit.F, po));
    for (std::size_t i = 100; i + 1 < po.points.size(); ++i)
        EXPECT_LT(rabs(f.kit.F(po.points[i]) - po.points[i + 1]), f.kit.delta / 16);
    EXPECT_THROW(random_asymptotic_pseudo_orbit(f.kit.F, {{3, f.kit.delta}}, 10, 1), PreconditionError);
}

TEST(Json, OrbitAndKitRoundTrip) {
    const auto& f = fx();
    PseudoOrbit p = random_periodic_pseudo_orbit(f.kit, f.kit.F, 5, 1);
    Json j = orbit_to_json(p);
    EXPECT_EQ(j["kind"], "periodic");
    EXPECT_EQ(j["N"], 5);
    PseudoOrbit q = orbit_from_json(j);
    EXPECT_EQ(q.points, p.points);
    EXPECT_EQ(q.period, 5u);
    EXPECT_EQ(q.delta, p.delta);
    PseudoOrbit a = random_asymptotic_pseudo_orbit(f.kit.F, {{0, f.kit.delta}, {4, f.kit.delta / 2}}, 8, 2);
    PseudoOrbit b = orbit_from_json(orbit_to_json(a));
    EXPECT_EQ(b.schedule.size(), 2u);
    EXPECT_EQ(b.schedule[1].start, 4u);
    EXPECT_EQ(b.schedule[1].delta, f.kit.delta / 2);
    EXPECT_THROW(orbit_from_json(Json{{"delta", "1/64"}, {"points", {"1/2"}}, {"kind", "loop"}}), InputError);
    EXPECT_THROW(orbit_from_json(Json{{"delta", "1/64"}, {"points", {"3/2"}}}), DomainError);

    ShadowingKit k = kit_from_json(kit_to_json(f.kit));
    EXPECT_EQ(k.F, f.kit.F);
    EXPECT_EQ(k.partition.points, f.kit.partition.points);
    EXPECT_EQ(k.delta, f.kit.delta);
    EXPECT_EQ(k.m, f.kit.m);
    Trace t1 = trace(f.kit, f.kit.F, random_pseudo_orbit(f.kit.F, f.kit.delta, 30, 4));
    Trace t2 = trace(k, k.F, random_pseudo_orbit(k.F, k.delta, 30, 4));
    EXPECT_EQ(t1.z, t2.z);
}
