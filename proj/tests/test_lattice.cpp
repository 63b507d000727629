#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

using namespace rwre;

TEST(Direction, SlotOrderAndOpposite) {
    const auto dirs = directions(2);
    ASSERT_EQ(dirs.size(), 4u);
    EXPECT_EQ(dirs[0], Direction(1));
    EXPECT_EQ(dirs[1], Direction(-1));
    EXPECT_EQ(dirs[2], Direction(2));
    EXPECT_EQ(dirs[3], Direction(-2));
    EXPECT_TRUE(std::is_sorted(dirs.begin(), dirs.end()));
    for (const auto& e : directions(4)) {
        EXPECT_EQ(Direction::from_slot(e.slot()), e);
        EXPECT_EQ(e.opposite().opposite(), e);
        EXPECT_FALSE(e.orthogonal_to(e.opposite()));
    }
    EXPECT_TRUE(Direction(1).orthogonal_to(Direction(-2)));
    EXPECT_THROW(Direction(0), std::invalid_argument);
    EXPECT_THROW(Direction(5), std::invalid_argument);
    EXPECT_EQ(Direction(-2).name(), "-2");
}

TEST(Point, StepsAndNorms) {
    const Point x(2, -3);
    EXPECT_EQ(x.step(Direction(1)), Point(3, -3));
    EXPECT_EQ(x.step(Direction(-2)), Point(2, -4));
    EXPECT_EQ(sup_norm(x), 3);
    EXPECT_EQ(l1_norm(x), 5);
    EXPECT_NEAR(l2_norm(x), std::sqrt(13.0), 1e-15);
    EXPECT_LT(Point(-1, 5), Point(0, -5));
    EXPECT_LT(Point(0, -1), Point(0, 0));
    EXPECT_EQ(to_string(x), "(2,-3)");
}

TEST(Box, BallIndexRoundTrip) {
    for (int dim = 1; dim <= 4; ++dim) {
        const Box b = Box::ball(dim, 2);
        std::size_t expected = 1;
        for (int i = 0; i < dim; ++i) expected *= 5;
        ASSERT_EQ(b.size(), expected);
        const auto pts = b.points();
        ASSERT_EQ(pts.size(), expected);
        EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            EXPECT_TRUE(b.contains(pts[i]));
            EXPECT_EQ(b.index(pts[i]), i);
            EXPECT_EQ(b.point(i), pts[i]);
        }
    }
    EXPECT_FALSE(Box::ball(2, 2).contains(Point(3, 0)));
}

TEST(Box, SphereIsTheSupShell) {
    for (int r = 0; r <= 4; ++r) {
        const auto s = sphere(2, r);
        std::size_t brute = 0;
        for (const auto& p : Box::ball(2, r).points()) brute += sup_norm(p) == r ? 1u : 0u;
        EXPECT_EQ(s.size(), brute);
        for (const auto& p : s) EXPECT_EQ(sup_norm(p), r);
        EXPECT_EQ(s.size(), r == 0 ? 1u : static_cast<std::size_t>(8 * r));
    }
}

TEST(Rng, CounterStreamsAreReproducibleAndDistinct) {
    CounterRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto va = a();
        EXPECT_EQ(va, b());
        EXPECT_NE(va, c());
    }
    EXPECT_EQ(site_key(7, Point(1, 2)), site_key(7, Point(1, 2)));
    std::set<std::uint64_t> keys;
    for (const auto& p : Box::ball(2, 5).points()) keys.insert(site_key(7, p));
    EXPECT_EQ(keys.size(), Box::ball(2, 5).size());
    EXPECT_NE(derive_key(1, {2, 3}), derive_key(1, {3, 2}));
}

TEST(Rng, UniformStaysInUnitIntervalWithMeanHalf) {
    CounterRng rng(9);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LE(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}
