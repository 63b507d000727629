#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "rwre/exploration.hpp"
#include "support/oracles.hpp"

using namespace rwre;

namespace {

const Direction kRight(1), kLeft(-1), kUp(2), kDown(-2);

TransitionVector site(double right, double left, double up, double down) {
    const double v[] = {right, left, up, down};
    return TransitionVector(2, v);
}

EnvironmentWindow uniform_sites(const TransitionVector& w, int radius) {
    const Box box = Box::ball(2, radius);
    return make_window(deterministic_law(2, kRight), box, std::vector<TransitionVector>(box.size(), w));
}

ExponentSet all_equal(double v) {
    ExponentSet x;
    for (const auto& name : ExponentSet::aliases()) x.set(name, v);
    return x;
}

// Every explored edge leads to a site with outgoing edges unless it lies on the boundary,
// and a source reaches the boundary.
void expect_paths_end_on_boundary(const ExitStrategyGraph& g) {
    const DirectedGraph dg = g.graph();
    for (std::size_t v = 0; v < dg.vertex_count(); ++v) {
        if (sup_norm(dg.vertex(v)) < g.radius) {
            EXPECT_FALSE(dg.out_edges(v).empty()) << "dead end at " << to_string(dg.vertex(v));
        } else {
            EXPECT_TRUE(dg.out_edges(v).empty());
        }
    }
    for (const Point& s : {Point{}, g.companion}) {
        const Terminals one{{s}, sphere(2, g.radius)};
        EXPECT_TRUE(rwre::testing::connected_without(dg, one, std::vector<bool>(dg.edge_count(), false)));
    }
}

}  // namespace

TEST(Init, FavouriteDirectionAndCompanion) {
    const auto t3 = uniform_sites(counterexample_template(SiteType::III, 0.1), 3);
    const auto g = explore(t3, 3);
    EXPECT_EQ(g.favourite, kLeft);
    EXPECT_EQ(g.companion, Point(-1, 0));
    const auto tie = explore(uniform_sites(site(0.25, 0.25, 0.25, 0.25), 3), 3);
    EXPECT_EQ(tie.favourite, kRight);
    const auto terms = tie.terminals();
    EXPECT_EQ(terms.sources, (std::vector<Point>{Point{}, Point(1, 0)}));
}

TEST(Explore, DeterministicRightGivesTwoOppositeSegments) {
    const int r = 5;
    const auto g = explore(sample_window(deterministic_law(2, kRight), Box::ball(2, r), 0), r);
    std::set<std::pair<Point, Point>> got, want;
    for (const auto& e : g.edges) got.insert({e.tail, e.head});
    for (int x = 0; x > -r; --x) want.insert({Point(x, 0), Point(x - 1, 0)});
    for (int x = 1; x < r; ++x) want.insert({Point(x, 0), Point(x + 1, 0)});
    EXPECT_EQ(got, want);
    EXPECT_EQ(g.bifurcations[0], 0);
    EXPECT_EQ(g.bifurcations[1], 0);
}

TEST(Explore, StraightForwardSegmentCarriesTheTExponent) {
    const int r = 6;
    const auto g = explore(uniform_sites(site(0.7, 0.1, 0.1, 0.1), r), r);
    ExponentSet x = all_equal(0.3);
    x.set("vdash", 0.9);
    const auto cap = assign_capacities(g, x);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        if (g.edges[k].components == 2) {
            EXPECT_EQ(g.edges[k].head, g.edges[k].tail.step(kRight));
            EXPECT_DOUBLE_EQ(cap[k], 0.9);
        }
    }
    EXPECT_EQ(std::count_if(g.edges.begin(), g.edges.end(), [](const ExploredEdge& e) { return e.components == 2; }),
              r - 1);
}

TEST(Explore, FirstBifurcationProducesForwardAndOrthogonalBranches) {
    const int r = 5;
    const Box box = Box::ball(2, r);
    std::vector<TransitionVector> sites(box.size(), site(0.7, 0.1, 0.1, 0.1));
    sites[box.index(Point(2, 0))] = site(0.2, 0.05, 0.7, 0.05);
    const auto env = make_window(deterministic_law(2, kRight), box, sites);
    const auto g = explore(env, r);
    EXPECT_EQ(g.bifurcations[1], 2);  // the upward branch bifurcates again at (2,1)
    ExponentSet x = all_equal(0.1);
    x.set("perp", 0.5);
    x.set("ulcorner", 0.25);
    const auto cap = assign_capacities(g, x);
    bool up = false, side = false;
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const auto& e = g.edges[k];
        if (e.tail != Point(2, 0)) continue;
        if (e.head == Point(2, 1)) {
            up = true;
            EXPECT_DOUBLE_EQ(cap[k], 0.5);
            EXPECT_EQ(e.instruction[1], Instruction::forward(kRight));
        }
        if (e.head == Point(3, 0)) {
            side = true;
            EXPECT_DOUBLE_EQ(cap[k], 0.25);
        }
    }
    EXPECT_TRUE(up);
    EXPECT_TRUE(side);
    expect_paths_end_on_boundary(g);
}

TEST(Explore, StructuralPropertiesOverManySeeds) {
    const SiteLaw law = counterexample_law(0.9, 0.5, 0.25);
    const ExponentSet x = natural_exponents({0.9, 0.5, 0.25});
    std::set<double> allowed;
    for (const auto& name : ExponentSet::aliases()) allowed.insert(x.get(name));
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const int r = 5;
        const auto env = sample_window(law, Box::ball(2, r), s);
        const auto g = explore(env, r);
        EXPECT_LE(g.bifurcations[0], 2);
        EXPECT_LE(g.bifurcations[1], 2);
        EXPECT_LE(g.steps[0] + g.steps[1], 3 * Box::ball(2, r).size());
        expect_paths_end_on_boundary(g);
        const auto cap = assign_capacities(g, x);
        for (std::size_t k = 0; k < cap.size(); ++k) {
            EXPECT_TRUE(allowed.contains(cap[k])) << cap[k];
            EXPECT_NE(g.edges[k].components, 0);
        }
        if (s < 20) {
            const auto again = explore(env, r);
            ASSERT_EQ(again.edges.size(), g.edges.size());
            EXPECT_EQ(assign_capacities(again, x), cap);
        }
        if (::testing::Test::HasFailure()) break;
    }
}

TEST(Explore, RejectsSmallWindowsAndRadii) {
    const auto env = sample_window(uniform_law(2), Box::ball(2, 2), 0);
    EXPECT_THROW((void)explore(env, 3), WindowExhausted);
    EXPECT_THROW((void)explore(env, 1), std::invalid_argument);
}

TEST(Exponents, AliasesDominationAndRelations) {
    const ExponentSet x = natural_exponents({0.9, 0.5, 0.25});
    EXPECT_DOUBLE_EQ(x.get("ulcorner"), 0.25);
    EXPECT_DOUBLE_EQ(x.get("urcorner"), 0.45);
    EXPECT_DOUBLE_EQ(x.get("lrcorner"), 0.5);
    EXPECT_DOUBLE_EQ(x.get("llcorner"), 0.25);
    EXPECT_TRUE(std::isinf(x.get("top")));
    EXPECT_TRUE(x.dominated());
    EXPECT_EQ(x.alpha(kRight, kDown), x.alpha(kDown, kRight));
    const auto rel = check_relations(x, 1.0);
    const auto square = std::find_if(rel.begin(), rel.end(), [](const RelationCheck& r) { return r.name == "square"; });
    ASSERT_NE(square, rel.end());
    EXPECT_NEAR(square->value, 1.45, 1e-12);
    for (const auto& r : rel) EXPECT_TRUE(r.holds) << r.name;

    ExponentSet bad = all_equal(1.0);
    bad.set("ulcorner", 2.0);
    EXPECT_FALSE(bad.dominated());
    bad.enforce_domination();
    EXPECT_TRUE(bad.dominated());
    EXPECT_THROW(all_equal(0.0).validate(), std::invalid_argument);
}

TEST(Exponents, RelationMarginIsTheLargestDyadicSlack) {
    const ExponentSet ones = all_equal(1.0);
    EXPECT_EQ(relation_margin(ones, 1.0), 0.5);  // edges 2 > 1.5, wedges 3, square 4
    const ExponentSet natural = natural_exponents({0.9, 0.5, 0.25});
    const auto eps = relation_margin(natural, 1.0);
    ASSERT_TRUE(eps.has_value());
    for (const auto& r : check_relations(natural, 1.0 + *eps)) EXPECT_TRUE(r.holds);
    bool some_fail = false;
    for (const auto& r : check_relations(natural, 1.0 + 2.0 * *eps)) some_fail |= !r.holds;
    EXPECT_TRUE(some_fail);
    EXPECT_FALSE(relation_margin(all_equal(0.2), 1.0).has_value());
}

TEST(FlowStrength, UniformCapacitiesAlwaysSucceed) {
    const ExponentSet ones = all_equal(1.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto g = explore(sample_window(uniform_law(2), Box::ball(2, 5), s), 5);
        const auto rep = verify_flow_strength(g, ones, 1.0);
        EXPECT_TRUE(rep.pass);
        EXPECT_GE(rep.max_flow, 2.0 - 1e-12);
    }
}

TEST(FlowStrength, RelationPassingSetsSucceedOnCounterexampleEnvironments) {
    const ExponentSet x = natural_exponents({0.9, 0.5, 0.25});
    const SiteLaw law = counterexample_law(0.9, 0.5, 0.25);
    int passes = 0;
    const int n = 1000;
    for (std::uint64_t s = 0; s < n; ++s) {
        const auto rep = verify_flow_strength(explore(sample_window(law, Box::ball(2, 6), 50'000 + s), 6), x, 1.0);
        passes += rep.pass ? 1 : 0;
        if (!rep.pass) ADD_FAILURE() << "seed " << s << ": " << rep.diagnostic << " flow " << rep.max_flow;
    }
    EXPECT_EQ(passes, n);
}

TEST(FlowStrength, FailingRelationsReportDiagnostic) {
    const auto g = explore(sample_window(uniform_law(2), Box::ball(2, 4), 1), 4);
    const auto rep = verify_flow_strength(g, all_equal(0.2), 1.0);
    EXPECT_FALSE(rep.pass);
    EXPECT_FALSE(rep.margin.has_value());
    EXPECT_FALSE(rep.diagnostic.empty());
}

TEST(Export, EdgeTableHasOneRowPerEdge) {
    const auto g = explore(sample_window(uniform_law(2), Box::ball(2, 4), 2), 4);
    const ExponentSet ones = all_equal(1.0);
    std::stringstream out;
    write_exit_strategy(out, g, &ones);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(out, line)) rows += (!line.empty() && line[0] != '#') ? 1 : 0;
    EXPECT_EQ(rows, g.edges.size() + 1);
}
