#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rwre/flows.hpp"
#include "support/oracles.hpp"

using namespace rwre;
using namespace rwre::testing;

namespace {

// s=(0,0), a=(1,0), b=(0,1), t=(1,1).
struct Diamond {
    DirectedGraph g;
    CapacityMap c;
    Terminals t{{Point(0, 0)}, {Point(1, 1)}};
    Diamond() {
        g.add_edge(Point(0, 0), Point(1, 0));
        g.add_edge(Point(0, 0), Point(0, 1));
        g.add_edge(Point(1, 0), Point(1, 1));
        g.add_edge(Point(0, 1), Point(1, 1));
        c = {2, 1, 1, 2};
    }
};

Flow unit_path(DirectedGraph& g, const std::vector<Point>& sites) {
    for (std::size_t k = 0; k + 1 < sites.size(); ++k) g.add_edge(sites[k], sites[k + 1]);
    return Flow{std::vector<double>(g.edge_count(), 1.0)};
}

}  // namespace

TEST(Divergence, ZeroAndSinglePathFlows) {
    DirectedGraph g;
    const std::vector<Point> path{Point(0, 0), Point(1, 0), Point(1, 1), Point(2, 1)};
    const Flow f = unit_path(g, path);
    const Flow zero{std::vector<double>(g.edge_count(), 0.0)};
    for (std::size_t v = 0; v < g.vertex_count(); ++v) EXPECT_EQ(zero.divergence(g, v), 0.0);
    EXPECT_EQ(f.divergence(g, *g.find_vertex(path.front())), 1.0);
    EXPECT_EQ(f.divergence(g, *g.find_vertex(path.back())), -1.0);
    EXPECT_EQ(f.divergence(g, *g.find_vertex(path[1])), 0.0);
    EXPECT_EQ(f.divergence(g, *g.find_vertex(path[2])), 0.0);
}

TEST(Divergence, SumsToZeroForAnyFlow) {
    const auto g = DirectedGraph::lattice_box(Box::ball(2, 3));
    CounterRng rng(1);
    for (int k = 0; k < 50; ++k) {
        Flow f{std::vector<double>(g.edge_count())};
        for (auto& v : f.values) v = rng.uniform();
        double total = 0;
        for (std::size_t v = 0; v < g.vertex_count(); ++v) total += f.divergence(g, v);
        EXPECT_NEAR(total, 0.0, 1e-12);
    }
}

TEST(LatticeBox, ContainsBothOrientations) {
    const auto g = DirectedGraph::lattice_box(Box::ball(2, 2));
    EXPECT_EQ(g.vertex_count(), 25u);
    EXPECT_EQ(g.edge_count(), 2u * 2u * 5u * 4u);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge(e);
        EXPECT_NE(u, v);
        EXPECT_EQ(l1_norm(Point(g.vertex(u)[0] - g.vertex(v)[0], g.vertex(u)[1] - g.vertex(v)[1])), 1);
        EXPECT_TRUE(g.find_edge(g.vertex(v), g.vertex(u)).has_value());
    }
}

TEST(MaxFlow, SingleEdgeAndDiamond) {
    DirectedGraph g;
    g.add_edge(Point(0, 0), Point(1, 0));
    const auto one = max_flow(g, {2.0}, {{Point(0, 0)}, {Point(1, 0)}});
    EXPECT_DOUBLE_EQ(one.value, 2.0);
    const Diamond d;
    const auto r = max_flow(d.g, d.c, d.t);
    EXPECT_DOUBLE_EQ(r.value, 2.0);
    EXPECT_DOUBLE_EQ(brute_force_min_cut(d.g, d.c, d.t), 2.0);
    EXPECT_DOUBLE_EQ(r.cut_capacity(d.c), 2.0);
    EXPECT_TRUE(separates(d.g, d.t, r.min_cut));
}

TEST(MaxFlow, DisconnectedTerminalsGiveZero) {
    DirectedGraph g;
    g.add_edge(Point(0, 0), Point(1, 0));
    g.add_vertex(Point(5, 5));
    const auto r = max_flow(g, {3.0}, {{Point(0, 0)}, {Point(5, 5)}});
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.min_cut.empty());
}

TEST(MaxFlow, EqualsExhaustiveMinCutOnSmallNetworks) {
    for (std::uint64_t k = 0; k < 300; ++k) {
        const bool integer = k % 2 == 0;
        const auto net = random_network(k, 10, integer);
        const auto r = max_flow(net.graph, net.capacity, net.terminals);
        const double brute = brute_force_min_cut(net.graph, net.capacity, net.terminals);
        if (integer) {
            EXPECT_EQ(r.value, brute) << "network " << k;
        } else {
            EXPECT_NEAR(r.value, brute, 1e-9) << "network " << k;
        }
        EXPECT_NEAR(r.cut_capacity(net.capacity), r.value, 1e-9);
        EXPECT_TRUE(separates(net.graph, net.terminals, r.min_cut));
    }
}

TEST(MaxFlow, LargeInstancesCarryTheirOwnCertificate) {
    const auto g = DirectedGraph::lattice_box(Box::ball(2, 6));
    const Terminals t{{Point{}}, sphere(2, 6)};
    CounterRng rng(3);
    for (int k = 0; k < 20; ++k) {
        CapacityMap c(g.edge_count());
        for (auto& v : c) v = rng.uniform();
        const auto r = max_flow(g, c, t);
        EXPECT_NEAR(r.cut_capacity(c), r.value, 1e-9);
        EXPECT_TRUE(separates(g, t, r.min_cut));
        EXPECT_NEAR(r.flow.strength(g, t), r.value, 1e-9);
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            EXPECT_GE(r.flow.values[e], 0.0);
            EXPECT_LE(r.flow.values[e], c[e] + 1e-12);
        }
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            if (g.vertex(v) == Point{} || sup_norm(g.vertex(v)) == 6) continue;
            EXPECT_NEAR(r.flow.divergence(g, v), 0.0, 1e-9);
        }
    }
}

TEST(Decompose, SinglePathAndDiamond) {
    DirectedGraph g;
    const std::vector<Point> path{Point(0, 0), Point(1, 0), Point(2, 0)};
    const Flow f = unit_path(g, path);
    const auto dec = decompose_flow(g, f, {{path.front()}, {path.back()}});
    ASSERT_EQ(dec.paths.size(), 1u);
    EXPECT_EQ(dec.paths[0].weight, 1.0);
    EXPECT_EQ(dec.paths[0].sites, path);
    for (double v : dec.residual.values) EXPECT_EQ(v, 0.0);

    const Diamond d;
    const auto r = max_flow(d.g, d.c, d.t);
    const auto dd = decompose_flow(d.g, r.flow, d.t);
    ASSERT_EQ(dd.paths.size(), 2u);
    EXPECT_DOUBLE_EQ(dd.paths[0].weight, 1.0);
    EXPECT_DOUBLE_EQ(dd.paths[1].weight, 1.0);
    EXPECT_LT(dd.paths[0].sites, dd.paths[1].sites);
}

TEST(Decompose, IdentityOnRandomAdmissibleFlows) {
    const int radius = 4;
    const auto g = DirectedGraph::lattice_box(Box::ball(2, radius));
    const Terminals t{{Point{}}, sphere(2, radius)};
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const Flow f = random_admissible_flow(g, radius, k, 1 + static_cast<int>(k % 4), static_cast<int>(k % 3));
        const auto dec = decompose_flow(g, f, t);
        double total = 0;
        std::vector<double> used(g.edge_count(), 0.0);
        for (const auto& p : dec.paths) {
            EXPECT_GT(p.weight, 0.0);
            EXPECT_EQ(p.sites.front(), Point{});
            EXPECT_EQ(sup_norm(p.sites.back()), radius);
            total += p.weight;
            for (std::size_t e : p.edges) used[e] += p.weight;
        }
        EXPECT_NEAR(total, f.strength(g, t), 1e-9);
        for (std::size_t e = 0; e < g.edge_count(); ++e) EXPECT_LE(used[e], f.values[e] + 1e-9);
        EXPECT_LE(dec.paths.size(), g.edge_count());
        EXPECT_NEAR(dec.residual.strength(g, t), 0.0, 1e-9);
    }
}

TEST(ProbabilityBound, TrivialThresholds) {
    const auto env = sample_window(uniform_law(2), Box::ball(2, 3), 2);
    const auto g = DirectedGraph::lattice_box(Box::ball(2, 3));
    const Terminals t{{Point{}}, sphere(2, 3)};
    const Flow f = random_admissible_flow(g, 3, 2, 2, 1);
    EXPECT_TRUE(flow_probability_bound(env, 3, g, f, t, 1.0).rhs_event);
    const Flow zero{std::vector<double>(g.edge_count(), 0.0)};
    const auto s = flow_probability_bound(env, 3, g, zero, t, 0.01);
    EXPECT_EQ(s.strength, 0.0);
    EXPECT_TRUE(s.rhs_event);
}

TEST(ProbabilityBound, EmpiricalInequalityOnUniformEnvironments) {
    const int radius = 3;
    const auto g = DirectedGraph::lattice_box(Box::ball(2, radius));
    const Terminals t{{Point{}}, sphere(2, radius)};
    const Flow f = random_admissible_flow(g, radius, 99, 3, 0);
    for (double q : {0.5, 0.1, 0.01}) {
        std::vector<double> lhs, rhs;
        for (std::uint64_t s = 0; s < 200; ++s) {
            const auto env = sample_window(uniform_law(2), Box::ball(2, radius), 4000 + s);
            const auto b = flow_probability_bound(env, radius, g, f, t, q);
            lhs.push_back(b.lhs_event ? 1.0 : 0.0);
            rhs.push_back(b.rhs_event ? 1.0 : 0.0);
        }
        const auto l = summarize(lhs), r = summarize(rhs);
        EXPECT_LE(l.mean, r.mean + 3.0 * r.standard_error) << "q=" << q;
    }
}

TEST(RootAtOrigin, CompanionFlowBecomesOriginFlow) {
    DirectedGraph g;
    const Flow f = unit_path(g, {Point(1, 0), Point(2, 0)});
    const Flow rooted = root_at_origin(g, f, Point(1, 0));
    const Terminals t{{Point{}}, {Point(2, 0)}};
    EXPECT_DOUBLE_EQ(rooted.strength(g, t), 1.0);
    EXPECT_NEAR(rooted.divergence(g, *g.find_vertex(Point(1, 0))), 0.0, 1e-15);
}

TEST(EdgeList, RoundTrip) {
    const Diamond d;
    std::stringstream buf;
    write_edge_list(buf, d.g, d.c, "diamond");
    buf << "source 0 0\nsink 1 1\n";
    const auto back = read_edge_list(buf);
    ASSERT_EQ(back.graph.edge_count(), 4u);
    EXPECT_EQ(back.capacity, d.c);
    EXPECT_DOUBLE_EQ(max_flow(back.graph, back.capacity, back.terminals).value, 2.0);
    std::stringstream bad("0 0 1 0 x\n");
    EXPECT_THROW((void)read_edge_list(bad), std::invalid_argument);
}
