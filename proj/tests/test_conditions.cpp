#include <gtest/gtest.h>

#include <cmath>
#include "json.hpp"

#include "rwre/conditions.hpp"
#include "rwre/solver.hpp"

using namespace rwre;

namespace {

ExponentSet all_equal(double v) {
    ExponentSet x;
    for (const auto& name : ExponentSet::aliases()) x.set(name, v);
    return x;
}

// max over pairs of slots on different axes of the smaller index.
double eta_star_oracle(const std::vector<double>& eta) {
    double best = 0;
    for (std::size_t s = 0; s < eta.size(); ++s) {
        for (std::size_t t = 0; t < eta.size(); ++t) {
            if (s / 2 != t / 2) best = std::max(best, std::min(eta[s], eta[t]));
        }
    }
    return best;
}

double metric(const ConditionReport& r, const std::string& key) {
    const auto it = r.metrics.find(key);
    if (it == r.metrics.end()) throw std::out_of_range("missing metric " + key);
    return it->second;
}

}  // namespace

TEST(EtaStar, Examples) {
    const double a[] = {2.0, 2.0, 0.7, 0.5};
    EXPECT_DOUBLE_EQ(compute_eta_star(a), 0.7);
    const double inf = std::numeric_limits<double>::infinity();
    const double b[] = {inf, inf, 0.3, 0.3};
    EXPECT_DOUBLE_EQ(compute_eta_star(b), 0.3);
    const double c[] = {0.4, 0.4, 0.4, 0.4};
    EXPECT_DOUBLE_EQ(compute_eta_star(c), 0.4);
}

TEST(EtaStar, MatchesBruteForceUpToFourDimensions) {
    CounterRng rng(1);
    for (int dim = 2; dim <= 4; ++dim) {
        for (int k = 0; k < 500; ++k) {
            std::vector<double> eta(static_cast<std::size_t>(2 * dim));
            for (auto& e : eta) e = rng.uniform() < 0.1 ? std::numeric_limits<double>::infinity() : 3.0 * rng.uniform();
            EXPECT_EQ(compute_eta_star(eta), eta_star_oracle(eta));
        }
    }
}

TEST(E0, DriftedLawIsBoundedInEveryDirection) {
    const auto r = check_e0(drifted_uniform_law(2, 0.05, Direction(1), 0.5), 100000, 1);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (const auto& c : r.clauses) EXPECT_TRUE(std::isinf(c.estimate)) << c.name;
}

TEST(E0, CounterexampleDirectionsAreFinite) {
    const auto r = check_e0(counterexample_law(0.9, 0.5, 0.25), 1'000'000, 2);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (const auto& c : r.clauses) EXPECT_TRUE(std::isfinite(c.estimate)) << c.name;
    // Each direction is small on two of the three site types; the heavier tail sets the index.
    EXPECT_NEAR(metric(r, "eta +1"), 0.25, 0.05);
    EXPECT_NEAR(metric(r, "eta -1"), 0.45, 0.05);
    EXPECT_NEAR(metric(r, "eta +2"), 0.25, 0.05);
    EXPECT_NEAR(metric(r, "eta -2"), 0.25, 0.05);
}

TEST(E0, DirichletExponentsAndPermutationCovariance) {
    const auto r = check_e0(dirichlet_law({2.0, 2.0, 0.7, 0.5}), 400000, 3);
    EXPECT_NEAR(metric(r, "eta +2"), 0.7, 0.08);
    EXPECT_NEAR(metric(r, "eta -2"), 0.5, 0.06);
    EXPECT_NEAR(metric(r, "eta_star"), 0.7, 0.08);
    const auto swapped = check_e0(dirichlet_law({0.7, 0.5, 2.0, 2.0}), 400000, 3);
    // Relabelling the directions relabels the estimates (up to sampling error).
    EXPECT_NEAR(metric(swapped, "eta +1"), metric(r, "eta +2"), 0.05);
    EXPECT_NEAR(metric(swapped, "eta -1"), metric(r, "eta -2"), 0.05);
    EXPECT_NEAR(metric(swapped, "eta +2"), metric(r, "eta +1"), 0.3);
}

TEST(X, CounterexampleSplitVerdict) {
    const auto r = check_x(counterexample_law(0.9, 0.5, 0.25), 1.0, natural_exponents({0.9, 0.5, 0.25}), 200000, 7);
    EXPECT_EQ(r.verdict, Verdict::fail);
    for (const auto& c : r.clauses) {
        if (c.name.starts_with("eq1 ") || c.name.starts_with("relation ")) EXPECT_EQ(c.verdict, Verdict::pass) << c.name;
    }
    const auto* named = r.find("eq2 dashv^perp urcorner on argmax +2");
    ASSERT_NE(named, nullptr);
    EXPECT_EQ(named->verdict, Verdict::fail);
    EXPECT_LT(named->estimate + named->half_width, 1.0);
    EXPECT_EQ(metric(r, "rescue found"), 0.0);
}

TEST(X, OtherValidTriplesAlsoSplit) {
    for (auto [l, p, rt] : {std::tuple{0.8, 0.5, 0.3}, std::tuple{0.95, 0.6, 0.2}}) {
        const CounterexampleLaw law{l, p, rt};
        for (const auto& rel : counterexample_relations(law)) ASSERT_TRUE(rel.holds) << rel.name;
        XOptions opt;
        opt.rescue_search = false;
        const auto r = check_x(counterexample_law(l, p, rt), 1.0, natural_exponents(law), 200000, 8, opt);
        EXPECT_EQ(r.verdict, Verdict::fail);
        bool eq2_failed = false;
        for (const auto& c : r.clauses) {
            if (c.name.starts_with("eq2 ")) eq2_failed |= c.verdict == Verdict::fail;
            if (c.name.starts_with("eq1 ") || c.name.starts_with("relation ")) EXPECT_EQ(c.verdict, Verdict::pass) << c.name;
        }
        EXPECT_TRUE(eq2_failed);
    }
}

TEST(X, DriftedLawPassesEverything) {
    const auto r = check_x(drifted_uniform_law(2, 0.05, Direction(1), 0.5), 1.0, all_equal(1.0), 100000, 9);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (const auto& c : r.clauses) EXPECT_EQ(c.verdict, Verdict::pass) << c.name;
}

TEST(X, ArithmeticFailureRegardlessOfSamples) {
    ExponentSet x = all_equal(1.0);
    x.set("dashv", 0.3);
    x.set("vdash", 0.3);
    XOptions opt;
    opt.rescue_search = false;
    const auto r = check_x(drifted_uniform_law(2, 0.05, Direction(1), 0.5), 1.0, x, 1000, 1, opt);
    EXPECT_EQ(r.verdict, Verdict::fail);
    const auto* edge = r.find("relation edge +1");
    ASSERT_NE(edge, nullptr);
    EXPECT_EQ(edge->verdict, Verdict::fail);
}

TEST(B, RadiusRelationArithmetic) {
    EXPECT_FALSE(b_radius_relation(1.0, 0.5, 2, 1.0));
    EXPECT_TRUE(b_radius_relation(1.0, 0.5, 3, 1.0));
    // η = 0.6, c = 10: (1 + c)/(η c) - 2 = 11/6 - 2 < 0.
    EXPECT_TRUE(b_radius_relation(1.0, 0.6, 0, 10.0));
    EXPECT_EQ(feasible_radius_zero_c(0.6), 8.0);
    EXPECT_FALSE(feasible_radius_zero_c(0.5).has_value());
    for (int e = -20; e <= 20; ++e) {
        const double c = std::ldexp(1.0, e);
        for (double eta : {0.51, 0.6, 0.75, 1.0}) {
            const bool feasible = (1.0 + c) / (eta * c) - 2.0 < 0.0;
            EXPECT_EQ(b_radius_relation(1.0, eta, 0, c), feasible) << eta << " " << c;
        }
    }
}

TEST(B, RadiusZeroExitsInOneStep) {
    BOptions opt;
    opt.replicas = 2000;
    const auto r = check_b(counterexample_law(0.9, 0.5, 0.25), 1.0, 0.6, 0, 10.0, 5, opt);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(metric(r, "censored"), 0.0);
}

TEST(B, DriftedLawHasLightExitTimes) {
    BOptions opt;
    opt.replicas = 20000;
    const auto r = check_b(drifted_uniform_law(2, 0.05, Direction(1), 0.8), 1.0, 0.5, 3, 1.0, 6, opt);
    EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(P, DeterministicPassesAndSymmetricFails) {
    const Heading l = Heading::axis(2, Direction(1));
    POptions opt;
    opt.replicas = 5000;
    const int widths[] = {5, 10, 20};
    const auto det = check_p(deterministic_law(2, Direction(1)), 2.0, l, widths, 1, opt);
    EXPECT_EQ(det.verdict, Verdict::pass);
    for (const auto& c : det.clauses) EXPECT_EQ(c.estimate, 0.0);
    EXPECT_EQ(det.notes.at("scope"), "finite-L evidence, not a proof");
    const int five[] = {5};
    const auto sym = check_p(symmetric_law(2), 2.0, l, five, 1, opt);
    EXPECT_EQ(sym.verdict, Verdict::fail);
    EXPECT_NEAR(sym.clauses.front().estimate, 0.5, 0.05);
}

TEST(H, DriftedLawIsTriviallyBounded) {
    HOptions opt;
    opt.samples = 50000;
    opt.environments = 100;
    const int radii[] = {2, 3};
    const double qs[] = {0.5, 0.01};
    const auto r = check_h(drifted_uniform_law(2, 0.05, Direction(1), 0.5), radii, qs, 1, opt);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_TRUE(std::isinf(metric(r, "axis 1 eta_tilde")));
    EXPECT_TRUE(std::isinf(metric(r, "axis 2 eta_tilde")));
}

TEST(H, OrthogonalExponentsDominateEtaStar) {
    HOptions opt;
    opt.environments = 500;
    const int radii[] = {3};
    const double qs[] = {0.01};
    const auto r = check_h(dirichlet_law({2.0, 2.0, 0.7, 0.5}), radii, qs, 2, opt);
    const double eta_min = std::min(metric(r, "axis 1 eta_tilde"), metric(r, "axis 2 eta_tilde"));
    EXPECT_GE(eta_min, 0.7 - 0.08);
    EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(Attainability, DeterministicLawNeverSitsBelowTheLevel) {
    const double deltas[] = {0.1};
    const double us[] = {100.0, 1000.0};
    const auto r = estimate_attainability(deterministic_law(2, Direction(1)), 1.0, 0.5, deltas, 0.5, us, 1);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (const auto& c : r.clauses) EXPECT_EQ(c.estimate, 0.0);
}

TEST(Attainability, SmallUsesRadiusOne) {
    const double deltas[] = {0.1};
    const double us[] = {2.0};
    const auto r = estimate_attainability(uniform_law(2), 1.0, 0.5, deltas, 0.5, us, 1);
    EXPECT_EQ(metric(r, "radius u=2"), 1.0);
    const double huge[] = {1e12};
    EXPECT_THROW((void)estimate_attainability(uniform_law(2), 1.0, 0.5, deltas, 1.0, huge, 1), std::invalid_argument);
}

TEST(Attainability, DriftedLawCurve) {
    const double deltas[] = {0.1};
    const double us[] = {100.0, 1000.0, 10000.0};
    const auto r = estimate_attainability(drifted_uniform_law(2, 0.05, Direction(1), 0.5), 1.0, 0.5, deltas, 0.5, us, 3);
    EXPECT_EQ(r.clauses.size(), 3u);
    EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(Wedge, ExactEscapeFormula) {
    const auto t1 = counterexample_template(SiteType::I, 0.1);
    const auto t2 = counterexample_template(SiteType::II, 0.05);
    const auto t3 = counterexample_template(SiteType::III, 0.02);
    // From the trap: leave 0 sideways (ξ² + ξ²) or step and not come back.
    const double expected = 2 * 0.01 + 0.88 * (1 - 0.94) + 0.1 * (1 - 0.85);
    EXPECT_NEAR(wedge_escape_probability(t1, t3, t2), expected, 1e-15);
    const double q[] = {0.25, 0.25, 0.25, 0.25};
    const TransitionVector flat(2, q);
    EXPECT_NEAR(wedge_escape_probability(flat, flat, flat), 0.5 + 0.5 * 0.75, 1e-15);
}

TEST(Wedge, CounterexampleHasHeavyVisitsAndDriftedDoesNot) {
    WedgeOptions opt;
    opt.replicas = 200000;
    const auto cx = wedge_experiment(counterexample_law(0.9, 0.5, 0.25), 1, opt);
    EXPECT_DOUBLE_EQ(cx.target, 0.95);
    EXPECT_LT(cx.visits_index.estimate - cx.visits_index.half_width, 1.0);
    EXPECT_NEAR(cx.trap_frequency, 1.0 / 27.0, 3.0 * std::sqrt((1.0 / 27.0) * (26.0 / 27.0) / opt.replicas));
    const auto dr = wedge_experiment(drifted_uniform_law(2, 0.05, Direction(1), 0.5), 1, opt);
    EXPECT_TRUE(dr.escape_index.bounded_below());
    EXPECT_GE(dr.visits_index.estimate, 1.0);
    EXPECT_EQ(dr.censored, 0u);
}

TEST(TailChain, DeterministicLawNeverReturns) {
    const double ns[] = {10, 100};
    TailChainOptions opt;
    opt.environments = 50;
    const auto r = nbr_tail_chain(deterministic_law(2, Direction(1)), 1.0, 0.5, 2, ns, 1, opt);
    EXPECT_EQ(metric(r, "P(N>n) n=10"), 0.0);
    EXPECT_EQ(r.verdict, Verdict::pass);
}

TEST(TailChain, ConstantEscapeGivesTheGeometricTail) {
    const double ns[] = {1, 5, 20};
    TailChainOptions opt;
    opt.environments = 10;
    const auto r = nbr_tail_chain(symmetric_law(2), 1.0, 0.5, 2, ns, 1, opt);
    const double p = escape_probability(sample_window(symmetric_law(2), Box::ball(2, 3), 0), 3);
    for (double n : ns) {
        char tag[32];
        std::snprintf(tag, sizeof tag, "P(N>n) n=%g", n);
        EXPECT_NEAR(metric(r, tag), std::pow(1.0 - p, n + 1.0), 1e-12);
    }
}

TEST(TailChain, DriftedLawStaysBelowTheBound) {
    const double ns[] = {10, 100, 1000};
    TailChainOptions opt;
    opt.environments = 1000;
    const auto r = nbr_tail_chain(drifted_uniform_law(2, 0.05, Direction(1), 0.5), 1.0, 0.5, 2, ns, 2, opt);
    EXPECT_EQ(r.verdict, Verdict::pass);
    for (double n : ns) {
        char tail[32], bound[32];
        std::snprintf(tail, sizeof tail, "P(N>n) n=%g", n);
        std::snprintf(bound, sizeof bound, "bound n=%g", n);
        EXPECT_LE(metric(r, tail), metric(r, bound));
    }
}

TEST(Report, SettleAndJson) {
    ConditionReport r;
    r.condition = "X";
    r.seed = 3;
    r.config_hash = "00ff";
    r.clauses.push_back({"a", Verdict::pass, 1.0, 0.0, 0.5, ""});
    r.clauses.push_back({"b", Verdict::inconclusive, std::numeric_limits<double>::infinity(), 0.0, 0.5, ""});
    r.settle();
    EXPECT_EQ(r.verdict, Verdict::inconclusive);
    r.clauses.push_back({"c", Verdict::fail, std::nan(""), 0.0, 0.5, ""});
    r.settle();
    EXPECT_EQ(r.verdict, Verdict::fail);
    EXPECT_EQ(r.find("b")->name, "b");
    EXPECT_EQ(r.find("zz"), nullptr);
    const auto j = nlohmann::json::parse(r.to_json());
    EXPECT_EQ(j["condition"], "X");
    EXPECT_EQ(j["verdict"], "fail");
    EXPECT_EQ(j["config_hash"], "00ff");
    EXPECT_EQ(j["clauses"][1]["estimate"], "inf");
    EXPECT_TRUE(j["clauses"][2]["estimate"].is_null());
}
