#include <gtest/gtest.h>

#include <cmath>

#include "rwre/env.hpp"
#include "rwre/tail.hpp"

using namespace rwre;

namespace {

std::vector<double> power_law_samples(double beta, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = sample_power_law(beta, rng.uniform());
    return v;
}

}  // namespace

TEST(Hill, RecoversThePowerLawIndex) {
    const auto v = power_law_samples(0.9, 1'000'000, 1);
    const auto est = estimate_tail_index(v);
    EXPECT_FALSE(est.inconclusive);
    EXPECT_NEAR(est.estimate, 0.9, 0.05);
    EXPECT_EQ(est.k, static_cast<std::size_t>(std::floor(std::pow(1e6, 2.0 / 3.0))));
    EXPECT_LE(std::abs(est.estimate - 0.9), est.half_width);
}

TEST(Hill, SquaringHalvesTheIndex) {
    auto v = power_law_samples(0.9, 1'000'000, 2);
    for (auto& x : v) x *= x;
    EXPECT_NEAR(estimate_tail_index(v).estimate, 0.45, 0.03);
}

TEST(Hill, BoundedVariablesGiveTheSentinel) {
    CounterRng rng(3);
    std::vector<double> v(100000);
    for (auto& x : v) x = 0.625 + 0.375 * rng.uniform();
    const auto est = estimate_tail_index(v);
    EXPECT_TRUE(std::isinf(est.estimate));
    EXPECT_TRUE(est.bounded_below());
    EXPECT_EQ(moment_verdict(est, 100.0), Verdict::pass);
}

TEST(Hill, AtomAtZeroAndInvalidInput) {
    std::vector<double> v(10000, 0.5);
    for (std::size_t i = 0; i < 1000; ++i) v[i] = 0.0;
    EXPECT_EQ(estimate_tail_index(v).estimate, 0.0);
    const std::vector<double> negative{0.1, -0.2};
    EXPECT_THROW((void)estimate_tail_index(negative), std::invalid_argument);
    const std::vector<double> few(20, 0.3);
    EXPECT_TRUE(estimate_tail_index(few).inconclusive);
    EXPECT_EQ(moment_verdict(estimate_tail_index(few), 0.1), Verdict::inconclusive);
}

TEST(Hill, UpperTailOfAPareto) {
    // T = U^(-1/1.5) has P(T > t) = t^-1.5.
    CounterRng rng(4);
    std::vector<double> t(1'000'000);
    for (auto& x : t) x = std::pow(rng.uniform(), -1.0 / 1.5);
    const auto est = estimate_upper_tail_index(t);
    EXPECT_NEAR(est.estimate, 1.5, 0.05);
    EXPECT_EQ(moment_verdict(est, 1.0), Verdict::pass);
    EXPECT_EQ(moment_verdict(est, 2.0), Verdict::fail);
}

TEST(Hill, FromLogsMatchesFromSamples) {
    const auto v = power_law_samples(0.5, 100000, 5);
    std::vector<double> logs;
    for (double x : v) logs.push_back(-std::log(x));
    const auto a = estimate_tail_index(v), b = estimate_tail_index_from_logs(logs);
    EXPECT_DOUBLE_EQ(a.estimate, b.estimate);
    EXPECT_DOUBLE_EQ(a.half_width, b.half_width);
}

TEST(Verdicts, MomentVerdictsAreMonotone) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto est = estimate_tail_index(power_law_samples(0.2 + 0.1 * static_cast<double>(s), 20000, 100 + s));
        bool finite_seen_above = false;
        for (double g = 3.0; g >= 0.0; g -= 0.01) {
            const Verdict v = moment_verdict(est, g);
            if (finite_seen_above) EXPECT_EQ(v, Verdict::pass) << "gamma " << g;
            finite_seen_above |= v == Verdict::pass;
            if (exponent_verdict(est, g) == Verdict::pass) {
                EXPECT_EQ(exponent_verdict(est, g - 0.01), Verdict::pass);
            }
        }
    }
}

TEST(Verdicts, ThreeValuedBoundaries) {
    TailIndexEstimate est;
    est.estimate = 1.0;
    est.half_width = 0.1;
    EXPECT_EQ(moment_verdict(est, 0.85), Verdict::pass);
    EXPECT_EQ(moment_verdict(est, 1.0), Verdict::inconclusive);
    EXPECT_EQ(moment_verdict(est, 1.15), Verdict::fail);
    EXPECT_EQ(exponent_verdict(est, 1.05), Verdict::pass);
    EXPECT_EQ(exponent_verdict(est, 1.15), Verdict::fail);
    EXPECT_EQ(to_string(Verdict::inconclusive), "inconclusive");
}
