#include <gtest/gtest.h>

#include <cmath>

#include "rwre/config.hpp"

using namespace rwre;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, ParsesSectionsAndTypedValues) {
    const auto cfg = ExperimentConfig::parse_string(
        "[run]\nseed = 42\nworkers = 2\n[law]\nvariant = counterexample\nbeta_perp = 0.5\n[check]\nus = 100, 1000 1e4\n");
    EXPECT_EQ(cfg.integer("run", "seed"), 42);
    EXPECT_EQ(cfg.integer("run", "missing", 7), 7);
    EXPECT_EQ(cfg.text("law", "variant"), "counterexample");
    EXPECT_EQ(cfg.numbers("check", "us"), (std::vector<double>{100, 1000, 1e4}));
    EXPECT_DOUBLE_EQ(cfg.number("law", "beta_perp"), 0.5);
    EXPECT_TRUE(cfg.has_section("law"));
    EXPECT_FALSE(cfg.has("law", "dim"));
}

TEST(Config, ErrorsNameTheOffendingKey) {
    const auto cfg = ExperimentConfig::parse_string("[run]\nseed = abc\n");
    EXPECT_EQ(error_of([&] { (void)cfg.integer("run", "seed"); }), "malformed integer for [run] seed: abc");
    EXPECT_EQ(error_of([&] { (void)cfg.text("run", "radius"); }), "missing key [run] radius");
    EXPECT_EQ(error_of([&] { (void)cfg.law(); }), "missing [law] section");
    const auto bad = ExperimentConfig::parse_string("[law]\nvariant = plaid\n");
    EXPECT_NE(error_of([&] { (void)bad.law(); }).find("[law] variant"), std::string::npos);
    const auto neg = ExperimentConfig::parse_string("[law]\nvariant = counterexample\nbeta_perp = -1\n");
    EXPECT_NE(error_of([&] { (void)neg.law(); }).find("[law]"), std::string::npos);
}

TEST(Config, HashIsCanonical) {
    const auto a = ExperimentConfig::parse_string("[b]\ny = 2\nx = 1\n[a]\nk = v\n");
    const auto b = ExperimentConfig::parse_string("[a]\nk = v\n[b]\nx = 1\ny = 2\n");
    EXPECT_EQ(a.canonical(), b.canonical());
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    auto c = a;
    c.set("b", "x", "3");
    EXPECT_NE(c.hash(), a.hash());
    // FNV-1a reference values.
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, LawVariants) {
    auto law_of = [](const std::string& body) { return ExperimentConfig::parse_string("[law]\n" + body).law(); };
    EXPECT_EQ(law_of("variant = uniform\ndim = 3\n").dim, 3);
    EXPECT_EQ(law_of("variant = symmetric\n").name(), "discrete-mixture");
    const auto det = law_of("variant = deterministic\ndirection = up\n");
    EXPECT_EQ(det.at(1, Point{})[Direction(2)], 1.0);
    const auto drift = law_of("variant = drifted\nkappa = 0.02\ndrift = -1\nweight = 0.3\n");
    const auto& d = std::get<DriftedUniformLaw>(drift.kind);
    EXPECT_EQ(d.drift, Direction(-1));
    EXPECT_DOUBLE_EQ(d.kappa, 0.02);
    const auto dir = law_of("variant = dirichlet\nalpha = 1 2 3 4\n");
    EXPECT_EQ(std::get<DirichletLaw>(dir.kind).alpha.size(), 4u);
    const auto cx = law_of("variant = counterexample\n");
    EXPECT_DOUBLE_EQ(std::get<CounterexampleLaw>(cx.kind).beta_dashv, 0.9);
}

TEST(Config, ExponentOverrides) {
    const auto cfg = ExperimentConfig::parse_string("[exponents]\nperp = 0.75\ntop = inf\n");
    const auto x = cfg.exponents(natural_exponents({0.9, 0.5, 0.25}));
    EXPECT_DOUBLE_EQ(x.get("perp"), 0.75);
    EXPECT_TRUE(std::isinf(x.get("top")));
    EXPECT_DOUBLE_EQ(x.get("dashv"), 0.9);
    const auto bad = ExperimentConfig::parse_string("[exponents]\nwiggle = 1\n");
    EXPECT_THROW((void)bad.exponents(ExponentSet{}), ConfigError);
}

TEST(Config, DirectionAndNumberParsing) {
    EXPECT_EQ(parse_direction("right"), Direction(1));
    EXPECT_EQ(parse_direction("-2"), Direction(-2));
    EXPECT_THROW((void)parse_direction("sideways"), std::invalid_argument);
    EXPECT_TRUE(std::isinf(parse_number("inf")));
    EXPECT_THROW((void)parse_number("1.5x"), std::invalid_argument);
}
