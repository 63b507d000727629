#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "output.hpp"
#include "rwre/conditions.hpp"
#include "rwre/exploration.hpp"
#include "rwre/flows.hpp"
#include "rwre/parallel.hpp"
#include "rwre/solver.hpp"
#include "rwre/walk.hpp"

namespace rwre::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::pass: return 0;
        case Verdict::fail: return 1;
        case Verdict::inconclusive: return 2;
    }
    return kExitError;
}

std::uint64_t RunContext::master_seed() const {
    if (!seed) throw ConfigError("missing key [run] seed");
    return *seed;
}

RunContext make_context(const std::string& config_path, const Overrides& overrides) {
    RunContext ctx;
    ctx.config = ExperimentConfig::load(config_path);
    ctx.config_dir = fs::path(config_path).parent_path();
    if (overrides.seed) ctx.config.set("run", "seed", std::to_string(*overrides.seed));
    if (ctx.config.has("run", "seed")) {
        const auto s = ctx.config.integer("run", "seed");
        if (s < 0) throw ConfigError("negative value for [run] seed");
        ctx.seed = static_cast<std::uint64_t>(s);
    }
    ctx.workers = overrides.workers ? *overrides.workers : static_cast<int>(ctx.config.integer("run", "workers", 1));
    if (ctx.workers < 1) throw ConfigError("non-positive value for [run] workers");
    ctx.out_dir = overrides.out ? fs::path(*overrides.out) : fs::path(ctx.config.text("run", "out", "."));
    ExperimentConfig hashed = ctx.config;
    hashed.erase("run", "workers");
    hashed.erase("run", "out");
    ctx.config_hash = hashed.hash();
    fs::create_directories(ctx.out_dir);
    return ctx;
}

namespace {

Stamp stamp(const RunContext& ctx, const std::string& condition) {
    return {condition, ctx.config_hash, ctx.seed.value_or(0)};
}

std::string comment_text(const Stamp& s) { return s.comment().substr(2); }

int to_int(const ExperimentConfig& cfg, const std::string& section, const std::string& key, double v) {
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("expected integers for " + ("[" + section + "] " + key));
    }
    return static_cast<int>(v);
}

std::vector<int> integers(const ExperimentConfig& cfg, const std::string& section, const std::string& key,
                          std::vector<double> fallback) {
    std::vector<int> out;
    for (double v : cfg.numbers(section, key, std::move(fallback))) out.push_back(to_int(cfg, section, key, v));
    return out;
}

std::uint64_t count(const ExperimentConfig& cfg, const std::string& section, const std::string& key, std::int64_t fallback) {
    const auto v = cfg.integer(section, key, fallback);
    if (v < 0) throw ConfigError("negative value for [" + section + "] " + key);
    return static_cast<std::uint64_t>(v);
}

/// Exponents for (X) and the exploration: the counterexample's natural set, overridden by [exponents];
/// other laws must list all eight aliases.
ExponentSet exponents_for(const ExperimentConfig& cfg, const SiteLaw& law) {
    if (const auto* cx = std::get_if<CounterexampleLaw>(&law.kind)) return cfg.exponents(natural_exponents(*cx));
    for (const auto& alias : ExponentSet::aliases()) {
        if (!cfg.has("exponents", alias)) throw ConfigError("missing key [exponents] " + alias);
    }
    return cfg.exponents(ExponentSet{});
}

Heading heading_for(const ExperimentConfig& cfg, const std::string& section, int dim) {
    const std::string text = cfg.text(section, "heading", "+1");
    try {
        return Heading::axis(dim, parse_direction(text));
    } catch (const std::invalid_argument&) {
        const auto v = cfg.numbers(section, "heading");
        if (static_cast<int>(v.size()) != dim) throw ConfigError("heading needs " + std::to_string(dim) + " entries: [" + section + "] heading");
        return Heading(v);
    }
}

json estimate_json(const TailIndexEstimate& e) {
    return {{"estimate", json_number(e.estimate)}, {"half_width", json_number(e.half_width)}, {"k", e.k},
            {"n", e.n}, {"inconclusive", e.inconclusive}};
}

json stamped(const Stamp& s) { return {{"condition", s.condition}, {"config_hash", s.config_hash}, {"seed", s.seed}}; }

std::string site_text(const Point& p, int dim) { return to_string(p, dim); }

}  // namespace

// ---- check ----------------------------------------------------------------------------------

int cmd_check(const RunContext& ctx, const std::string& condition) {
    const auto& cfg = ctx.config;
    const SiteLaw law = cfg.law();
    const std::uint64_t seed = ctx.master_seed();
    ConditionReport report;
    if (condition == "e0") {
        report = check_e0(law, count(cfg, "check", "samples", 1'000'000), seed);
    } else if (condition == "x") {
        XOptions opt;
        opt.rescue_search = cfg.integer("check", "rescue", 1) != 0;
        report = check_x(law, cfg.number("check", "a", 1.0), exponents_for(cfg, law), count(cfg, "check", "samples", 1'000'000),
                         seed, opt);
    } else if (condition == "b") {
        BOptions opt;
        opt.replicas = count(cfg, "check", "replicas", 20'000);
        opt.cap = count(cfg, "check", "cap", 10'000'000);
        opt.workers = ctx.workers;
        const double b = cfg.has("check", "b") ? cfg.number("check", "b") : cfg.number("check", "eta_star");
        report = check_b(law, cfg.number("check", "a", 1.0), b, static_cast<int>(cfg.integer("check", "R")),
                         cfg.number("check", "c"), seed, opt);
    } else if (condition == "p") {
        POptions opt;
        opt.replicas = count(cfg, "check", "replicas", 10'000);
        opt.cap = count(cfg, "check", "cap", 100'000'000);
        opt.workers = ctx.workers;
        const auto widths = integers(cfg, "check", "L", {5, 10, 20});
        report = check_p(law, cfg.number("check", "M", 2.0), heading_for(cfg, "check", law.dim), widths, seed, opt);
    } else if (condition == "h") {
        HOptions opt;
        opt.samples = count(cfg, "check", "samples", 200'000);
        opt.environments = count(cfg, "check", "environments", 500);
        opt.workers = ctx.workers;
        const auto radii = integers(cfg, "check", "radii", {2, 3});
        const auto qs = cfg.numbers("check", "qs", {0.5, 0.1, 0.01});
        report = check_h(law, radii, qs, seed, opt);
    } else if (condition == "attain") {
        AttainabilityOptions opt;
        opt.environments = count(cfg, "check", "environments", 200);
        opt.norm = parse_norm(cfg.text("check", "norm", "sup"));
        opt.workers = ctx.workers;
        const auto deltas = cfg.numbers("check", "deltas", {0.1});
        const auto us = cfg.numbers("check", "us", {100, 1000, 10000});
        report = estimate_attainability(law, cfg.number("check", "b", 1.0), cfg.number("check", "eps", 0.5), deltas,
                                        cfg.number("check", "delta_prime", 0.5), us, seed, opt);
    } else {
        throw ConfigError("unknown condition " + condition);
    }
    report.seed = seed;
    report.config_hash = ctx.config_hash;
    const Stamp s = stamp(ctx, report.condition);
    write_text(ctx.out_dir / ("check_" + condition + ".json"), report.to_json() + "\n");
    write_clauses_csv(ctx.out_dir / ("check_" + condition + ".csv"), s, report);
    for (const auto& c : report.clauses) {
        if (c.verdict != Verdict::pass) std::cout << to_string(c.verdict) << ": " << c.name << "\n";
    }
    std::cout << report.condition << ": " << to_string(report.verdict) << "\n";
    return exit_code(report.verdict);
}

// ---- explore --------------------------------------------------------------------------------

int cmd_explore(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    const SiteLaw law = cfg.law();
    const std::uint64_t seed = ctx.master_seed();
    const int radius = static_cast<int>(cfg.integer("explore", "radius"));
    const double a = cfg.number("explore", "a", 1.0);
    const ExponentSet x = exponents_for(cfg, law);
    const auto env = sample_window(law, Box::ball(law.dim, radius), seed);
    const auto g = explore(env, radius);
    const auto report = verify_flow_strength(g, x, a);
    const auto cap = assign_capacities(g, x);
    const Stamp s = stamp(ctx, "exit strategy");

    {
        std::ofstream out(ctx.out_dir / "explore_graph.csv", std::ios::binary);
        write_exit_strategy(out, g, &x, comment_text(s));
    }
    {
        std::ofstream out(ctx.out_dir / "explore_capacities.txt", std::ios::binary);
        write_edge_list(out, g.graph(), cap, comment_text(s));
    }
    json summary = stamped(s);
    summary["radius"] = radius;
    summary["a"] = a;
    summary["companion"] = site_text(g.companion, 2);
    summary["bifurcations"] = g.bifurcations;
    summary["edges"] = g.edges.size();
    summary["max_flow"] = json_number(report.max_flow);
    summary["required"] = report.required;
    summary["margin"] = report.margin ? json(*report.margin) : json(nullptr);
    summary["verdict"] = report.pass ? "pass" : "fail";
    summary["diagnostic"] = report.diagnostic;
    json cut = json::array();
    for (std::size_t e : report.min_cut) {
        cut.push_back({{"tail", site_text(g.edges[e].tail, 2)}, {"head", site_text(g.edges[e].head, 2)},
                       {"capacity", json_number(cap[e])}});
    }
    summary["min_cut"] = cut;
    json relations = json::array();
    json violated = json::array();
    for (const auto& r : check_relations(x, a)) {
        relations.push_back({{"name", r.name}, {"value", json_number(r.value)}, {"holds", r.holds}});
        if (!r.holds) violated.push_back(r.name);
    }
    summary["relations"] = relations;
    summary["violated_relations"] = violated;
    write_json(ctx.out_dir / "explore_summary.json", summary);

    std::cout << "max flow " << format_number(report.max_flow) << ", required " << format_number(report.required) << "\n";
    for (const auto& v : violated) std::cout << "violated relation: " << v.get<std::string>() << "\n";
    std::cout << "exit strategy: " << (report.pass ? "pass" : "fail") << "\n";
    return report.pass ? 0 : 1;
}

// ---- simulate -------------------------------------------------------------------------------

namespace {

int simulate_walk(const RunContext& ctx, const SiteLaw& law, std::uint64_t seed) {
    const auto& cfg = ctx.config;
    const std::uint64_t replicas = count(cfg, "simulate", "replicas", 1000);
    const int radius = static_cast<int>(cfg.integer("simulate", "radius"));
    const std::uint64_t cap = count(cfg, "simulate", "cap", 10'000'000);
    std::vector<WalkResult> runs(replicas);
    parallel_for(replicas, ctx.workers, [&](std::size_t r) {
        LazyEnvironment env(law, derive_key(seed, {r, 1}));
        CounterRng rng(derive_key(seed, {r, 2}));
        runs[r] = run_quenched(env, Point{}, StopKind::exit, [&](const Point& x) { return sup_norm(x) <= radius; }, cap, rng);
    });
    const Stamp s = stamp(ctx, "walk");
    CsvWriter csv(ctx.out_dir / "simulate_walk.csv", s, {"replica", "exit_time", "censored", "exit_site"});
    std::vector<double> times;
    std::uint64_t censored = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        csv.cell(static_cast<std::uint64_t>(r)).cell(runs[r].steps).cell(runs[r].stop.censored() ? "1" : "0");
        csv.cell(site_text(runs[r].stop.position, law.dim)).end_row();
        times.push_back(static_cast<double>(runs[r].steps));
        censored += runs[r].stop.censored() ? 1 : 0;
    }
    json summary = stamped(s);
    summary["radius"] = radius;
    summary["replicas"] = replicas;
    summary["censored_fraction"] = replicas ? static_cast<double>(censored) / static_cast<double>(replicas) : 0.0;
    if (!times.empty()) {
        double mean = 0, sq = 0;
        for (double t : times) mean += t;
        mean /= static_cast<double>(times.size());
        for (double t : times) sq += (t - mean) * (t - mean);
        summary["mean_exit_time"] = mean;
        summary["standard_error"] = times.size() > 1 ? std::sqrt(sq / static_cast<double>(times.size() - 1) / static_cast<double>(times.size())) : 0.0;
        summary["upper_tail_index"] = estimate_json(estimate_upper_tail_index(times));
    }
    write_json(ctx.out_dir / "simulate_walk.json", summary);
    return 0;
}

int simulate_wedge(const RunContext& ctx, const SiteLaw& law, std::uint64_t seed) {
    const auto& cfg = ctx.config;
    WedgeOptions opt;
    opt.replicas = count(cfg, "simulate", "replicas", 100'000);
    opt.cap = count(cfg, "simulate", "cap", 1'000'000'000);
    opt.workers = ctx.workers;
    const auto res = wedge_experiment(law, seed, opt);
    const Stamp s = stamp(ctx, "wedge");
    CsvWriter csv(ctx.out_dir / "simulate_wedge.csv", s, {"replica", "visits"});
    for (std::size_t r = 0; r < res.visits.size(); ++r) csv.cell(static_cast<std::uint64_t>(r)).cell(res.visits[r]).end_row();
    json summary = stamped(s);
    summary["replicas"] = opt.replicas;
    summary["visits_index"] = estimate_json(res.visits_index);
    summary["escape_index"] = estimate_json(res.escape_index);
    summary["target_index"] = json_number(res.target);
    summary["trap_frequency"] = res.trap_frequency;
    summary["censored"] = res.censored;
    if (opt.replicas > 0) {
        const Verdict v = moment_verdict(res.visits_index, 1.0);
        summary["mean_visits"] = v == Verdict::pass ? "finite" : v == Verdict::fail ? "infinite" : "inconclusive";
    }
    write_json(ctx.out_dir / "simulate_wedge.json", summary);
    return 0;
}

int simulate_slab(const RunContext& ctx, const SiteLaw& law, std::uint64_t seed) {
    const auto& cfg = ctx.config;
    const auto widths = integers(cfg, "simulate", "L", {5, 10, 20});
    const std::uint64_t replicas = count(cfg, "simulate", "replicas", 10'000);
    const std::uint64_t cap = count(cfg, "simulate", "cap", 100'000'000);
    const Heading l = heading_for(cfg, "simulate", law.dim);
    const Stamp s = stamp(ctx, "slab");
    CsvWriter csv(ctx.out_dir / "simulate_slab.csv", s, {"half_width", "back_exit", "standard_error", "replicas", "censored"});
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const auto est = slab_exit_estimate(law, l, widths[i], replicas, derive_key(seed, {i}), cap, ctx.workers);
        csv.cell(widths[i]).cell(est.estimate).cell(est.standard_error).cell(est.replicas).cell(est.censored).end_row();
    }
    return 0;
}

int simulate_regen(const RunContext& ctx, const SiteLaw& law, std::uint64_t seed) {
    const auto& cfg = ctx.config;
    const std::uint64_t replicas = count(cfg, "simulate", "replicas", 1000);
    const std::uint64_t horizon = count(cfg, "simulate", "horizon", 10'000);
    const Heading l = heading_for(cfg, "simulate", law.dim);
    const auto res = regeneration_experiment(law, l, horizon, replicas, seed, ctx.workers);
    const Stamp s = stamp(ctx, "regeneration");
    CsvWriter csv(ctx.out_dir / "simulate_regen.csv", s, {"sample", "tau1"});
    for (std::size_t i = 0; i < res.tau1.size(); ++i) csv.cell(static_cast<std::uint64_t>(i)).cell(res.tau1[i]).end_row();
    json summary = stamped(s);
    summary["replicas"] = replicas;
    summary["horizon"] = horizon;
    summary["undetected"] = res.undetected;
    json tail = json::array();
    for (std::uint64_t u = 1; u <= horizon && replicas > 0; u *= 2) {
        const auto above = static_cast<std::uint64_t>(std::count_if(res.tau1.begin(), res.tau1.end(), [&](std::uint64_t t) { return t > u; }));
        tail.push_back({{"u", u}, {"P(tau1>u)", static_cast<double>(above + res.undetected) / static_cast<double>(replicas)}});
    }
    summary["tail"] = tail;
    write_json(ctx.out_dir / "simulate_regen.json", summary);
    return 0;
}

}  // namespace

int cmd_simulate(const RunContext& ctx, const std::string& kind) {
    const SiteLaw law = ctx.config.law();
    const std::uint64_t seed = ctx.master_seed();
    if (kind == "walk") return simulate_walk(ctx, law, seed);
    if (kind == "wedge") return simulate_wedge(ctx, law, seed);
    if (kind == "slab") return simulate_slab(ctx, law, seed);
    if (kind == "regen") return simulate_regen(ctx, law, seed);
    throw ConfigError("unknown simulation " + kind);
}

// ---- maxflow --------------------------------------------------------------------------------

int cmd_maxflow(const RunContext& ctx) {
    fs::path path = ctx.config.text("maxflow", "edges");
    if (path.is_relative()) path = ctx.config_dir / path;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file named by [maxflow] edges: " + path.string());
    const EdgeList net = read_edge_list(in);
    if (net.terminals.sources.empty() || net.terminals.sinks.empty()) {
        throw ConfigError("edge list needs source and sink lines: [maxflow] edges");
    }
    const auto mf = max_flow(net.graph, net.capacity, net.terminals);
    const auto dec = decompose_flow(net.graph, mf.flow, net.terminals);
    const Stamp s = stamp(ctx, "max flow");
    {
        std::ofstream out(ctx.out_dir / "maxflow_flow.txt", std::ios::binary);
        write_edge_list(out, net.graph, mf.flow.values, comment_text(s));
    }
    CsvWriter csv(ctx.out_dir / "maxflow_paths.csv", s, {"path", "weight", "sites"});
    for (std::size_t k = 0; k < dec.paths.size(); ++k) {
        std::string sites;
        for (const auto& p : dec.paths[k].sites) sites += (sites.empty() ? "" : " ") + site_text(p, 2);
        csv.cell(static_cast<std::uint64_t>(k)).cell(dec.paths[k].weight).cell(sites).end_row();
    }
    json summary = stamped(s);
    summary["value"] = json_number(mf.value);
    summary["cut_capacity"] = json_number(mf.cut_capacity(net.capacity));
    json cut = json::array();
    for (std::size_t e : mf.min_cut) {
        const auto [u, v] = net.graph.edge(e);
        cut.push_back({{"tail", site_text(net.graph.vertex(u), 2)}, {"head", site_text(net.graph.vertex(v), 2)},
                       {"capacity", json_number(net.capacity[e])}});
    }
    summary["min_cut"] = cut;
    summary["paths"] = dec.paths.size();
    write_json(ctx.out_dir / "maxflow.json", summary);
    std::cout << "max flow " << format_number(mf.value) << "\n";
    return 0;
}

// ---- solve ----------------------------------------------------------------------------------

int cmd_solve(const RunContext& ctx) {
    const auto& cfg = ctx.config;
    const SiteLaw law = cfg.law();
    const std::uint64_t seed = ctx.master_seed();
    const int radius = static_cast<int>(cfg.integer("solve", "radius"));
    if (radius < 0) throw ConfigError("negative value for [solve] radius");
    const std::string quantity = cfg.text("solve", "quantity", "escape");
    const auto env = sample_window(law, Box::ball(law.dim, radius + 1), seed);
    const Stamp s = stamp(ctx, quantity);
    json summary = stamped(s);
    summary["radius"] = radius;
    double value = 0;
    if (quantity == "escape") {
        value = escape_probability(env, radius);
    } else if (quantity == "returns") {
        value = expected_return_count(env, radius);
    } else if (quantity == "exit_time") {
        value = expected_exit_time(env, radius);
    } else if (quantity == "exit_time_second_moment") {
        value = exit_time_second_moment(env, radius);
    } else if (quantity == "max_hitting") {
        const auto prof = max_hitting_probability(env, radius, parse_norm(cfg.text("solve", "norm", "sup")));
        value = prof.max_probability;
        summary["argmax"] = site_text(prof.argmax, law.dim);
    } else if (quantity == "directional") {
        value = directional_escape_probability(env, static_cast<int>(cfg.integer("solve", "axis", 0)), radius);
    } else {
        throw ConfigError("unknown value for [solve] quantity: " + quantity);
    }
    summary["quantity"] = quantity;
    summary["value"] = json_number(value);
    write_json(ctx.out_dir / "solve.json", summary);
    std::ofstream out(ctx.out_dir / "solve_environment.csv", std::ios::binary);
    write_environment_csv(out, env, comment_text(s));
    std::cout << quantity << " " << format_number(value) << "\n";
    return 0;
}

}  // namespace rwre::cli
