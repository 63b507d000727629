#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rwre/conditions.hpp"
#include "rwre/parallel.hpp"
#include "rwre/solver.hpp"

namespace rwre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct Frequency {
    double value = 0;
    double standard_error = 0;
};

Frequency frequency(std::size_t hits, std::size_t n) {
    if (n == 0) return {};
    const double f = static_cast<double>(hits) / static_cast<double>(n);
    return {f, std::sqrt(f * (1.0 - f) / static_cast<double>(n))};
}

}  // namespace

// ---- (B) ------------------------------------------------------------------------------------

bool b_radius_relation(double a, double b, int radius, double c) {
    if (!(b > 0.0) || !(c > 0.0)) throw std::invalid_argument("b and c must be positive");
    return (radius + 2.0) * b * c > a * (a + c);
}

std::optional<double> feasible_radius_zero_c(double eta_star) {
    for (int e = -20; e <= 20; ++e) {
        const double c = std::ldexp(1.0, e);
        if (1.0 + c < 2.0 * eta_star * c) return c;
    }
    return std::nullopt;
}

ConditionReport check_b(const SiteLaw& law, double a, double b, int radius, double c, std::uint64_t seed,
                        const BOptions& opt) {
    if (a < 1.0 || !(b > 0.0) || !(c > 0.0) || radius < 0) throw std::invalid_argument("check B needs a >= 1, b, c > 0, R >= 0");
    ConditionReport r;
    r.condition = "B";
    r.seed = seed;
    r.metrics["a"] = a;
    r.metrics["b"] = b;
    r.metrics["c"] = c;
    r.metrics["R"] = radius;

    ClauseResult rel;
    rel.name = "radius relation";
    rel.estimate = radius;
    rel.threshold = a * (a + c) / (b * c) - 2.0;
    rel.verdict = b_radius_relation(a, b, radius, c) ? Verdict::pass : Verdict::fail;
    rel.detail = "R > a(a+c)/(bc) - 2";
    r.clauses.push_back(rel);

    std::vector<double> times(opt.replicas, 1.0);
    std::vector<char> censored(opt.replicas, 0);
    parallel_for(opt.replicas, opt.workers, [&](std::size_t i) {
        LazyEnvironment env(law, derive_key(seed, {i, 1}));
        CounterRng rng(derive_key(seed, {i, 2}));
        auto inside = [&](const Point& x) { return sup_norm(x) <= radius; };
        const auto res = run_quenched(env, Point{}, StopKind::exit, inside, opt.cap, rng);
        times[i] = static_cast<double>(res.steps);
        censored[i] = res.stop.censored() ? 1 : 0;
    });
    const auto n_censored = static_cast<std::size_t>(std::count(censored.begin(), censored.end(), 1));
    ClauseResult mom;
    mom.name = "exit time moment";
    mom.threshold = a + c;
    if (opt.replicas == 0) {
        mom.verdict = Verdict::inconclusive;
        mom.detail = "no replicas";
    } else {
        const auto est = estimate_upper_tail_index(times, opt.tail);
        mom.estimate = est.estimate;
        mom.half_width = est.half_width;
        mom.verdict = moment_verdict(est, a + c);
        mom.detail = "tail index of T, k=" + std::to_string(est.k);
        const double censor_rate = static_cast<double>(n_censored) / static_cast<double>(opt.replicas);
        if (censor_rate > opt.censor_limit) {
            mom.verdict = Verdict::inconclusive;
            mom.detail += "; censored fraction " + num(censor_rate);
        }
    }
    r.clauses.push_back(mom);
    r.metrics["censored"] = static_cast<double>(n_censored);
    r.metrics["replicas"] = static_cast<double>(opt.replicas);
    r.settle();
    return r;
}

// ---- (P) ------------------------------------------------------------------------------------

ConditionReport check_p(const SiteLaw& law, double m, const Heading& l, std::span<const int> half_widths,
                        std::uint64_t seed, const POptions& opt) {
    if (!(m > 0.0) || half_widths.empty()) throw std::invalid_argument("check P needs M > 0 and at least one L");
    ConditionReport r;
    r.condition = "P";
    r.seed = seed;
    r.metrics["M"] = m;
    r.notes["scope"] = "finite-L evidence, not a proof";

    std::vector<int> ls(half_widths.begin(), half_widths.end());
    std::sort(ls.begin(), ls.end());
    std::vector<ClauseResult> all;
    for (int width : ls) {
        if (width < 2) throw std::invalid_argument("slab half-widths must be at least 2");
        const auto est = slab_exit_estimate(law, l, width, opt.replicas, derive_key(seed, {static_cast<std::uint64_t>(width)}),
                                            opt.cap, opt.workers);
        ClauseResult c;
        c.name = "L=" + std::to_string(width);
        c.estimate = est.estimate;
        c.half_width = opt.z * est.standard_error;
        c.threshold = std::pow(static_cast<double>(width), -m);
        c.verdict = est.estimate + c.half_width <= c.threshold ? Verdict::pass : Verdict::fail;
        if (est.censored > 0) {
            c.detail = "censored " + std::to_string(est.censored);
            if (est.replicas == 0) c.verdict = Verdict::inconclusive;
        }
        r.metrics["back exit L=" + std::to_string(width)] = est.estimate;
        all.push_back(c);
    }
    // L_0 opens the trailing run of passing widths; widths below it are reported as metrics only.
    std::size_t first = all.size();
    while (first > 0 && all[first - 1].verdict == Verdict::pass) --first;
    if (first == all.size()) first = 0;
    r.clauses.assign(all.begin() + static_cast<std::ptrdiff_t>(first), all.end());
    if (first < all.size() && all.back().verdict == Verdict::pass) r.metrics["L0"] = ls[first];
    r.settle();
    return r;
}

// ---- (H) ------------------------------------------------------------------------------------

ConditionReport check_h(const SiteLaw& law, std::span<const int> radii, std::span<const double> qs,
                        std::uint64_t seed, const HOptions& opt) {
    ConditionReport r;
    r.condition = "H";
    r.seed = seed;
    const int d = law.dim;
    const auto sites = sample_sites(law, opt.samples, derive_key(seed, {0}));
    std::vector<TailIndexEstimate> eta;
    std::vector<double> column(sites.size());
    for (int s = 0; s < 2 * d; ++s) {
        for (std::size_t i = 0; i < sites.size(); ++i) column[i] = sites[i].slot(s);
        eta.push_back(estimate_tail_index(column, opt.tail));
    }

    for (int axis = 0; axis < d; ++axis) {
        int best = -1;
        for (int s = 0; s < 2 * d; ++s) {
            if (s / 2 == axis || eta[static_cast<std::size_t>(s)].inconclusive) continue;
            if (best < 0 || eta[static_cast<std::size_t>(s)].estimate > eta[static_cast<std::size_t>(best)].estimate) best = s;
        }
        const std::string tag = "axis " + std::to_string(axis + 1);
        if (best < 0) {
            r.clauses.push_back({tag + " exponent", Verdict::inconclusive, 0, 0, 0, "no conclusive orthogonal exponent"});
            continue;
        }
        const double eta_tilde = eta[static_cast<std::size_t>(best)].estimate;
        const double gamma = std::min(eta_tilde, opt.tail.bounded_cap) * (1.0 - opt.margin);
        double moment = 0;
        for (const auto& w : sites) moment += std::pow(w.slot(best), -gamma);
        moment /= static_cast<double>(sites.size());
        r.metrics[tag + " eta_tilde"] = eta_tilde;
        r.metrics[tag + " gamma"] = gamma;
        r.metrics[tag + " C"] = moment;
        r.notes[tag + " direction"] = Direction::from_slot(best).name();

        for (int radius : radii) {
            std::vector<double> p(opt.environments);
            parallel_for(opt.environments, opt.workers, [&](std::size_t e) {
                const auto env = sample_window(law, Box::ball(d, radius),
                                               derive_key(seed, {1, static_cast<std::uint64_t>(radius), e}));
                p[e] = directional_escape_probability(env, axis, radius);
            });
            for (double q : qs) {
                const auto hits = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= q; }));
                const auto f = frequency(hits, p.size());
                ClauseResult c;
                c.name = tag + " R=" + std::to_string(radius) + " q=" + num(q);
                c.estimate = f.value;
                c.half_width = opt.z * f.standard_error;
                c.threshold = std::pow(q, gamma) * std::pow(moment, radius);
                c.verdict = f.value - c.half_width <= c.threshold ? Verdict::pass : Verdict::fail;
                c.detail = "frequency of directional escape <= q";
                r.clauses.push_back(c);
            }
        }
    }
    r.settle();
    return r;
}

// ---- attainability --------------------------------------------------------------------------

ConditionReport estimate_attainability(const SiteLaw& law, double b, double eps, std::span<const double> deltas,
                                       double delta_prime, std::span<const double> us, std::uint64_t seed,
                                       const AttainabilityOptions& opt) {
    ConditionReport r;
    r.condition = "attainability";
    r.seed = seed;
    r.metrics["b"] = b;
    r.metrics["eps"] = eps;
    r.metrics["delta_prime"] = delta_prime;
    for (std::size_t ui = 0; ui < us.size(); ++ui) {
        const double u = us[ui];
        if (!(u > 1.0)) throw std::invalid_argument("attainability needs u > 1");
        const int rho = std::max(1, static_cast<int>(std::ceil(delta_prime * std::log(u))));
        if (rho > opt.max_radius) {
            throw std::invalid_argument("radius " + std::to_string(rho) + " for u=" + num(u) + " exceeds the solver budget of " +
                                        std::to_string(opt.max_radius));
        }
        std::vector<double> m(opt.environments);
        parallel_for(opt.environments, opt.workers, [&](std::size_t e) {
            const auto env = sample_window(law, Box::ball(law.dim, rho), derive_key(seed, {ui, e}));
            m[e] = max_hitting_probability(env, rho, opt.norm).max_probability;
        });
        r.metrics["radius u=" + num(u)] = rho;
        for (double delta : deltas) {
            const double level = std::pow(u, -(b + 2.0 * delta) / (b + eps));
            const auto hits = static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [&](double v) { return v <= level; }));
            const auto f = frequency(hits, m.size());
            ClauseResult c;
            c.name = "u=" + num(u) + " delta=" + num(delta);
            c.estimate = f.value;
            c.half_width = opt.z * f.standard_error;
            c.threshold = std::pow(u, -(b + delta));
            c.verdict = f.value - c.half_width <= c.threshold ? Verdict::pass : Verdict::fail;
            c.detail = "radius " + std::to_string(rho) + ", level " + num(level);
            r.clauses.push_back(c);
        }
    }
    r.settle();
    return r;
}

// ---- wedge trap -----------------------------------------------------------------------------

double wedge_escape_probability(const TransitionVector& at0, const TransitionVector& at_e1, const TransitionVector& at_e2) {
    const Direction right(1), left(-1), up(2), down(-2);
    return at0[left] + at0[down] + at0[right] * (1.0 - at_e1[left]) + at0[up] * (1.0 - at_e2[down]);
}

WedgeResult wedge_experiment(const SiteLaw& law, std::uint64_t seed, const WedgeOptions& opt) {
    if (law.dim != 2) throw std::invalid_argument("the wedge experiment is planar");
    const Direction right(1), left(-1), up(2), down(-2);
    const Point e1(1, 0), e2(0, 1);
    const auto* cx = std::get_if<CounterexampleLaw>(&law.kind);

    WedgeResult out;
    out.target = cx ? (cx->beta_dashv + cx->beta_perp) / 2.0 + cx->beta_vdash : std::numeric_limits<double>::quiet_NaN();
    out.visits.assign(opt.replicas, 0);
    std::vector<double> escape(opt.replicas);
    std::vector<char> trapped(opt.replicas, 0), censored(opt.replicas, 0);

    parallel_for(opt.replicas, opt.workers, [&](std::size_t i) {
        const std::uint64_t env_seed = derive_key(seed, {i, 1});
        const auto w0 = law.at(env_seed, Point{});
        const auto w1 = law.at(env_seed, e1);
        const auto w2 = law.at(env_seed, e2);
        escape[i] = wedge_escape_probability(w0, w1, w2);
        if (cx) {
            const auto type_at = [&](const Point& x) { return counterexample_type(CounterRng(site_key(env_seed, x)).uniform()); };
            trapped[i] = type_at(Point{}) == SiteType::I && type_at(e1) == SiteType::III && type_at(e2) == SiteType::II;
        }
        // Walk on W = {0, e1, e2}: from e1 only a left step stays in W, from e2 only a down step.
        CounterRng rng(derive_key(seed, {i, 2}));
        std::uint64_t visits = 0, steps = 0;
        for (;;) {
            ++visits;
            const double u = rng.uniform();
            double back = 0;
            if (u <= w0[right]) {
                back = w1[left];
            } else if (u <= w0[right] + w0[up]) {
                back = w2[down];
            } else {
                break;
            }
            steps += 2;
            if (rng.uniform() > back) break;
            if (steps >= opt.cap) {
                censored[i] = 1;
                break;
            }
        }
        out.visits[i] = visits;
    });

    out.censored = static_cast<std::uint64_t>(std::count(censored.begin(), censored.end(), 1));
    out.trap_frequency = opt.replicas == 0
                             ? 0.0
                             : static_cast<double>(std::count(trapped.begin(), trapped.end(), 1)) / static_cast<double>(opt.replicas);
    if (opt.replicas > 0) {
        std::vector<double> n(out.visits.begin(), out.visits.end());
        out.visits_index = estimate_upper_tail_index(n, opt.tail);
        out.escape_index = estimate_tail_index(escape, opt.tail);
        if (static_cast<double>(out.censored) > opt.censor_limit * static_cast<double>(opt.replicas)) {
            out.visits_index.inconclusive = true;
        }
    }
    return out;
}

// ---- tail chain for N_{B_R}(0) ---------------------------------------------------------------

ConditionReport nbr_tail_chain(const SiteLaw& law, double a, double eps, int radius, std::span<const double> ns,
                               std::uint64_t seed, const TailChainOptions& opt) {
    if (radius < 0 || !(opt.delta < eps) || ns.empty()) throw std::invalid_argument("tail chain needs R >= 0, delta < eps and n values");
    ConditionReport r;
    r.condition = "tail chain";
    r.seed = seed;
    r.metrics["a"] = a;
    r.metrics["eps"] = eps;
    r.metrics["delta"] = opt.delta;
    r.metrics["R"] = radius;

    std::vector<double> escape(opt.environments), hit(opt.environments);
    parallel_for(opt.environments, opt.workers, [&](std::size_t e) {
        const auto env = sample_window(law, Box::ball(law.dim, radius + 1), derive_key(seed, {e, 1}));
        escape[e] = escape_probability(env, radius + 1);
        hit[e] = max_hitting_probability(env, radius + 1).max_probability;
    });

    std::vector<double> sorted(ns.begin(), ns.end());
    std::sort(sorted.begin(), sorted.end());
    const double n_env = static_cast<double>(opt.environments);
    std::optional<double> fitted;
    for (double n : sorted) {
        const double level = std::pow(n, -(a + opt.delta) / (a + eps));
        const double term1 = std::exp(-std::pow(n, (eps - opt.delta) / (a + eps)));
        double tail = 0, outside = 0;
        std::size_t in_a = 0;
        for (std::size_t e = 0; e < opt.environments; ++e) {
            const double stay = std::pow(1.0 - escape[e], n + 1.0);  // P(N > n), N counting returns
            tail += stay;
            if (hit[e] <= level) {
                ++in_a;
            } else {
                outside += stay;
            }
        }
        tail /= n_env;
        outside /= n_env;
        const auto fa = frequency(in_a, opt.environments);
        if (!fitted) fitted = fa.value * std::pow(n, a + opt.delta);
        const double term2 = *fitted * std::pow(n, -(a + opt.delta));
        const std::string tag = "n=" + num(n);

        ClauseResult c1;
        c1.name = tag + " off event";
        c1.estimate = outside;
        c1.threshold = term1;
        c1.verdict = outside <= term1 ? Verdict::pass : Verdict::fail;
        c1.detail = "P(N > n, max hitting above level)";
        r.clauses.push_back(c1);

        ClauseResult c2;
        c2.name = tag + " event";
        c2.estimate = fa.value;
        c2.half_width = 3.0 * fa.standard_error;
        c2.threshold = term2;
        c2.verdict = fa.value - c2.half_width <= term2 ? Verdict::pass : Verdict::fail;
        c2.detail = "P(max hitting <= level)";
        r.clauses.push_back(c2);

        r.metrics["P(N>n) " + tag] = tail;
        r.metrics["bound " + tag] = term1 + term2;
    }
    r.metrics["C"] = fitted.value_or(0.0);
    r.settle();
    return r;
}

}  // namespace rwre
