#include "rwre/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace rwre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::size_t default_k(std::size_t n, const TailOptions& opt) {
    return opt.k.value_or(static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 2.0 / 3.0))));
}

}  // namespace

std::vector<TransitionVector> sample_sites(const SiteLaw& law, std::size_t n, std::uint64_t seed) {
    std::vector<TransitionVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(law.at(seed, Point(static_cast<int>(i), 0)));
    return out;
}

// ---- (E)_0 ----------------------------------------------------------------------------------

DirectionalSingularities estimate_directional_singularities(const SiteLaw& law, std::size_t samples,
                                                            std::uint64_t seed, const TailOptions& opt) {
    const auto sites = sample_sites(law, samples, seed);
    DirectionalSingularities out;
    std::vector<double> v(sites.size());
    for (int s = 0; s < 2 * law.dim; ++s) {
        for (std::size_t i = 0; i < sites.size(); ++i) v[i] = sites[i].slot(s);
        out.by_slot.push_back(estimate_tail_index(v, opt));
    }
    return out;
}

double compute_eta_star(std::span<const double> eta_by_slot) {
    if (eta_by_slot.size() % 2 != 0 || eta_by_slot.empty()) throw std::invalid_argument("need 2d exponents");
    const int n = static_cast<int>(eta_by_slot.size());
    double best = -kInf;
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            if (s / 2 == t / 2) continue;
            best = std::max(best, std::min(eta_by_slot[static_cast<std::size_t>(s)], eta_by_slot[static_cast<std::size_t>(t)]));
        }
    }
    return best;
}

ConditionReport check_e0(const SiteLaw& law, std::size_t samples, std::uint64_t seed, const TailOptions& opt) {
    ConditionReport r;
    r.condition = "E0";
    r.seed = seed;
    const auto eta = estimate_directional_singularities(law, samples, seed, opt);
    std::vector<double> point;
    for (int s = 0; s < 2 * law.dim; ++s) {
        const auto& e = eta.by_slot[static_cast<std::size_t>(s)];
        ClauseResult c;
        c.name = "eta " + Direction::from_slot(s).name();
        c.estimate = e.estimate;
        c.half_width = e.half_width;
        c.threshold = 0;
        if (e.inconclusive) {
            c.verdict = Verdict::inconclusive;
        } else if (e.estimate - e.half_width > 0.0) {
            c.verdict = Verdict::pass;
        } else {
            c.verdict = e.estimate == 0.0 ? Verdict::fail : Verdict::inconclusive;
        }
        c.detail = "k=" + std::to_string(e.k);
        r.clauses.push_back(c);
        point.push_back(e.estimate);
        r.metrics["eta " + Direction::from_slot(s).name()] = e.estimate;
    }
    r.metrics["eta_star"] = compute_eta_star(point);
    r.metrics["samples"] = static_cast<double>(samples);
    r.settle();
    return r;
}

// ---- (X)_a ----------------------------------------------------------------------------------

QSingularities estimate_q_singularities(std::span<const TransitionVector> sites, const TailOptions& opt) {
    QSingularities out;
    std::vector<double> v(sites.size());
    for (const auto& alias : ExponentSet::aliases()) {
        const QSubset q = QSubset::parse(alias);
        for (std::size_t i = 0; i < sites.size(); ++i) v[i] = q_variable(sites[i], q);
        out.by_alias[alias] = estimate_tail_index(v, opt);
    }
    return out;
}

namespace {

const Direction kRight(1), kLeft(-1), kUp(2), kDown(-2);
const std::array<Direction, 4> kPlanar{kRight, kLeft, kUp, kDown};

std::string alias_of(const QSubset& q) {
    for (const auto& a : ExponentSet::aliases()) {
        if (QSubset::parse(a) == q) return a;
    }
    return q.name();
}

/// -log Q for every alias, sample-major in alias order.
class QTable {
public:
    QTable(std::span<const TransitionVector> sites) : n_(sites.size()) {
        const auto aliases = ExponentSet::aliases();
        for (std::size_t a = 0; a < 8; ++a) {
            const QSubset q = QSubset::parse(aliases[a]);
            auto& col = cols_[a];
            col.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                const double v = q_variable(sites[i], q);
                col[i] = v > 0.0 ? -std::log(v) : kInf;
            }
        }
    }
    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] const std::vector<double>& column(std::size_t alias) const { return cols_[alias]; }

private:
    std::size_t n_;
    std::array<std::vector<double>, 8> cols_;
};

std::size_t alias_index(const std::string& name) {
    const auto aliases = ExponentSet::aliases();
    for (std::size_t a = 0; a < 8; ++a) {
        if (aliases[a] == name) return a;
    }
    throw std::invalid_argument("unknown alias " + name);
}

std::size_t t_alias(Direction j) { return alias_index(alias_of(QSubset::t_shape(2, j))); }
std::size_t corner_alias(Direction i, Direction j) { return alias_index(alias_of(QSubset::corner(2, i, j))); }

TailIndexEstimate restricted_index(const QTable& q, const std::vector<std::uint32_t>& event, std::size_t f,
                                   const TailOptions& opt) {
    std::vector<double> logs;
    logs.reserve(event.size());
    for (std::uint32_t i : event) logs.push_back(q.column(f)[i]);
    return estimate_tail_index_from_logs(std::move(logs), opt);
}

struct ProductOutcome {
    Verdict verdict = Verdict::inconclusive;
    TailIndexEstimate index;
    std::string detail;
};

/// Evaluates product clauses sum_f b_f (-log Q_f) on an event, read through the tail index of
/// the product at level 1. Only samples that can reach the top k + 1 order statistics are kept:
/// the sum lies between (b1 + b2) min(l1, l2) and (b1 + b2) max(l1, l2), so the candidate set
/// does not depend on the exponents and is cached per (event, factors).
class ProductEvaluator {
public:
    ProductEvaluator(const QTable& q, const XOptions& opt) : q_(q), opt_(opt) {}

    /// An infinite exponent is admissible only when its Q-variable is bounded below on the event.
    ProductOutcome evaluate(const std::vector<std::uint32_t>& event, std::size_t f1, double b1, std::size_t f2,
                            double b2) {
        ProductOutcome out;
        if (event.empty()) {
            out.verdict = Verdict::pass;
            out.detail = "event not observed";
            out.index.estimate = kInf;
            return out;
        }
        if (event.size() < opt_.min_event_samples) {
            out.verdict = Verdict::inconclusive;
            out.detail = "event observed " + std::to_string(event.size()) + " times";
            out.index.estimate = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
        for (auto [f, b] : {std::pair{f1, b1}, std::pair{f2, b2}}) {
            if (!std::isinf(b)) continue;
            const auto alone = restricted_index(q_, event, f, opt_.tail);
            if (!alone.bounded_below()) {
                out.verdict = alone.inconclusive ? Verdict::inconclusive : Verdict::fail;
                out.index = alone;
                out.detail = "infinite exponent on a Q-variable that is not bounded below";
                return out;
            }
        }
        const double c1 = std::isinf(b1) ? 0.0 : b1;
        const double c2 = std::isinf(b2) ? 0.0 : b2;
        if (c1 == 0.0 && c2 == 0.0) {
            out.verdict = Verdict::pass;
            out.index.estimate = kInf;
            out.detail = "all factors bounded below";
            return out;
        }
        out.index = index(event, f1, c1, f2, c2);
        out.verdict = exponent_verdict(out.index, 1.0);
        out.detail = "event " + std::to_string(event.size()) + "/" + std::to_string(q_.size());
        return out;
    }

private:
    struct Candidates {
        std::vector<std::uint32_t> rows;
        std::size_t k = 0;
    };

    const Candidates& candidates(const std::vector<std::uint32_t>& event, std::size_t f1, std::size_t f2) {
        const auto key = std::tuple{static_cast<const void*>(&event), std::min(f1, f2), std::max(f1, f2)};
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const auto& l1 = q_.column(f1);
        const auto& l2 = q_.column(f2);
        const std::size_t n = event.size();
        Candidates c;
        c.k = std::min(default_k(n, opt_.tail), n - 1);
        if (c.k + 1 < n) {
            std::vector<double> mins(n);
            for (std::size_t t = 0; t < n; ++t) mins[t] = std::min(l1[event[t]], l2[event[t]]);
            std::nth_element(mins.begin(), mins.begin() + static_cast<std::ptrdiff_t>(c.k), mins.end(), std::greater<>());
            const double floor_value = mins[c.k];
            for (std::uint32_t i : event) {
                if (std::max(l1[i], l2[i]) >= floor_value) c.rows.push_back(i);
            }
        } else {
            c.rows = event;
        }
        return cache_.emplace(key, std::move(c)).first->second;
    }

    TailIndexEstimate index(const std::vector<std::uint32_t>& event, std::size_t f1, double b1, std::size_t f2,
                            double b2) {
        const auto& l1 = q_.column(f1);
        const auto& l2 = q_.column(f2);
        std::vector<double> logs;
        if (b1 > 0.0 && b2 > 0.0) {
            const auto& c = candidates(event, f1, f2);
            logs.reserve(c.rows.size());
            for (std::uint32_t i : c.rows) logs.push_back(b1 * l1[i] + b2 * l2[i]);
            TailOptions fixed = opt_.tail;
            fixed.k = c.k;
            auto est = estimate_tail_index_from_logs(std::move(logs), fixed);
            est.n = event.size();
            return est;
        }
        logs.reserve(event.size());
        for (std::uint32_t i : event) logs.push_back(b1 * l1[i] + b2 * l2[i]);
        return estimate_tail_index_from_logs(std::move(logs), opt_.tail);
    }

    const QTable& q_;
    const XOptions& opt_;
    std::map<std::tuple<const void*, std::size_t, std::size_t>, Candidates> cache_;
};

/// Family A: j fails to be a (weak) maximiser of the T-shape U \ {-j} and k is its maximiser.
std::vector<std::uint32_t> bifurcation_event(std::span<const TransitionVector> sites, Direction j, Direction k) {
    const QSubset t = QSubset::t_shape(2, j);
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (!attains_max(sites[i], t, j) && argmax_direction(sites[i], t) == k) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

Direction positive_other(Direction k) { return k.axis() == 0 ? kUp : kRight; }

struct ClausePlan {
    struct A {
        Direction j, k;
        std::vector<std::uint32_t> event;
    };
    struct B {
        Direction k;
    };
    std::vector<A> family_a;
    std::vector<B> family_b;
    std::vector<std::uint32_t> all;
};

ClausePlan plan_clauses(std::span<const TransitionVector> sites) {
    ClausePlan p;
    for (Direction j : kPlanar) {
        for (Direction k : kPlanar) {
            if (!k.orthogonal_to(j)) continue;
            p.family_a.push_back({j, k, bifurcation_event(sites, j, k)});
        }
    }
    for (Direction k : kPlanar) p.family_b.push_back({k});
    p.all.resize(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) p.all[i] = static_cast<std::uint32_t>(i);
    return p;
}

std::string family_a_name(Direction j, Direction k) {
    return "eq2 " + alias_of(QSubset::t_shape(2, j)) + "^" + alias_of(QSubset::t_shape(2, k)) + " " +
           alias_of(QSubset::corner(2, j, k.opposite())) + " on argmax " + k.name();
}

std::string family_b_name(Direction k) {
    const Direction i = positive_other(k);
    return "eq2 " + alias_of(QSubset::corner(2, k, i)) + " " + alias_of(QSubset::corner(2, k, i.opposite()));
}

/// Searches dominated exponent sets on the dyadic grid for one passing every clause and relation.
/// Corner exponents are enumerated; each T-shape exponent is then taken as large as its own clauses allow,
/// which is optimal because every relation and the domination constraint increase with it.
struct RescueResult {
    bool found = false;
    ExponentSet witness;
    std::uint64_t corner_sets = 0;
};

RescueResult rescue_search(ProductEvaluator& eval, const ClausePlan& plan, const QSingularities& sing, double a,
                           const ExponentSet& natural, const XOptions& opt) {
    const double cap = a + 1.0;
    const auto upper = [&](const std::string& alias) {
        const auto& e = sing.by_alias.at(alias);
        if (e.inconclusive) return 0.0;
        return std::min(cap, e.estimate + e.half_width);
    };
    const auto grid_for = [&](const std::string& alias) {
        std::vector<double> g;
        const double hi = upper(alias);
        for (int m = 1; m * opt.grid_step <= hi + 1e-15; ++m) g.push_back(m * opt.grid_step);
        const double nat = std::min(cap, natural.get(alias));
        if (nat > 0.0 && nat <= hi && std::find(g.begin(), g.end(), nat) == g.end()) g.push_back(nat);
        std::sort(g.begin(), g.end());
        return g;
    };

    const auto corners = ExponentSet::corners();
    std::array<std::vector<double>, 4> grids;
    std::array<std::size_t, 4> corner_alias_idx{};
    for (std::size_t c = 0; c < 4; ++c) {
        corner_alias_idx[c] = corner_alias(corners[c].first, corners[c].second);
        grids[c] = grid_for(ExponentSet::aliases()[corner_alias_idx[c]]);
    }

    std::map<std::tuple<std::size_t, double, double>, bool> b_memo;
    const auto pair_ok = [&](Direction k, double a1, double a2) {
        const Direction i = positive_other(k);
        const std::size_t f1 = corner_alias(k, i), f2 = corner_alias(k, i.opposite());
        const auto key = std::tuple{static_cast<std::size_t>(k.slot()), a1, a2};
        if (auto it = b_memo.find(key); it != b_memo.end()) return it->second;
        const bool ok = eval.evaluate(plan.all, f1, a1, f2, a2).verdict == Verdict::pass;
        b_memo.emplace(key, ok);
        return ok;
    };

    // Largest beta_k on the grid passing eq1 and the family-A clause (j, k) with corner exponent alpha.
    std::map<std::tuple<int, int, double>, double> a_memo;
    const auto beta_limit = [&](Direction j, Direction k, double alpha) {
        const auto key = std::tuple{j.slot(), k.slot(), alpha};
        if (auto it = a_memo.find(key); it != a_memo.end()) return it->second;
        const auto& ev = std::find_if(plan.family_a.begin(), plan.family_a.end(),
                                      [&](const auto& c) { return c.j == j && c.k == k; })
                             ->event;
        const std::string t_name = ExponentSet::aliases()[t_alias(k)];
        const auto grid = grid_for(t_name);
        const std::size_t ft = t_alias(j), fc = corner_alias(j, k.opposite());
        // Passing is monotone in beta: binary search for the last passing grid value.
        std::ptrdiff_t lo = -1, hi = static_cast<std::ptrdiff_t>(grid.size());
        while (hi - lo > 1) {
            const std::ptrdiff_t mid = (lo + hi) / 2;
            const bool ok = eval.evaluate(ev, ft, grid[static_cast<std::size_t>(mid)], fc, alpha).verdict ==
                            Verdict::pass;
            (ok ? lo : hi) = mid;
        }
        const double v = lo >= 0 ? grid[static_cast<std::size_t>(lo)] : 0.0;
        a_memo.emplace(key, v);
        return v;
    };

    RescueResult out;
    std::array<double, 4> alpha{};
    const std::function<bool(std::size_t)> recurse = [&](std::size_t c) -> bool {
        if (c == 4) {
            ++out.corner_sets;
            ExponentSet x;
            for (std::size_t i = 0; i < 4; ++i) x.set_alpha(corners[i].first, corners[i].second, alpha[i]);
            if (alpha[0] + alpha[1] + alpha[2] + alpha[3] <= a) return false;
            for (Direction k : kPlanar) {
                const Direction i = positive_other(k);
                if (!pair_ok(k, x.alpha(k, i), x.alpha(k, i.opposite()))) return false;
            }
            for (Direction k : kPlanar) {
                double b = kInf;
                for (Direction j : kPlanar) {
                    if (!j.orthogonal_to(k)) continue;
                    b = std::min(b, beta_limit(j, k, x.alpha(j, k.opposite())));
                }
                if (b <= 0.0) return false;
                x.set_beta(k, b);
            }
            if (!x.dominated()) return false;
            const auto rel = check_relations(x, a);
            if (!std::all_of(rel.begin(), rel.end(), [](const auto& r) { return r.holds; })) return false;
            out.found = true;
            out.witness = x;
            return true;
        }
        for (double v : grids[c]) {
            alpha[c] = v;
            if (recurse(c + 1)) return true;
        }
        return false;
    };
    recurse(0);
    return out;
}

}  // namespace

ConditionReport check_x(const SiteLaw& law, double a, const ExponentSet& exponents, std::size_t samples,
                        std::uint64_t seed, const XOptions& opt) {
    if (law.dim != 2) throw std::invalid_argument("condition X is defined for d = 2");
    ConditionReport r;
    r.condition = "X";
    r.seed = seed;
    r.metrics["a"] = a;
    r.metrics["samples"] = static_cast<double>(samples);

    const auto sites = sample_sites(law, samples, seed);
    const auto sing = estimate_q_singularities(sites, opt.tail);
    const QTable q(sites);
    const auto plan = plan_clauses(sites);
    ProductEvaluator eval(q, opt);

    for (const auto& alias : ExponentSet::aliases()) {
        const auto& e = sing.by_alias.at(alias);
        ClauseResult c;
        c.name = "eq1 " + alias;
        c.estimate = e.estimate;
        c.half_width = e.half_width;
        c.threshold = exponents.get(alias);
        c.verdict = exponent_verdict(e, c.threshold);
        c.detail = "singularity estimate";
        r.clauses.push_back(c);
        r.metrics["singularity " + alias] = e.estimate;
    }

    const auto add_product = [&](const std::string& name, const std::vector<std::uint32_t>& ev, std::size_t f1, double b1,
                                 std::size_t f2, double b2) {
        const auto o = eval.evaluate(ev, f1, b1, f2, b2);
        ClauseResult c;
        c.name = name;
        c.estimate = o.index.estimate;
        c.half_width = o.index.half_width;
        c.threshold = 1.0;
        c.verdict = o.verdict;
        c.detail = o.detail + "; exponents " + fmt_double(b1) + ", " + fmt_double(b2);
        r.clauses.push_back(c);
    };
    for (const auto& fa : plan.family_a) {
        add_product(family_a_name(fa.j, fa.k), fa.event, t_alias(fa.j), exponents.beta(fa.k),
                    corner_alias(fa.j, fa.k.opposite()), exponents.alpha(fa.j, fa.k.opposite()));
    }
    for (const auto& fb : plan.family_b) {
        const Direction i = positive_other(fb.k);
        add_product(family_b_name(fb.k), plan.all, corner_alias(fb.k, i), exponents.alpha(fb.k, i),
                    corner_alias(fb.k, i.opposite()), exponents.alpha(fb.k, i.opposite()));
    }

    for (const auto& rel : check_relations(exponents, a)) {
        ClauseResult c;
        c.name = "relation " + rel.name;
        c.estimate = rel.value;
        c.threshold = a;
        c.verdict = rel.holds ? Verdict::pass : Verdict::fail;
        c.detail = "exact";
        r.clauses.push_back(c);
    }
    r.settle();

    if (opt.rescue_search && r.verdict != Verdict::pass) {
        const auto rescue = rescue_search(eval, plan, sing, a, exponents, opt);
        r.metrics["rescue corner sets"] = static_cast<double>(rescue.corner_sets);
        r.metrics["rescue found"] = rescue.found ? 1.0 : 0.0;
        if (rescue.found) {
            std::ostringstream w;
            for (const auto& alias : ExponentSet::aliases()) w << alias << "=" << fmt_double(rescue.witness.get(alias)) << " ";
            r.notes["rescue"] = w.str();
            r.verdict = Verdict::pass;
        } else {
            r.notes["rescue"] = "no dominated exponent set on the grid passes every clause";
        }
    }
    return r;
}

}  // namespace rwre
