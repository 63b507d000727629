#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace rwre {

namespace {

constexpr double kSumTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

TransitionVector normalised_from_logs(int dim, std::span<const double> logs) {
    const double m = *std::max_element(logs.begin(), logs.end());
    TransitionVector w(dim);
    double sum = 0;
    for (int s = 0; s < 2 * dim; ++s) {
        w.slot(s) = std::exp(logs[static_cast<std::size_t>(s)] - m);
        sum += w.slot(s);
    }
    for (int s = 0; s < 2 * dim; ++s) {
        w.slot(s) = std::max(w.slot(s) / sum, std::numeric_limits<double>::min());
    }
    return w;
}

/// log of a Gamma(shape, 1) variate, stable for small shapes.
double log_gamma_variate(double shape, CounterRng& rng) {
    if (shape >= 1.0) {
        std::gamma_distribution<double> g(shape, 1.0);
        return std::log(g(rng));
    }
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    return std::log(g(rng)) + std::log(rng.uniform()) / shape;
}

}  // namespace

TransitionVector::TransitionVector(int dim, std::span<const double> by_slot) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension out of range");
    if (by_slot.size() != static_cast<std::size_t>(2 * dim)) {
        throw std::invalid_argument("transition vector needs 2d entries");
    }
    std::copy(by_slot.begin(), by_slot.end(), p_.begin());
}

void TransitionVector::validate() const {
    double sum = 0;
    for (double v : values()) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("transition probability out of range");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) throw std::invalid_argument("transition probabilities do not sum to one");
}

bool TransitionVector::elliptic() const {
    return std::all_of(values().begin(), values().end(), [](double v) { return v > 0.0; });
}

SiteType counterexample_type(double u) {
    if (u <= 1.0 / 3.0) return SiteType::I;
    if (u <= 2.0 / 3.0) return SiteType::II;
    return SiteType::III;
}

double sample_power_law(double beta, double u) {
    if (!(beta > 0.0)) throw std::invalid_argument("power-law exponent must be positive");
    return std::pow(u, 1.0 / beta) / 8.0;
}

TransitionVector counterexample_template(SiteType type, double small) {
    const Direction right(1), left(-1), up(2), down(-2);
    TransitionVector w(2);
    switch (type) {
        case SiteType::I:
            w[right] = 1.0 - small - 2.0 * small * small;
            w[up] = small;
            w[left] = small * small;
            w[down] = small * small;
            break;
        case SiteType::II:
            w[down] = 1.0 - 3.0 * small;
            w[left] = w[right] = w[up] = small;
            break;
        case SiteType::III:
            w[left] = 1.0 - 3.0 * small;
            w[right] = w[up] = w[down] = small;
            break;
    }
    return w;
}

TransitionVector counterexample_transition(const CounterexampleLaw& law, SiteType type, double u) {
    const double beta = type == SiteType::I ? law.beta_dashv : type == SiteType::II ? law.beta_perp : law.beta_vdash;
    return counterexample_template(type, sample_power_law(beta, u));
}

std::string SiteLaw::name() const {
    return std::visit(Overloaded{
                          [](const CounterexampleLaw&) { return std::string("counterexample"); },
                          [](const DirichletLaw&) { return std::string("dirichlet"); },
                          [](const DriftedUniformLaw&) { return std::string("drifted-uniform"); },
                          [](const DiscreteMixtureLaw&) { return std::string("discrete-mixture"); },
                      },
                      kind);
}

void SiteLaw::validate() const {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension out of range");
    std::visit(Overloaded{
                   [&](const CounterexampleLaw& c) {
                       if (dim != 2) throw std::invalid_argument("counterexample law is two-dimensional");
                       for (double b : {c.beta_dashv, c.beta_perp, c.beta_vdash}) {
                           if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("exponents must be positive");
                       }
                   },
                   [&](const DirichletLaw& d) {
                       if (d.alpha.size() != static_cast<std::size_t>(2 * dim)) {
                           throw std::invalid_argument("dirichlet law needs 2d parameters");
                       }
                       for (double a : d.alpha) {
                           if (!(a > 0.0)) throw std::invalid_argument("dirichlet parameters must be positive");
                       }
                   },
                   [&](const DriftedUniformLaw& u) {
                       if (!(u.kappa > 0.0) || u.kappa > 1.0 / (2.0 * dim)) {
                           throw std::invalid_argument("kappa must lie in (0, 1/(2d)]");
                       }
                       if (u.weight < 0.0 || u.weight > 1.0) throw std::invalid_argument("drift weight must lie in [0, 1]");
                       if (u.drift.axis() >= dim) throw std::invalid_argument("drift direction outside dimension");
                   },
                   [&](const DiscreteMixtureLaw& m) {
                       if (m.atoms.empty() || m.atoms.size() != m.weights.size()) {
                           throw std::invalid_argument("mixture needs matching weights and atoms");
                       }
                       double sum = 0;
                       for (double w : m.weights) {
                           if (!(w >= 0.0)) throw std::invalid_argument("mixture weights must be non-negative");
                           sum += w;
                       }
                       if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to one");
                       for (const auto& a : m.atoms) {
                           if (a.dim() != dim) throw std::invalid_argument("mixture atom dimension mismatch");
                           a.validate();
                       }
                   },
               },
               kind);
}

TransitionVector SiteLaw::sample(CounterRng& rng) const {
    return std::visit(
        Overloaded{
            [&](const CounterexampleLaw& c) {
                const double u_type = rng.uniform();
                const double u = rng.uniform();
                return counterexample_transition(c, counterexample_type(u_type), u);
            },
            [&](const DirichletLaw& d) {
                std::array<double, 2 * kMaxDim> logs{};
                for (int s = 0; s < 2 * dim; ++s) logs[static_cast<std::size_t>(s)] = log_gamma_variate(d.alpha[static_cast<std::size_t>(s)], rng);
                return normalised_from_logs(dim, std::span<const double>(logs.data(), static_cast<std::size_t>(2 * dim)));
            },
            [&](const DriftedUniformLaw& u) {
                std::array<double, 2 * kMaxDim> expo{};
                double sum = 0;
                for (int s = 0; s < 2 * dim; ++s) {
                    expo[static_cast<std::size_t>(s)] = -std::log(rng.uniform());
                    sum += expo[static_cast<std::size_t>(s)];
                }
                const double spread = 1.0 - 2.0 * dim * u.kappa;
                TransitionVector w(dim);
                for (int s = 0; s < 2 * dim; ++s) {
                    const double drift = s == u.drift.slot() ? u.weight : 0.0;
                    w.slot(s) = u.kappa + spread * (drift + (1.0 - u.weight) * expo[static_cast<std::size_t>(s)] / sum);
                }
                return w;
            },
            [&](const DiscreteMixtureLaw& m) {
                double u = rng.uniform();
                for (std::size_t i = 0; i + 1 < m.atoms.size(); ++i) {
                    if (u <= m.weights[i]) return m.atoms[i];
                    u -= m.weights[i];
                }
                return m.atoms.back();
            },
        },
        kind);
}

TransitionVector SiteLaw::at(std::uint64_t seed, const Point& x) const {
    CounterRng rng(site_key(seed, x));
    return sample(rng);
}

SiteLaw counterexample_law(double beta_dashv, double beta_perp, double beta_vdash) {
    SiteLaw law{2, CounterexampleLaw{beta_dashv, beta_perp, beta_vdash}};
    law.validate();
    return law;
}

SiteLaw uniform_law(int dim) { return dirichlet_law(std::vector<double>(static_cast<std::size_t>(2 * dim), 1.0)); }

SiteLaw dirichlet_law(std::vector<double> alpha) {
    const int dim = static_cast<int>(alpha.size() / 2);
    SiteLaw law{dim, DirichletLaw{std::move(alpha)}};
    law.validate();
    return law;
}

SiteLaw drifted_uniform_law(int dim, double kappa, Direction drift, double weight) {
    SiteLaw law{dim, DriftedUniformLaw{kappa, drift, weight}};
    law.validate();
    return law;
}

SiteLaw symmetric_law(int dim) {
    std::vector<double> p(static_cast<std::size_t>(2 * dim), 1.0 / (2.0 * dim));
    SiteLaw law{dim, DiscreteMixtureLaw{{1.0}, {TransitionVector(dim, p)}}};
    law.validate();
    return law;
}

SiteLaw deterministic_law(int dim, Direction e) {
    TransitionVector w(dim);
    w[e] = 1.0;
    SiteLaw law{dim, DiscreteMixtureLaw{{1.0}, {w}}};
    law.validate();
    return law;
}

std::vector<ValidityRelation> counterexample_relations(const CounterexampleLaw& c) {
    const double l = c.beta_dashv, p = c.beta_perp, r = c.beta_vdash;
    for (double b : {l, p, r}) {
        if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("counterexample exponents must lie in (0, 1)");
    }
    std::vector<ValidityRelation> out;
    auto add = [&](std::string name, double lhs, std::string op, double rhs) {
        const bool holds = op == ">=" ? lhs >= rhs : op == ">" ? lhs > rhs : lhs < rhs;
        out.push_back({std::move(name), lhs, std::move(op), rhs, holds});
    };
    add("beta_dashv >= beta_perp", l, ">=", p);
    add("beta_dashv + beta_vdash > 1", l + r, ">", 1.0);
    add("beta_dashv/2 + beta_perp + beta_vdash > 1", l / 2 + p + r, ">", 1.0);
    add("beta_dashv/2 + beta_perp/2 + beta_vdash < 1", l / 2 + p / 2 + r, "<", 1.0);
    return out;
}

EnvironmentWindow::EnvironmentWindow(SiteLaw law, Box box, std::uint64_t seed, std::vector<TransitionVector> sites)
    : law_(std::move(law)), box_(box), seed_(seed), sites_(std::move(sites)) {
    if (sites_.size() != box_.size()) throw std::invalid_argument("window site count does not match box");
}

const TransitionVector& EnvironmentWindow::at(const Point& x) const {
    if (!box_.contains(x)) throw WindowExhausted("site " + to_string(x, dim()) + " outside environment window");
    return sites_[box_.index(x)];
}

EnvironmentWindow sample_window(const SiteLaw& law, const Box& box, std::uint64_t seed) {
    if (box.dim() != law.dim) throw std::invalid_argument("box and law dimensions differ");
    std::vector<TransitionVector> sites;
    sites.reserve(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) sites.push_back(law.at(seed, box.point(i)));
    return {law, box, seed, std::move(sites)};
}

EnvironmentWindow make_window(const SiteLaw& law, const Box& box, std::vector<TransitionVector> sites) {
    for (const auto& w : sites) w.validate();
    return {law, box, 0, std::move(sites)};
}

const TransitionVector& LazyEnvironment::at(const Point& x) const {
    auto it = cache_.find(x);
    if (it == cache_.end()) it = cache_.emplace(x, law_.at(seed_, x)).first;
    return it->second;
}

QSubset::QSubset(int dim, std::initializer_list<Direction> dirs) : dim_(dim) {
    for (Direction e : dirs) {
        if (e.axis() >= dim) throw std::invalid_argument("direction outside dimension");
        mask_ |= 1U << e.slot();
    }
    *this = from_mask(dim, mask_);
}

QSubset QSubset::from_mask(int dim, std::uint32_t mask) {
    const std::uint32_t full = (1U << (2 * dim)) - 1U;
    if (mask == 0 || (mask & ~full) != 0) {
        throw std::invalid_argument("Q-subset must be a non-empty set of directions");
    }
    QSubset q;
    q.dim_ = dim;
    q.mask_ = mask;
    return q;
}

QSubset QSubset::t_shape(int dim, Direction j) {
    const std::uint32_t full = (1U << (2 * dim)) - 1U;
    return from_mask(dim, full & ~(1U << j.opposite().slot()));
}

QSubset QSubset::corner(int dim, Direction i, Direction j) {
    if (!i.orthogonal_to(j)) throw std::invalid_argument("corner directions must be orthogonal");
    return QSubset(dim, {i, j});
}

QSubset QSubset::parse(const std::string& name) {
    static const std::map<std::string, QSubset> aliases = {
        {"vdash", t_shape(2, Direction(1))},
        {"dashv", t_shape(2, Direction(-1))},
        {"perp", t_shape(2, Direction(2))},
        {"top", t_shape(2, Direction(-2))},
        {"ulcorner", corner(2, Direction(1), Direction(-2))},
        {"urcorner", corner(2, Direction(-1), Direction(-2))},
        {"lrcorner", corner(2, Direction(-1), Direction(2))},
        {"llcorner", corner(2, Direction(1), Direction(2))},
        {"⊢", t_shape(2, Direction(1))},
        {"⊣", t_shape(2, Direction(-1))},
        {"⊥", t_shape(2, Direction(2))},
        {"⊤", t_shape(2, Direction(-2))},
        {"⌜", corner(2, Direction(1), Direction(-2))},
        {"⌝", corner(2, Direction(-1), Direction(-2))},
        {"⌟", corner(2, Direction(-1), Direction(2))},
        {"⌞", corner(2, Direction(1), Direction(2))},
    };
    auto it = aliases.find(name);
    if (it == aliases.end()) throw std::invalid_argument("unknown Q-subset alias: " + name);
    return it->second;
}

std::vector<Direction> QSubset::members() const {
    std::vector<Direction> out;
    for (int s = 0; s < 2 * dim_; ++s) {
        if ((mask_ >> s) & 1U) out.push_back(Direction::from_slot(s));
    }
    return out;
}

std::string QSubset::name() const {
    if (dim_ == 2) {
        for (const char* alias : {"vdash", "dashv", "perp", "top", "ulcorner", "urcorner", "lrcorner", "llcorner"}) {
            if (parse(alias) == *this) return alias;
        }
    }
    std::string s = "{";
    for (Direction e : members()) s += (s.size() > 1 ? "," : "") + e.name();
    return s + "}";
}

double q_variable(const TransitionVector& w, const QSubset& s) {
    double m = 0;
    for (int k = 0; k < 2 * s.dim(); ++k) {
        if ((s.mask() >> k) & 1U) m = std::max(m, w.slot(k));
    }
    return m;
}

Direction argmax_direction(const TransitionVector& w, const QSubset& s) {
    int best = -1;
    for (int k = 0; k < 2 * s.dim(); ++k) {
        if (((s.mask() >> k) & 1U) && (best < 0 || w.slot(k) > w.slot(best))) best = k;
    }
    return Direction::from_slot(best);
}

bool attains_max(const TransitionVector& w, const QSubset& s, Direction e) {
    return s.contains(e) && w[e] >= q_variable(w, s);
}

namespace {

std::vector<std::string> csv_columns(int d) {
    std::vector<std::string> cols;
    if (d == 2) return {"x", "y", "p_right", "p_left", "p_up", "p_down"};
    for (int i = 0; i < d; ++i) cols.push_back("x" + std::to_string(i + 1));
    for (Direction e : directions(d)) cols.push_back("p_" + e.name());
    return cols;
}

}  // namespace

void write_environment_csv(std::ostream& out, const EnvironmentWindow& env, const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "# law=" << env.law().name() << " seed=" << env.seed() << '\n';
    const int d = env.dim();
    const auto cols = csv_columns(d);
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    out.precision(17);
    for (const Point& x : env.box().points()) {
        for (int i = 0; i < d; ++i) out << x[static_cast<std::size_t>(i)] << ',';
        const auto& w = env.at(x);
        for (int s = 0; s < 2 * d; ++s) out << w.slot(s) << (s + 1 < 2 * d ? "," : "\n");
    }
}

EnvironmentWindow read_environment_csv(std::istream& in, const SiteLaw& law_for_lineage) {
    const int d = law_for_lineage.dim;
    std::map<Point, TransitionVector> sites;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        Point x;
        TransitionVector w(d);
        try {
            for (int i = 0; i < d; ++i) {
                std::getline(ss, cell, ',');
                x[static_cast<std::size_t>(i)] = std::stoi(cell);
            }
            for (int s = 0; s < 2 * d; ++s) {
                std::getline(ss, cell, ',');
                w.slot(s) = std::stod(cell);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed environment CSV line " + std::to_string(lineno));
        }
        sites.insert_or_assign(x, w);
    }
    if (sites.empty()) throw std::invalid_argument("environment CSV holds no sites");
    std::array<int, kMaxDim> lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[static_cast<std::size_t>(i)] = std::numeric_limits<int>::max();
        hi[static_cast<std::size_t>(i)] = std::numeric_limits<int>::min();
    }
    for (const auto& [x, w] : sites) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
            lo[i] = std::min(lo[i], x[i]);
            hi[i] = std::max(hi[i], x[i]);
        }
    }
    const Box box(d, lo, hi);
    if (box.size() != sites.size()) throw std::invalid_argument("environment CSV does not cover a full box");
    std::vector<TransitionVector> ordered;
    ordered.reserve(sites.size());
    for (const Point& x : box.points()) ordered.push_back(sites.at(x));
    return make_window(law_for_lineage, box, std::move(ordered));
}

}  // namespace rwre
