#include "rwre/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <variant>

namespace rwre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Chain {
    std::vector<Point> states;
    std::unordered_map<Point, std::size_t, PointHash> index;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;  // interior transitions
    std::vector<double> target_mass;
    std::vector<double> exit_mass;  // target + taboo
};

Chain build_chain(const EnvironmentWindow& env, const AbsorbingChainSpec& spec) {
    Chain c;
    c.states = spec.interior;
    for (std::size_t i = 0; i < c.states.size(); ++i) {
        if (!c.index.emplace(c.states[i], i).second) throw std::invalid_argument("duplicate interior site");
    }
    const std::size_t n = c.states.size();
    c.rows.resize(n);
    c.target_mass.assign(n, 0.0);
    c.exit_mass.assign(n, 0.0);
    const auto dirs = directions(env.dim());
    for (std::size_t i = 0; i < n; ++i) {
        const Point& x = c.states[i];
        const TransitionVector& w = env.at(x);
        for (Direction e : dirs) {
            const double p = w[e];
            if (p <= 0.0) continue;
            const Point y = x.step(e);
            if (auto it = c.index.find(y); it != c.index.end()) {
                c.rows[i].emplace_back(it->second, p);
                continue;
            }
            switch (spec.classify(y)) {
                case SiteRole::target:
                    c.target_mass[i] += p;
                    c.exit_mass[i] += p;
                    break;
                case SiteRole::taboo:
                    c.exit_mass[i] += p;
                    break;
                case SiteRole::interior:
                    throw std::invalid_argument("neighbour " + to_string(y, env.dim()) +
                                                " classified interior but missing from the interior list");
            }
        }
    }
    return c;
}

/// Sites from which some site with positive `seed_mass` is reachable.
std::vector<bool> can_reach(const Chain& c, const std::vector<double>& seed_mass, const std::vector<bool>& allowed) {
    const std::size_t n = c.states.size();
    std::vector<std::vector<std::size_t>> reverse(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto [j, p] : c.rows[i]) reverse[j].push_back(i);
    }
    std::vector<bool> reach(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
        if (allowed[i] && seed_mass[i] > 0.0) {
            reach[i] = true;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const std::size_t j = queue.front();
        queue.pop_front();
        for (std::size_t i : reverse[j]) {
            if (allowed[i] && !reach[i]) {
                reach[i] = true;
                queue.push_back(i);
            }
        }
    }
    return reach;
}

/// (I - P) restricted to `active` states; transitions into inactive states are dropped.
class Factorisation {
public:
    Factorisation(const Chain& c, const std::vector<bool>& active, const SolveOptions& opt) : chain_(c) {
        for (std::size_t i = 0; i < c.states.size(); ++i) {
            if (active[i]) {
                local_.emplace(i, order_.size());
                order_.push_back(i);
            }
        }
        const std::size_t n = order_.size();
        method_ = opt.method;
        if (method_ == SolveMethod::automatic) method_ = n <= opt.dense_limit ? SolveMethod::dense : SolveMethod::sparse;
        tolerance_ = opt.tolerance;
        max_sweeps_ = opt.max_sweeps;
        if (n == 0) return;
        if (method_ == SolveMethod::dense) {
            Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t r = 0; r < n; ++r) {
                for (auto [j, p] : c.rows[order_[r]]) {
                    if (auto it = local_.find(j); it != local_.end()) {
                        a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(it->second)) -= p;
                    }
                }
            }
            dense_.emplace(a);
        } else if (method_ == SolveMethod::sparse) {
            std::vector<Eigen::Triplet<double>> trip;
            for (std::size_t r = 0; r < n; ++r) {
                trip.emplace_back(static_cast<int>(r), static_cast<int>(r), 1.0);
                for (auto [j, p] : c.rows[order_[r]]) {
                    if (auto it = local_.find(j); it != local_.end()) {
                        trip.emplace_back(static_cast<int>(r), static_cast<int>(it->second), -p);
                    }
                }
            }
            sparse_matrix_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            sparse_matrix_.setFromTriplets(trip.begin(), trip.end());
            sparse_matrix_.makeCompressed();
            sparse_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
            sparse_->analyzePattern(sparse_matrix_);
            sparse_->factorize(sparse_matrix_);
            if (sparse_->info() != Eigen::Success) throw NumericSingularity("sparse factorisation failed");
        }
    }

    [[nodiscard]] SolveMethod method() const { return method_; }
    [[nodiscard]] bool active(std::size_t i) const { return local_.count(i) != 0; }

    /// Solves (I - P) x = b on active states; b and the result are indexed by chain state.
    std::vector<double> solve(const std::vector<double>& b, double* residual_out) const {
        const std::size_t n = order_.size();
        std::vector<double> out(chain_.states.size(), 0.0);
        if (n == 0) {
            if (residual_out) *residual_out = 0;
            return out;
        }
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) rhs(static_cast<Eigen::Index>(r)) = b[order_[r]];
        Eigen::VectorXd x;
        if (method_ == SolveMethod::dense) {
            x = dense_->solve(rhs);
        } else if (method_ == SolveMethod::sparse) {
            x = sparse_->solve(rhs);
        } else {
            x = gauss_seidel(rhs);
        }
        double residual = 0, scale = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            double ax = x(static_cast<Eigen::Index>(r));
            for (auto [j, p] : chain_.rows[order_[r]]) {
                if (auto it = local_.find(j); it != local_.end()) ax -= p * x(static_cast<Eigen::Index>(it->second));
            }
            residual = std::max(residual, std::abs(ax - rhs(static_cast<Eigen::Index>(r))));
            scale = std::max(scale, std::abs(x(static_cast<Eigen::Index>(r))));
        }
        if (!std::isfinite(residual) || residual > 1e-7 * scale) {
            throw NumericSingularity("linear solve residual " + std::to_string(residual) + " too large");
        }
        if (residual_out) *residual_out = residual;
        for (std::size_t r = 0; r < n; ++r) out[order_[r]] = x(static_cast<Eigen::Index>(r));
        return out;
    }

private:
    Eigen::VectorXd gauss_seidel(const Eigen::VectorXd& rhs) const {
        const std::size_t n = order_.size();
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t sweep = 0; sweep < max_sweeps_; ++sweep) {
            double change = 0;
            for (std::size_t r = 0; r < n; ++r) {
                double diag = 1.0, acc = rhs(static_cast<Eigen::Index>(r));
                for (auto [j, p] : chain_.rows[order_[r]]) {
                    auto it = local_.find(j);
                    if (it == local_.end()) continue;
                    if (it->second == r) {
                        diag -= p;
                    } else {
                        acc += p * x(static_cast<Eigen::Index>(it->second));
                    }
                }
                const double v = acc / diag;
                change = std::max(change, std::abs(v - x(static_cast<Eigen::Index>(r))));
                x(static_cast<Eigen::Index>(r)) = v;
            }
            if (change <= tolerance_ * std::max(1.0, x.cwiseAbs().maxCoeff())) return x;
        }
        throw NumericSingularity("iterative solve did not converge");
    }

    const Chain& chain_;
    std::vector<std::size_t> order_;
    std::unordered_map<std::size_t, std::size_t> local_;
    SolveMethod method_ = SolveMethod::dense;
    double tolerance_ = 1e-12;
    std::size_t max_sweeps_ = 0;
    std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_;
    Eigen::SparseMatrix<double> sparse_matrix_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_;
};

SolveReport make_report(const Chain& c, std::vector<double> values, SolveMethod m, double residual) {
    SolveReport r;
    r.states = c.states;
    r.values = std::move(values);
    r.method = m;
    r.residual = residual;
    return r;
}

/// States that get absorbed with probability one (none of their futures is trapped).
std::vector<bool> surely_absorbed(const Chain& c) {
    const std::size_t n = c.states.size();
    const std::vector<bool> all(n, true);
    const auto absorbable = can_reach(c, c.exit_mass, all);
    std::vector<double> trapped(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) trapped[i] = absorbable[i] ? 0.0 : 1.0;
    const auto reaches_trap = can_reach(c, trapped, all);
    std::vector<bool> ok(n);
    for (std::size_t i = 0; i < n; ++i) ok[i] = !reaches_trap[i];
    return ok;
}

}  // namespace

std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::automatic: return "automatic";
        case SolveMethod::dense: return "dense";
        case SolveMethod::sparse: return "sparse";
        case SolveMethod::iterative: return "iterative";
    }
    return "?";
}

double SolveReport::at(const Point& x) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == x) return values[i];
    }
    throw std::out_of_range("site not in solved interior");
}

SolveReport solve_hitting(const EnvironmentWindow& env, const AbsorbingChainSpec& spec, const SolveOptions& opt) {
    const Chain c = build_chain(env, spec);
    const std::vector<bool> all(c.states.size(), true);
    // Sites that cannot reach a target have value 0 and are left out of the system.
    const auto active = can_reach(c, c.target_mass, all);
    const Factorisation f(c, active, opt);
    double residual = 0;
    auto x = f.solve(c.target_mass, &residual);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!active[i]) x[i] = 0.0;
        x[i] = std::clamp(x[i], 0.0, 1.0);
    }
    return make_report(c, std::move(x), f.method(), residual);
}

SolveReport solve_absorption_time(const EnvironmentWindow& env, const AbsorbingChainSpec& spec, const SolveOptions& opt) {
    const Chain c = build_chain(env, spec);
    const auto active = surely_absorbed(c);
    const Factorisation f(c, active, opt);
    double residual = 0;
    auto x = f.solve(std::vector<double>(c.states.size(), 1.0), &residual);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!active[i]) x[i] = kInf;
    }
    return make_report(c, std::move(x), f.method(), residual);
}

SolveReport solve_absorption_second_moment(const EnvironmentWindow& env, const AbsorbingChainSpec& spec,
                                           const SolveOptions& opt) {
    const Chain c = build_chain(env, spec);
    const auto active = surely_absorbed(c);
    const Factorisation f(c, active, opt);
    double r1 = 0, r2 = 0;
    const auto t = f.solve(std::vector<double>(c.states.size(), 1.0), &r1);
    std::vector<double> b(c.states.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 2.0 * t[i] - 1.0;  // (I - P)s = 1 + 2Pt = 2t - 1
    auto s = f.solve(b, &r2);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!active[i]) s[i] = kInf;
    }
    return make_report(c, std::move(s), f.method(), std::max(r1, r2));
}

double one_step_hitting(const EnvironmentWindow& env, const Point& x, const AbsorbingChainSpec& spec,
                        const SolveReport& h) {
    std::unordered_map<Point, double, PointHash> value;
    for (std::size_t i = 0; i < h.states.size(); ++i) value.emplace(h.states[i], h.values[i]);
    double sum = 0;
    const TransitionVector& w = env.at(x);
    for (Direction e : directions(env.dim())) {
        const double p = w[e];
        if (p <= 0.0) continue;
        const Point y = x.step(e);
        if (auto it = value.find(y); it != value.end()) {
            sum += p * it->second;
        } else if (spec.classify(y) == SiteRole::target) {
            sum += p;
        }
    }
    return sum;
}

namespace {

std::vector<Point> ball_points_except(int dim, int radius, std::initializer_list<Point> excluded) {
    std::vector<Point> out;
    if (radius < 0) return out;
    for (const Point& p : Box::ball(dim, radius).points()) {
        if (std::find(excluded.begin(), excluded.end(), p) == excluded.end()) out.push_back(p);
    }
    return out;
}

void require_cover(const EnvironmentWindow& env, int radius) {
    const Box ball = Box::ball(env.dim(), std::max(radius, 0));
    if (radius < 0 || !env.box().contains(ball.point(0)) || !env.box().contains(ball.point(ball.size() - 1))) {
        throw WindowExhausted("environment window does not cover B_" + std::to_string(radius));
    }
}

}  // namespace

double escape_probability(const EnvironmentWindow& env, int radius, const SolveOptions& opt) {
    if (radius < 1) throw std::invalid_argument("escape probability needs R >= 1");
    require_cover(env, radius - 1);
    const int d = env.dim();
    const Point o{};
    AbsorbingChainSpec spec{ball_points_except(d, radius - 1, {o}), [&](const Point& y) {
                                if (y == o) return SiteRole::taboo;
                                return sup_norm(y) > radius - 1 ? SiteRole::target : SiteRole::interior;
                            }};
    const auto h = solve_hitting(env, spec, opt);
    return one_step_hitting(env, o, spec, h);
}

double expected_return_count(const EnvironmentWindow& env, int radius, const SolveOptions& opt) {
    const double p = escape_probability(env, radius + 1, opt);
    return p > 0.0 ? (1.0 - p) / p : kInf;
}

namespace {
AbsorbingChainSpec exit_spec(int dim, int radius) {
    return {ball_points_except(dim, radius, {}),
            [radius](const Point& y) { return sup_norm(y) > radius ? SiteRole::target : SiteRole::interior; }};
}
}  // namespace

double expected_exit_time(const EnvironmentWindow& env, int radius, const SolveOptions& opt) {
    require_cover(env, radius);
    return solve_absorption_time(env, exit_spec(env.dim(), radius), opt).at(Point{});
}

double exit_time_second_moment(const EnvironmentWindow& env, int radius, const SolveOptions& opt) {
    require_cover(env, radius);
    return solve_absorption_second_moment(env, exit_spec(env.dim(), radius), opt).at(Point{});
}

double expected_visits(const EnvironmentWindow& env, int radius, const Point& x, const Point& y,
                       const SolveOptions& opt) {
    require_cover(env, radius);
    const Chain c = build_chain(env, exit_spec(env.dim(), radius));
    const auto active = surely_absorbed(c);
    const Factorisation f(c, active, opt);
    const std::size_t iy = c.index.at(y), ix = c.index.at(x);
    if (!active[iy] || !active[ix]) return kInf;
    std::vector<double> b(c.states.size(), 0.0);
    b[iy] = 1.0;
    return f.solve(b, nullptr)[ix];
}

double directional_escape_probability(const EnvironmentWindow& env, int axis, int radius, const SolveOptions& opt) {
    if (radius < 1) throw std::invalid_argument("directional escape needs R >= 1");
    if (axis < 0 || axis >= env.dim()) throw std::invalid_argument("axis outside dimension");
    require_cover(env, radius - 1);
    const Point o{};
    const auto a = static_cast<std::size_t>(axis);
    std::vector<Point> interior;
    for (const Point& p : ball_points_except(env.dim(), radius - 1, {o})) {
        if (p[a] == 0) interior.push_back(p);
    }
    AbsorbingChainSpec spec{interior, [&](const Point& y) {
                                if (y == o || y[a] != 0) return SiteRole::taboo;
                                return sup_norm(y) >= radius ? SiteRole::target : SiteRole::interior;
                            }};
    const auto h = solve_hitting(env, spec, opt);
    return one_step_hitting(env, o, spec, h);
}

Norm parse_norm(const std::string& s) {
    if (s == "1" || s == "l1") return Norm::l1;
    if (s == "2" || s == "l2") return Norm::l2;
    if (s == "inf" || s == "sup" || s == "linf") return Norm::sup;
    throw std::invalid_argument("unknown norm: " + s);
}

std::vector<Point> norm_sphere(int dim, int rho, Norm norm) {
    std::vector<Point> out;
    for (const Point& p : Box::ball(dim, rho).points()) {
        const bool on = norm == Norm::sup  ? sup_norm(p) == rho
                        : norm == Norm::l1 ? l1_norm(p) == rho
                                           : static_cast<int>(std::ceil(l2_norm(p) - 1e-12)) == rho;
        if (on) out.push_back(p);
    }
    return out;
}

HittingProfile max_hitting_probability(const EnvironmentWindow& env, int rho, Norm norm, const SolveOptions& opt) {
    if (rho < 1) throw std::invalid_argument("hitting radius must be at least 1");
    require_cover(env, rho);
    const Point o{};
    AbsorbingChainSpec spec{ball_points_except(env.dim(), rho, {o}), [&](const Point& y) {
                                return y == o || sup_norm(y) > rho ? SiteRole::taboo : SiteRole::interior;
                            }};
    const Chain c = build_chain(env, spec);
    const std::vector<bool> all(c.states.size(), true);
    const auto active = can_reach(c, c.exit_mass, all);
    const Factorisation f(c, active, opt);
    HittingProfile prof;
    prof.candidates = norm_sphere(env.dim(), rho, norm);
    const TransitionVector& w0 = env.at(o);
    for (const Point& y : prof.candidates) {
        const std::size_t iy = c.index.at(y);
        double prob = 0;
        if (active[iy]) {
            std::vector<double> b(c.states.size(), 0.0);
            b[iy] = 1.0;
            const auto g = f.solve(b, nullptr);  // g[x] = G(x, y)
            for (Direction e : directions(env.dim())) {
                const Point z = o.step(e);
                if (w0[e] <= 0.0 || z == o) continue;
                const auto it = c.index.find(z);
                if (it == c.index.end()) continue;
                prob += w0[e] * (z == y ? 1.0 : (active[it->second] ? g[it->second] / g[iy] : 0.0));
            }
        } else {
            prob = hitting_probability_direct(env, rho, y, opt);  // y sits in a closed class
        }
        prof.probabilities.push_back(std::clamp(prob, 0.0, 1.0));
    }
    const auto best = std::max_element(prof.probabilities.begin(), prof.probabilities.end());
    prof.max_probability = *best;
    prof.argmax = prof.candidates[static_cast<std::size_t>(best - prof.probabilities.begin())];
    return prof;
}

double hitting_probability_direct(const EnvironmentWindow& env, int rho, const Point& y, const SolveOptions& opt) {
    require_cover(env, rho);
    const Point o{};
    AbsorbingChainSpec spec{ball_points_except(env.dim(), rho, {o, y}), [&](const Point& z) {
                                if (z == y) return SiteRole::target;
                                return z == o || sup_norm(z) > rho ? SiteRole::taboo : SiteRole::interior;
                            }};
    const auto h = solve_hitting(env, spec, opt);
    return one_step_hitting(env, o, spec, h);
}

}  // namespace rwre
