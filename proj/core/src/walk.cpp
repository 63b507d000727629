#include "rwre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rwre/parallel.hpp"

namespace rwre {

Heading::Heading(std::vector<double> v) : l(std::move(v)) {
    double norm = 0;
    for (double x : l) norm += x * x;
    norm = std::sqrt(norm);
    if (l.empty() || static_cast<int>(l.size()) > kMaxDim || norm == 0.0) {
        throw std::invalid_argument("heading must be a non-zero vector");
    }
    for (double& x : l) x /= norm;
}

Heading Heading::axis(int dim, Direction e) {
    std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
    v[static_cast<std::size_t>(e.axis())] = e.sign();
    return Heading(std::move(v));
}

double Heading::project(const Point& x) const {
    double s = 0;
    for (std::size_t i = 0; i < l.size(); ++i) s += l[i] * x[i];
    return s;
}

RegenerationRecord detect_regenerations(std::span<const Point> path, const Heading& l) {
    RegenerationRecord rec;
    if (path.empty()) return rec;
    std::vector<double> y(path.size());
    std::vector<double> prefix_max(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        y[i] = l.project(path[i]);
        prefix_max[i] = i == 0 ? y[i] : std::max(prefix_max[i - 1], y[i]);
    }
    double level = y[0];  // R_k
    std::size_t from = 1;
    for (;;) {
        std::size_t s = from;
        while (s < y.size() && y[s] < level + 1.0) ++s;
        if (s == y.size()) return rec;  // S_{k+1} beyond the horizon
        rec.s_times.push_back(s);
        std::size_t d = s + 1;
        while (d < y.size() && y[d] >= y[s]) ++d;
        if (d == y.size()) {
            rec.d_times.emplace_back(std::nullopt);
            rec.tau1 = s;
            return rec;
        }
        rec.d_times.emplace_back(d);
        level = prefix_max[d];
        from = d + 1;
    }
}

ProportionEstimate slab_exit_estimate(const SiteLaw& law, const Heading& l, int half_width, std::uint64_t replicas,
                                      std::uint64_t seed, std::uint64_t cap, int workers) {
    if (half_width < 0) throw std::invalid_argument("slab half-width must be non-negative");
    if (static_cast<int>(l.l.size()) != law.dim) throw std::invalid_argument("heading dimension mismatch");
    std::vector<signed char> outcome(replicas, 0);  // 1 back, 0 front, -1 censored
    const double width = half_width;
    parallel_for(replicas, workers, [&](std::size_t r) {
        LazyEnvironment env(law, derive_key(seed, {r, 1}));
        CounterRng rng(derive_key(seed, {r, 2}));
        auto inside = [&](const Point& x) { return std::abs(l.project(x)) <= width; };
        const auto res = run_quenched(env, Point{}, StopKind::exit, inside, cap, rng);
        if (res.stop.censored()) {
            outcome[r] = -1;
        } else {
            outcome[r] = l.project(res.stop.position) < -width ? 1 : 0;
        }
    });
    ProportionEstimate est;
    std::uint64_t back = 0;
    for (signed char o : outcome) {
        if (o < 0) {
            ++est.censored;
        } else {
            back += static_cast<std::uint64_t>(o);
        }
    }
    est.replicas = replicas - est.censored;
    if (est.replicas > 0) {
        est.estimate = static_cast<double>(back) / static_cast<double>(est.replicas);
        est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(est.replicas));
    }
    return est;
}

VelocityEstimate velocity_estimate(const SiteLaw& law, const Heading& l, std::uint64_t horizon, std::uint64_t replicas,
                                   std::uint64_t seed, int workers) {
    if (horizon == 0 || replicas < 2) throw std::invalid_argument("velocity estimate needs a horizon and two replicas");
    std::vector<double> v(replicas);
    parallel_for(replicas, workers, [&](std::size_t r) {
        LazyEnvironment env(law, derive_key(seed, {r, 1}));
        CounterRng rng(derive_key(seed, {r, 2}));
        Point x;
        for (std::uint64_t n = 0; n < horizon; ++n) x = quenched_step(env, x, rng);
        v[r] = l.project(x) / static_cast<double>(horizon);
    });
    double mean = 0, sq = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(replicas);
    for (double x : v) sq += (x - mean) * (x - mean);
    const double var = sq / static_cast<double>(replicas - 1);
    return {mean, std::sqrt(var / static_cast<double>(replicas)), replicas};
}

RegenerationSample regeneration_experiment(const SiteLaw& law, const Heading& l, std::uint64_t horizon,
                                           std::uint64_t replicas, std::uint64_t seed, int workers) {
    std::vector<std::optional<std::uint64_t>> tau(replicas);
    parallel_for(replicas, workers, [&](std::size_t r) {
        LazyEnvironment env(law, derive_key(seed, {r, 1}));
        CounterRng rng(derive_key(seed, {r, 2}));
        std::vector<Point> path;
        path.reserve(horizon + 1);
        Point x;
        path.push_back(x);
        for (std::uint64_t n = 0; n < horizon; ++n) {
            x = quenched_step(env, x, rng);
            path.push_back(x);
        }
        tau[r] = detect_regenerations(path, l).tau1;
    });
    RegenerationSample out;
    for (const auto& t : tau) {
        if (t) {
            out.tau1.push_back(*t);
        } else {
            ++out.undetected;
        }
    }
    return out;
}

}  // namespace rwre
