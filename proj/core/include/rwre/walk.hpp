#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/rng.hpp"

namespace rwre {

enum class StopKind {
    exit,        // first n >= 0 with X_n outside A
    hit,         // first n >= 0 with X_n in A
    return_to,   // first n >= 1 with X_n in A
};

struct StoppingRecord {
    StopKind kind = StopKind::exit;
    std::optional<std::uint64_t> time;  // empty when the step cap was reached first
    Point position;                     // X at the stopping time, or at the cap
    [[nodiscard]] bool censored() const { return !time.has_value(); }
};

struct WalkResult {
    std::vector<Point> path;  // X_0, ..., X_n (only when recording)
    StoppingRecord stop;
    std::uint64_t steps = 0;
};

/// One step of the quenched chain from x.
template <class Env>
Point quenched_step(const Env& env, const Point& x, CounterRng& rng) {
    const TransitionVector& w = env.at(x);
    const int n = 2 * w.dim();
    double u = rng.uniform();
    for (int s = 0; s < n - 1; ++s) {
        const double p = w.slot(s);
        if (u <= p && p > 0.0) return x.step(Direction::from_slot(s));
        u -= p;
    }
    for (int s = n - 1; s >= 0; --s) {
        if (w.slot(s) > 0.0) return x.step(Direction::from_slot(s));
    }
    return x;
}

/// Runs the quenched walk until the stopping rule fires or `cap` steps have been taken.
/// `in_a` is the membership predicate of the set A. Leaving a finite window throws WindowExhausted.
template <class Env, class Region>
WalkResult run_quenched(const Env& env, Point start, StopKind kind, Region&& in_a, std::uint64_t cap, CounterRng& rng,
                        bool record = false) {
    WalkResult r;
    r.stop.kind = kind;
    Point x = start;
    if (record) r.path.push_back(x);
    auto stops = [&](std::uint64_t n, const Point& p) {
        switch (kind) {
            case StopKind::exit: return !in_a(p);
            case StopKind::hit: return in_a(p);
            case StopKind::return_to: return n >= 1 && in_a(p);
        }
        return false;
    };
    for (std::uint64_t n = 0;; ++n) {
        if (stops(n, x)) {
            r.stop.time = n;
            r.stop.position = x;
            r.steps = n;
            return r;
        }
        if (n == cap) break;
        x = quenched_step(env, x, rng);
        if (record) r.path.push_back(x);
    }
    r.stop.position = x;
    r.steps = cap;
    return r;
}

struct VisitCount {
    std::uint64_t visits = 0;  // visits to the target before leaving the region (time 0 included)
    bool censored = false;
};

/// N_region(target) along one quenched trajectory started at `start`.
template <class Env, class Region>
VisitCount count_visits(const Env& env, Point start, const Point& target, Region&& in_region, std::uint64_t cap,
                        CounterRng& rng) {
    VisitCount c;
    Point x = start;
    for (std::uint64_t n = 0; n <= cap; ++n) {
        if (!in_region(x)) return c;
        if (x == target) ++c.visits;
        x = quenched_step(env, x, rng);
    }
    c.censored = true;
    return c;
}

/// N_A(0): returns to the origin strictly after time 0 and before leaving A (`visits` holds the count).
template <class Env, class Region>
VisitCount count_returns(const Env& env, Region&& in_region, std::uint64_t cap, CounterRng& rng) {
    VisitCount c = count_visits(env, Point{}, Point{}, in_region, cap, rng);
    if (c.visits > 0) --c.visits;
    return c;
}

/// Unit direction of the regeneration projection.
struct Heading {
    std::vector<double> l;  // length dim, normalised on construction
    explicit Heading(std::vector<double> v);
    static Heading axis(int dim, Direction e);
    [[nodiscard]] double project(const Point& x) const;
};

struct RegenerationRecord {
    std::optional<std::uint64_t> tau1;  // empty if no candidate inside the horizon
    std::vector<std::uint64_t> s_times;
    std::vector<std::optional<std::uint64_t>> d_times;
};

/// First regeneration time of an observed path; times beyond the horizon count as infinite.
RegenerationRecord detect_regenerations(std::span<const Point> path, const Heading& l);

struct ProportionEstimate {
    double estimate = 0;
    double standard_error = 0;
    std::uint64_t replicas = 0;
    std::uint64_t censored = 0;
};

/// Annealed probability of leaving {|x·l| <= L} through the back side {x·l < -L}.
ProportionEstimate slab_exit_estimate(const SiteLaw& law, const Heading& l, int half_width, std::uint64_t replicas,
                                      std::uint64_t seed, std::uint64_t cap = 100'000'000, int workers = 1);

struct VelocityEstimate {
    double mean = 0;  // E[X_n · l] / n
    double standard_error = 0;
    std::uint64_t replicas = 0;
};

VelocityEstimate velocity_estimate(const SiteLaw& law, const Heading& l, std::uint64_t horizon, std::uint64_t replicas,
                                   std::uint64_t seed, int workers = 1);

struct RegenerationSample {
    std::vector<std::uint64_t> tau1;  // detected first regeneration times
    std::uint64_t undetected = 0;     // replicas with no candidate inside the horizon
};

RegenerationSample regeneration_experiment(const SiteLaw& law, const Heading& l, std::uint64_t horizon,
                                           std::uint64_t replicas, std::uint64_t seed, int workers = 1);

}  // namespace rwre
