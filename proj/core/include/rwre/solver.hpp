#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwre/env.hpp"

namespace rwre {

enum class SiteRole { interior, target, taboo };

/// Absorbing chain on a finite set of interior sites. Every neighbour of an interior site
/// reachable with positive probability must be classified as interior, target or taboo.
struct AbsorbingChainSpec {
    std::vector<Point> interior;
    std::function<SiteRole(const Point&)> classify;
};

enum class SolveMethod { automatic, dense, sparse, iterative };
std::string to_string(SolveMethod m);

struct NumericSingularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveReport {
    std::vector<Point> states;
    std::vector<double> values;  // +inf marks states that are never absorbed (for times)
    SolveMethod method = SolveMethod::automatic;
    double residual = 0;

    [[nodiscard]] double at(const Point& x) const;
};

struct SolveOptions {
    SolveMethod method = SolveMethod::automatic;
    std::size_t dense_limit = 2000;  // automatic: dense LU up to this many states, sparse LU above
    double tolerance = 1e-12;        // iterative sweeps stop at this sup-norm change
    std::size_t max_sweeps = 10'000'000;
};

/// h(x) = P_x(reach a target before a taboo site); zero on sites that never get absorbed.
SolveReport solve_hitting(const EnvironmentWindow& env, const AbsorbingChainSpec& spec, const SolveOptions& opt = {});
/// E_x[absorption time], absorption meaning any target or taboo site.
SolveReport solve_absorption_time(const EnvironmentWindow& env, const AbsorbingChainSpec& spec,
                                  const SolveOptions& opt = {});
/// E_x[(absorption time)^2].
SolveReport solve_absorption_second_moment(const EnvironmentWindow& env, const AbsorbingChainSpec& spec,
                                           const SolveOptions& opt = {});

/// Value seen from a site outside the interior after one forced step: sum_e w(x,e) v(x+e),
/// with v = 1 on targets, 0 on taboo sites and the solved value on interior sites.
double one_step_hitting(const EnvironmentWindow& env, const Point& x, const AbsorbingChainSpec& spec,
                        const SolveReport& h);

/// P_0(T_{B_{R-1}} < H_0^+): leave B_{R-1} before returning to the origin. Needs R >= 1.
double escape_probability(const EnvironmentWindow& env, int radius, const SolveOptions& opt = {});
/// E_0[N_{B_R}(0)] = (1 - p)/p with p = escape_probability(env, R + 1); +inf when p = 0.
double expected_return_count(const EnvironmentWindow& env, int radius, const SolveOptions& opt = {});
/// E_0[T_{B_R}].
double expected_exit_time(const EnvironmentWindow& env, int radius, const SolveOptions& opt = {});
/// E_0[T_{B_R}^2].
double exit_time_second_moment(const EnvironmentWindow& env, int radius, const SolveOptions& opt = {});
/// Expected number of visits to y (time 0 included) before leaving B_R, starting from x.
double expected_visits(const EnvironmentWindow& env, int radius, const Point& x, const Point& y,
                       const SolveOptions& opt = {});

/// P_0(reach ∂B_R before returning to 0, staying in the hyperplane {x_axis = 0}).
double directional_escape_probability(const EnvironmentWindow& env, int axis, int radius,
                                      const SolveOptions& opt = {});

enum class Norm { l1, l2, sup };
Norm parse_norm(const std::string& s);
/// Candidate sites y with |y| = rho in the given norm (for l2: ceil(|y|_2) = rho).
std::vector<Point> norm_sphere(int dim, int rho, Norm norm);

struct HittingProfile {
    double max_probability = 0;
    Point argmax;
    std::vector<Point> candidates;
    std::vector<double> probabilities;
};

/// max over |y| = rho of P_0(H_y < H_0^+) for the walk killed on leaving B_rho (sup-norm box),
/// computed from one factorisation of the killed Green function.
HittingProfile max_hitting_probability(const EnvironmentWindow& env, int rho, Norm norm = Norm::sup,
                                       const SolveOptions& opt = {});

/// Same quantity for one y via its own absorbing solve (target y, taboo 0 and the outside of B_rho).
double hitting_probability_direct(const EnvironmentWindow& env, int rho, const Point& y, const SolveOptions& opt = {});

}  // namespace rwre
