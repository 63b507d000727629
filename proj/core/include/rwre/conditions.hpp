#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/exploration.hpp"
#include "rwre/solver.hpp"
#include "rwre/tail.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct ClauseResult {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    double estimate = 0;  // tail index or probability, as the clause defines it
    double half_width = 0;
    double threshold = 0;  // exponent or bound it is compared against
    std::string detail;
};

struct ConditionReport {
    std::string condition;
    Verdict verdict = Verdict::inconclusive;
    std::vector<ClauseResult> clauses;
    std::map<std::string, double> metrics;
    std::map<std::string, std::string> notes;
    std::uint64_t seed = 0;
    std::string config_hash;

    /// Sets `verdict` from the clauses: any failure fails, else any inconclusive clause is inconclusive.
    void settle();
    [[nodiscard]] const ClauseResult* find(const std::string& clause_name) const;
    [[nodiscard]] std::string to_json() const;
};

/// i.i.d. site samples, taken along a line of sites so that they follow the window seeding.
std::vector<TransitionVector> sample_sites(const SiteLaw& law, std::size_t n, std::uint64_t seed);

// ---- (E)_0 and η_* ---------------------------------------------------------------------------

struct DirectionalSingularities {
    std::vector<TailIndexEstimate> by_slot;
};
DirectionalSingularities estimate_directional_singularities(const SiteLaw& law, std::size_t samples,
                                                            std::uint64_t seed, const TailOptions& opt = {});

/// max over orthogonal pairs {i, j} of min(η_i, η_j); η is given by slot (length 2d).
double compute_eta_star(std::span<const double> eta_by_slot);

ConditionReport check_e0(const SiteLaw& law, std::size_t samples, std::uint64_t seed, const TailOptions& opt = {});

// ---- (X)_a ----------------------------------------------------------------------------------

struct QSingularities {
    std::map<std::string, TailIndexEstimate> by_alias;  // the eight planar T-shapes and corners
};
QSingularities estimate_q_singularities(std::span<const TransitionVector> sites, const TailOptions& opt = {});

struct XOptions {
    bool rescue_search = true;
    double grid_step = 1.0 / 64.0;
    TailOptions tail{};
    std::size_t min_event_samples = 200;
};

/// Moment clauses, then the edge/wedge/square relations, then (optionally) a search over
/// dominated exponent sets on a dyadic grid for one that passes everything.
ConditionReport check_x(const SiteLaw& law, double a, const ExponentSet& exponents, std::size_t samples,
                        std::uint64_t seed, const XOptions& opt = {});

// ---- (B) ------------------------------------------------------------------------------------

struct BOptions {
    std::uint64_t replicas = 20'000;
    std::uint64_t cap = 10'000'000;
    double censor_limit = 0.01;
    TailOptions tail{};
    int workers = 1;
};

/// (a, b, R, c): annealed tail index of T_{B_R} above a + c, and R > a(a + c)/(b c) - 2.
ConditionReport check_b(const SiteLaw& law, double a, double b, int radius, double c, std::uint64_t seed,
                        const BOptions& opt = {});

/// True when R > a(a + c)/(b c) - 2, evaluated without division.
bool b_radius_relation(double a, double b, int radius, double c);
/// Whether some c in {2^-20, ..., 2^20} (dyadic) makes (1 + c)/(η c) - 2 < 0; returns the smallest.
std::optional<double> feasible_radius_zero_c(double eta_star);

// ---- (P) ------------------------------------------------------------------------------------

struct POptions {
    std::uint64_t replicas = 10'000;
    std::uint64_t cap = 100'000'000;
    double z = 3.0;
    int workers = 1;
};

ConditionReport check_p(const SiteLaw& law, double m, const Heading& l, std::span<const int> half_widths,
                        std::uint64_t seed, const POptions& opt = {});

// ---- (H) ------------------------------------------------------------------------------------

struct HOptions {
    std::size_t samples = 200'000;  // site samples for the exponents and C_i
    std::size_t environments = 500;
    double margin = 0.1;            // C_i uses the exponent η̃_i (1 - margin)
    double z = 3.0;
    TailOptions tail{};
    int workers = 1;
};

ConditionReport check_h(const SiteLaw& law, std::span<const int> radii, std::span<const double> qs,
                        std::uint64_t seed, const HOptions& opt = {});

// ---- attainability --------------------------------------------------------------------------

struct AttainabilityOptions {
    std::size_t environments = 200;
    Norm norm = Norm::sup;
    double z = 3.0;
    int max_radius = 12;  // largest radius the solver budget allows
    int workers = 1;
};

/// P(max_{|y| = ρ} P_0(H_y < H_0^+) <= u^{-(b + 2δ)/(b + ε)}) against u^{-(b + δ)}, ρ = ceil(δ' log u).
ConditionReport estimate_attainability(const SiteLaw& law, double b, double eps, std::span<const double> deltas,
                                       double delta_prime, std::span<const double> us, std::uint64_t seed,
                                       const AttainabilityOptions& opt = {});

// ---- wedge trap -----------------------------------------------------------------------------

struct WedgeOptions {
    std::uint64_t replicas = 1'000'000;
    std::uint64_t cap = 1'000'000'000;
    double censor_limit = 0.01;
    TailOptions tail{};
    int workers = 1;
};

struct WedgeResult {
    TailIndexEstimate visits_index;        // from simulated N_W(0)
    TailIndexEstimate escape_index;        // from the exact per-replica escape probability
    double target = 0;                     // (β⊣ + β⊥)/2 + β⊢
    double trap_frequency = 0;             // configuration (I at 0, III at e1, II at e2)
    std::uint64_t censored = 0;
    std::vector<std::uint64_t> visits;
};

WedgeResult wedge_experiment(const SiteLaw& law, std::uint64_t seed, const WedgeOptions& opt = {});
/// Escape probability from the wedge {0, e1, e2} for one realisation (exact).
double wedge_escape_probability(const TransitionVector& at0, const TransitionVector& at_e1, const TransitionVector& at_e2);

// ---- tail chain for N_{B_R}(0) ---------------------------------------------------------------

struct TailChainOptions {
    std::size_t environments = 2000;
    double delta = 0.05;
    int workers = 1;
};

/// N = N_{B_R}(0), returns to 0 before leaving B_R, so P_0(N > n) = E[(1 - p)^(n+1)] with p the
/// escape probability. Splits P_0(N > n) along
/// A_n = {max_{y ∈ ∂B_{R+1}} P_0(H_y < H_0^+) <= n^{-(a+δ)/(a+ε)}} and checks the two-term bound
/// exp(-n^{(ε-δ)/(a+ε)}) + C n^{-(a+δ)}, with C fitted at the smallest n.
ConditionReport nbr_tail_chain(const SiteLaw& law, double a, double eps, int radius, std::span<const double> ns,
                               std::uint64_t seed, const TailChainOptions& opt = {});

}  // namespace rwre
