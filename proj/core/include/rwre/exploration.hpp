#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/flows.hpp"

namespace rwre {

/// Singularity exponents of the planar T-shaped and corner Q-variables. beta(j) belongs to
/// the T-shape U \ {-j}; alpha(i, j) to the corner {i, j}, symmetric in its arguments.
/// +inf marks a Q-variable that is bounded away from zero.
class ExponentSet {
public:
    ExponentSet() { beta_.fill(0.0); alpha_.fill(0.0); }

    [[nodiscard]] double beta(Direction j) const { return beta_[static_cast<std::size_t>(j.slot())]; }
    [[nodiscard]] double alpha(Direction i, Direction j) const { return alpha_[corner_index(i, j)]; }
    void set_beta(Direction j, double v) { beta_[static_cast<std::size_t>(j.slot())] = v; }
    void set_alpha(Direction i, Direction j, double v) { alpha_[corner_index(i, j)] = v; }

    /// Reads names vdash dashv perp top (beta) and ulcorner urcorner lrcorner llcorner (alpha).
    void set(const std::string& alias, double v);
    [[nodiscard]] double get(const std::string& alias) const;

    /// Throws unless every exponent is positive.
    void validate() const;
    /// alpha(i, j) <= min(beta(i), beta(j)) for every corner.
    [[nodiscard]] bool dominated() const;
    /// Replaces each corner exponent by min(alpha, beta(i), beta(j)).
    void enforce_domination();

    static std::size_t corner_index(Direction i, Direction j);
    static std::array<std::pair<Direction, Direction>, 4> corners();
    static std::array<std::string, 8> aliases();

private:
    std::array<double, 4> beta_{};
    std::array<double, 4> alpha_{};
};

/// Exponents of the counterexample law read off its three templates.
ExponentSet natural_exponents(const CounterexampleLaw& law);

struct RelationCheck {
    std::string name;  // "edge +1", "wedge ulcorner", "square"
    double value = 0;  // sum of exponents
    bool holds = false;
};

/// Edge, wedge and square relations at level a (each sum must exceed a).
std::vector<RelationCheck> check_relations(const ExponentSet& x, double a);
/// Largest a * 2^-k (k >= 0) keeping every relation strict at level a + eps; empty if none.
std::optional<double> relation_margin(const ExponentSet& x, double a);

struct Instruction {
    enum class Kind { forward, orthogonal } kind = Kind::forward;
    Direction first{1};   // forward direction, or the first orthogonal direction
    Direction second{1};  // second orthogonal direction (unused for forward)

    static Instruction forward(Direction j) { return {Kind::forward, j, j}; }
    static Instruction orthogonal(Direction i, Direction j) { return {Kind::orthogonal, i, j}; }
    [[nodiscard]] std::string name() const;
    bool operator==(const Instruction&) const = default;
};

/// What determines an edge's capacity within one component.
struct CapacityLabel {
    enum class Kind { beta, alpha } kind = Kind::beta;
    Direction i{1};
    Direction j{1};
    [[nodiscard]] double value(const ExponentSet& x) const;
    [[nodiscard]] std::string name() const;
};

struct ExploredEdge {
    Point tail;
    Point head;
    std::uint8_t components = 0;  // bit 0: process from 0, bit 1: process from 0'
    std::array<std::optional<Instruction>, 2> instruction;  // instruction at the tail, per component
    std::array<std::optional<CapacityLabel>, 2> label;
};

/// G_R: union of the two exploration processes.
struct ExitStrategyGraph {
    int radius = 0;
    Direction favourite{1};  // direction of 0' from the origin
    Point companion;         // 0'
    std::vector<ExploredEdge> edges;
    std::array<int, 2> bifurcations{};
    std::array<std::size_t, 2> steps{};

    [[nodiscard]] DirectedGraph graph() const;  // edge order matches `edges`
    [[nodiscard]] Terminals terminals() const;  // {0, 0'} to ∂B_R
};

/// Runs both exploration processes on B_R (d = 2, R >= 2).
ExitStrategyGraph explore(const EnvironmentWindow& env, int radius);

/// Per-edge capacity, the maximum over the components containing the edge.
CapacityMap assign_capacities(const ExitStrategyGraph& g, const ExponentSet& x);

struct FlowStrengthReport {
    std::optional<double> margin;  // eps, empty when the relations fail
    double required = 0;           // a + eps
    double max_flow = 0;
    bool pass = false;
    std::vector<std::size_t> min_cut;
    std::string diagnostic;  // relation family matched by the minimum cut when it is too weak
};

FlowStrengthReport verify_flow_strength(const ExitStrategyGraph& g, const ExponentSet& x, double a);

void write_exit_strategy(std::ostream& out, const ExitStrategyGraph& g, const ExponentSet* x,
                         const std::string& header_comment = {});

}  // namespace rwre
