#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

namespace rwre {

/// Transition probabilities of one site, indexed by direction slot.
class TransitionVector {
public:
    TransitionVector() = default;
    explicit TransitionVector(int dim) : dim_(dim) {}
    TransitionVector(int dim, std::span<const double> by_slot);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double operator[](Direction e) const { return p_[static_cast<std::size_t>(e.slot())]; }
    double& operator[](Direction e) { return p_[static_cast<std::size_t>(e.slot())]; }
    [[nodiscard]] double slot(int s) const { return p_[static_cast<std::size_t>(s)]; }
    double& slot(int s) { return p_[static_cast<std::size_t>(s)]; }
    [[nodiscard]] std::span<const double> values() const { return {p_.data(), static_cast<std::size_t>(2 * dim_)}; }

    /// Throws std::invalid_argument unless entries are non-negative and sum to one within 1e-12.
    void validate() const;
    [[nodiscard]] bool elliptic() const;

    bool operator==(const TransitionVector&) const = default;

private:
    int dim_ = 2;
    std::array<double, 2 * kMaxDim> p_{};
};

/// Three-template law whose tail exponents are set by (left, perp, right) = (β⊣, β⊥, β⊢).
struct CounterexampleLaw {
    double beta_dashv = 0.9;  // exponent of the left-pointing T
    double beta_perp = 0.5;   // exponent of the upward T
    double beta_vdash = 0.25; // exponent of the right-pointing T
};

enum class SiteType { I, II, III };
/// (1/8) u^(1/beta), whose CDF on (0, 1/8] is (8x)^beta.
double sample_power_law(double beta, double u);
SiteType counterexample_type(double u);
/// Template of each type from its small parameter (ξ, ζ or χ, in (0, 1/8]).
TransitionVector counterexample_template(SiteType type, double small);
/// Template with the small parameter drawn from the type's power law using the variate u.
TransitionVector counterexample_transition(const CounterexampleLaw& law, SiteType type, double u);

struct DirichletLaw {
    std::vector<double> alpha;  // one concentration per slot
};

/// ω(e) = κ + (1 - 2dκ)(w·1{e = drift} + (1 - w)·D_e) with D uniform on the simplex.
struct DriftedUniformLaw {
    double kappa = 0.05;
    Direction drift{1};
    double weight = 0.5;
};

struct DiscreteMixtureLaw {
    std::vector<double> weights;
    std::vector<TransitionVector> atoms;
};

/// I.i.d. site law on Z^dim.
struct SiteLaw {
    int dim = 2;
    std::variant<CounterexampleLaw, DirichletLaw, DriftedUniformLaw, DiscreteMixtureLaw> kind;

    [[nodiscard]] std::string name() const;
    void validate() const;
    [[nodiscard]] TransitionVector sample(CounterRng& rng) const;
    /// Realisation at x: a pure function of (seed, x).
    [[nodiscard]] TransitionVector at(std::uint64_t seed, const Point& x) const;
};

SiteLaw counterexample_law(double beta_dashv, double beta_perp, double beta_vdash);
SiteLaw uniform_law(int dim = 2);  // Dirichlet(1, ..., 1)
SiteLaw dirichlet_law(std::vector<double> alpha);
SiteLaw drifted_uniform_law(int dim, double kappa, Direction drift, double weight);
SiteLaw symmetric_law(int dim = 2);  // every site 1/(2d)
SiteLaw deterministic_law(int dim, Direction e);

struct ValidityRelation {
    std::string name;
    double lhs = 0;
    std::string op;  // ">=", ">", "<"
    double rhs = 0;
    bool holds = false;
};
/// The four relations the exponents of the counterexample must satisfy. Throws unless all lie in (0, 1).
std::vector<ValidityRelation> counterexample_relations(const CounterexampleLaw& law);

/// Immutable realisation of the environment on a finite box.
class EnvironmentWindow {
public:
    EnvironmentWindow(SiteLaw law, Box box, std::uint64_t seed, std::vector<TransitionVector> sites);

    [[nodiscard]] const SiteLaw& law() const { return law_; }
    [[nodiscard]] const Box& box() const { return box_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] int dim() const { return box_.dim(); }
    [[nodiscard]] bool contains(const Point& x) const { return box_.contains(x); }
    /// Throws WindowExhausted if x lies outside the box.
    [[nodiscard]] const TransitionVector& at(const Point& x) const;

private:
    SiteLaw law_;
    Box box_;
    std::uint64_t seed_;
    std::vector<TransitionVector> sites_;
};

struct WindowExhausted : std::out_of_range {
    using std::out_of_range::out_of_range;
};

EnvironmentWindow sample_window(const SiteLaw& law, const Box& box, std::uint64_t seed);
EnvironmentWindow make_window(const SiteLaw& law, const Box& box, std::vector<TransitionVector> sites);

/// Unbounded realisation, sampled on demand and memoised. Not safe for concurrent use.
class LazyEnvironment {
public:
    LazyEnvironment(SiteLaw law, std::uint64_t seed) : law_(std::move(law)), seed_(seed) {}

    [[nodiscard]] int dim() const { return law_.dim; }
    [[nodiscard]] bool contains(const Point&) const { return true; }
    [[nodiscard]] const TransitionVector& at(const Point& x) const;

private:
    SiteLaw law_;
    std::uint64_t seed_;
    mutable std::unordered_map<Point, TransitionVector, PointHash> cache_;
};

/// Non-empty subset of directions, as a bitmask over slots.
class QSubset {
public:
    QSubset() = default;
    QSubset(int dim, std::initializer_list<Direction> dirs);
    static QSubset from_mask(int dim, std::uint32_t mask);
    /// U \ {-j}
    static QSubset t_shape(int dim, Direction j);
    static QSubset corner(int dim, Direction i, Direction j);
    /// Aliases: vdash dashv perp top ulcorner urcorner llcorner lrcorner (d = 2).
    static QSubset parse(const std::string& name);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] std::uint32_t mask() const { return mask_; }
    [[nodiscard]] bool contains(Direction e) const { return (mask_ >> e.slot()) & 1U; }
    [[nodiscard]] std::vector<Direction> members() const;
    [[nodiscard]] std::string name() const;
    bool operator==(const QSubset&) const = default;

private:
    int dim_ = 2;
    std::uint32_t mask_ = 0;
};

double q_variable(const TransitionVector& w, const QSubset& s);
/// Maximiser over s; ties go to the smallest slot.
Direction argmax_direction(const TransitionVector& w, const QSubset& s);
/// True when e attains the maximum over s (ties included).
bool attains_max(const TransitionVector& w, const QSubset& s, Direction e);

/// Columns x, y, p_right, p_left, p_up, p_down in the plane; x1..xd and p_+1, p_-1, ... otherwise.
void write_environment_csv(std::ostream& out, const EnvironmentWindow& env, const std::string& header_comment = {});
EnvironmentWindow read_environment_csv(std::istream& in, const SiteLaw& law_for_lineage);

}  // namespace rwre
