#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

/// Directed graph on lattice sites whose edges join nearest neighbours.
class DirectedGraph {
public:
    std::size_t add_vertex(const Point& p);
    /// Adds (tail, head); returns the existing index when the edge is already present.
    std::size_t add_edge(const Point& tail, const Point& head);

    [[nodiscard]] std::size_t vertex_count() const { return vertices_.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
    [[nodiscard]] const Point& vertex(std::size_t v) const { return vertices_[v]; }
    [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
    [[nodiscard]] std::pair<std::size_t, std::size_t> edge(std::size_t e) const { return edges_[e]; }
    [[nodiscard]] std::optional<std::size_t> find_vertex(const Point& p) const;
    [[nodiscard]] std::optional<std::size_t> find_edge(const Point& tail, const Point& head) const;
    [[nodiscard]] const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }
    [[nodiscard]] const std::vector<std::size_t>& in_edges(std::size_t v) const { return in_[v]; }

    /// All nearest-neighbour edges of the box, both orientations.
    static DirectedGraph lattice_box(const Box& box);

private:
    std::vector<Point> vertices_;
    std::map<Point, std::size_t> vertex_index_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

/// Non-negative capacity per edge; +inf is allowed.
using CapacityMap = std::vector<double>;

struct Terminals {
    std::vector<Point> sources;
    std::vector<Point> sinks;
};

/// θ: value per edge of a graph, carrying flow from sources to sinks.
struct Flow {
    std::vector<double> values;

    [[nodiscard]] double divergence(const DirectedGraph& g, std::size_t v) const;
    /// Sum of source divergences.
    [[nodiscard]] double strength(const DirectedGraph& g, const Terminals& t) const;
};

struct MaxFlowResult {
    double value = 0;  // +inf when every separating cut has infinite capacity
    Flow flow;
    std::vector<std::size_t> min_cut;  // edge indices of a minimum separating cutset
    [[nodiscard]] double cut_capacity(const CapacityMap& c) const;
};

/// Maximum flow with shortest augmenting paths, plus a minimum cutset certificate.
/// Edges entering a source or leaving a sink never carry flow.
MaxFlowResult max_flow(const DirectedGraph& g, const CapacityMap& c, const Terminals& t);

/// True when removing `cut` leaves no directed path from a source to a sink.
bool separates(const DirectedGraph& g, const Terminals& t, const std::vector<std::size_t>& cut);

struct WeightedPath {
    std::vector<Point> sites;  // source ... sink
    std::vector<std::size_t> edges;
    double weight = 0;
};

struct PathDecomposition {
    std::vector<WeightedPath> paths;
    Flow residual;
};

/// Greedy path decomposition: repeatedly peels the lexicographically smallest path among those
/// of maximal bottleneck, starting from a source with positive remaining divergence.
PathDecomposition decompose_flow(const DirectedGraph& g, const Flow& f, const Terminals& t, double floor = 1e-12);

/// Adds the edge 0 -> 0' so that a flow from {0, 0'} becomes a flow from 0 alone.
Flow root_at_origin(DirectedGraph& g, const Flow& f, const Point& companion);

struct ProbabilityBoundSample {
    double max_hitting = 0;  // max over y in ∂B_R of P_0(H_y < H_0^+), walk killed outside B_R
    double log_weight = 0;   // sum_e θ(e) log ω(e)
    double strength = 0;
    bool lhs_event = false;  // max_hitting <= q
    bool rhs_event = false;  // prod ω^θ <= q^strength
};

ProbabilityBoundSample flow_probability_bound(const EnvironmentWindow& env, int radius, const DirectedGraph& g,
                                              const Flow& f, const Terminals& t, double q);

struct EdgeList {
    DirectedGraph graph;
    CapacityMap capacity;
    Terminals terminals;
};

/// Lines "x1 y1 x2 y2 capacity", plus "source x y" / "sink x y"; '#' starts a comment.
EdgeList read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const DirectedGraph& g, const std::vector<double>& values,
                     const std::string& header_comment = {});

}  // namespace rwre
