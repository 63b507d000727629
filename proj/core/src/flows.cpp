#include "rwre/flows.hpp"

#include <algorithm>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/edmonds_karp_max_flow.hpp>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rwre/solver.hpp"

namespace rwre {

std::size_t DirectedGraph::add_vertex(const Point& p) {
    auto [it, inserted] = vertex_index_.try_emplace(p, vertices_.size());
    if (inserted) {
        vertices_.push_back(p);
        out_.emplace_back();
        in_.emplace_back();
    }
    return it->second;
}

std::size_t DirectedGraph::add_edge(const Point& tail, const Point& head) {
    int distance = 0;
    for (std::size_t i = 0; i < kMaxDim; ++i) distance += std::abs(tail[i] - head[i]);
    if (distance != 1) {
        throw std::invalid_argument("edge " + to_string(tail) + "->" + to_string(head) + " does not join neighbours");
    }
    const std::size_t u = add_vertex(tail);
    const std::size_t v = add_vertex(head);
    auto [it, inserted] = edge_index_.try_emplace({u, v}, edges_.size());
    if (inserted) {
        edges_.emplace_back(u, v);
        out_[u].push_back(it->second);
        in_[v].push_back(it->second);
    }
    return it->second;
}

std::optional<std::size_t> DirectedGraph::find_vertex(const Point& p) const {
    if (auto it = vertex_index_.find(p); it != vertex_index_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::size_t> DirectedGraph::find_edge(const Point& tail, const Point& head) const {
    const auto u = find_vertex(tail), v = find_vertex(head);
    if (!u || !v) return std::nullopt;
    if (auto it = edge_index_.find({*u, *v}); it != edge_index_.end()) return it->second;
    return std::nullopt;
}

DirectedGraph DirectedGraph::lattice_box(const Box& box) {
    DirectedGraph g;
    const auto pts = box.points();
    for (const Point& p : pts) g.add_vertex(p);
    for (const Point& p : pts) {
        for (Direction e : directions(box.dim())) {
            const Point q = p.step(e);
            if (box.contains(q)) g.add_edge(p, q);
        }
    }
    return g;
}

double Flow::divergence(const DirectedGraph& g, std::size_t v) const {
    double d = 0;
    for (std::size_t e : g.out_edges(v)) d += values[e];
    for (std::size_t e : g.in_edges(v)) d -= values[e];
    return d;
}

double Flow::strength(const DirectedGraph& g, const Terminals& t) const {
    double s = 0;
    for (const Point& a : t.sources) {
        if (auto v = g.find_vertex(a)) s += divergence(g, *v);
    }
    return s;
}

double MaxFlowResult::cut_capacity(const CapacityMap& c) const {
    double s = 0;
    for (std::size_t e : min_cut) s += c[e];
    return s;
}

namespace {

std::vector<bool> membership(const DirectedGraph& g, const std::vector<Point>& pts) {
    std::vector<bool> in(g.vertex_count(), false);
    for (const Point& p : pts) {
        if (auto v = g.find_vertex(p)) in[*v] = true;
    }
    return in;
}

}  // namespace

MaxFlowResult max_flow(const DirectedGraph& g, const CapacityMap& c, const Terminals& t) {
    if (c.size() != g.edge_count()) throw std::invalid_argument("capacity map size differs from edge count");
    for (double v : c) {
        if (!(v >= 0.0)) throw std::invalid_argument("capacities must be non-negative");
    }
    const auto is_source = membership(g, t.sources);
    const auto is_sink = membership(g, t.sinks);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (is_source[v] && is_sink[v]) throw std::invalid_argument("a site cannot be both source and sink");
    }

    double finite_total = 1.0;
    for (double v : c) {
        if (std::isfinite(v)) finite_total += v;
    }
    const double big = 2.0 * finite_total;  // stands in for +inf: exceeds every finite cut

    using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
    using Graph = boost::adjacency_list<
        boost::vecS, boost::vecS, boost::directedS, boost::no_property,
        boost::property<boost::edge_capacity_t, double,
                        boost::property<boost::edge_residual_capacity_t, double,
                                        boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
    const std::size_t n = g.vertex_count();
    Graph bg(n + 2);
    const std::size_t super_source = n, super_sink = n + 1;
    auto cap = boost::get(boost::edge_capacity, bg);
    auto rev = boost::get(boost::edge_reverse, bg);
    auto res = boost::get(boost::edge_residual_capacity, bg);
    auto link = [&](std::size_t u, std::size_t v, double w) {
        auto fwd = boost::add_edge(u, v, bg).first;
        auto back = boost::add_edge(v, u, bg).first;
        cap[fwd] = w;
        cap[back] = 0.0;
        rev[fwd] = back;
        rev[back] = fwd;
        return fwd;
    };
    std::vector<std::optional<Traits::edge_descriptor>> handle(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge(e);
        if (is_source[v] || is_sink[u]) continue;
        handle[e] = link(u, v, std::isfinite(c[e]) ? c[e] : big);
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (is_source[v]) link(super_source, v, 2.0 * big * static_cast<double>(g.edge_count() + 1));
        if (is_sink[v]) link(v, super_sink, 2.0 * big * static_cast<double>(g.edge_count() + 1));
    }

    MaxFlowResult out;
    out.flow.values.assign(g.edge_count(), 0.0);
    if (std::none_of(is_source.begin(), is_source.end(), [](bool b) { return b; }) ||
        std::none_of(is_sink.begin(), is_sink.end(), [](bool b) { return b; })) {
        return out;
    }
    boost::edmonds_karp_max_flow(bg, super_source, super_sink);

    const double tol = 1e-12 * finite_total;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (handle[e]) out.flow.values[e] = std::max(0.0, cap[*handle[e]] - res[*handle[e]]);
    }
    // Residual reachability from the sources gives the source side of a minimum cut.
    std::vector<bool> reach(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < n; ++v) {
        if (is_source[v]) {
            reach[v] = true;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t e : g.out_edges(u)) {
            const std::size_t v = g.edge(e).second;
            if (!reach[v] && handle[e] && res[*handle[e]] > tol) {
                reach[v] = true;
                queue.push_back(v);
            }
        }
        for (std::size_t e : g.in_edges(u)) {
            const std::size_t v = g.edge(e).first;
            if (!reach[v] && handle[e] && out.flow.values[e] > tol) {
                reach[v] = true;
                queue.push_back(v);
            }
        }
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge(e);
        if (reach[u] && !reach[v]) out.min_cut.push_back(e);
    }
    const bool unbounded = std::any_of(out.min_cut.begin(), out.min_cut.end(), [&](std::size_t e) { return !std::isfinite(c[e]); });
    out.value = unbounded ? std::numeric_limits<double>::infinity() : out.flow.strength(g, t);
    return out;
}

bool separates(const DirectedGraph& g, const Terminals& t, const std::vector<std::size_t>& cut) {
    std::vector<bool> removed(g.edge_count(), false);
    for (std::size_t e : cut) removed[e] = true;
    const auto is_sink = membership(g, t.sinks);
    std::vector<bool> seen = membership(g, t.sources);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (seen[v]) queue.push_back(v);
    }
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        if (is_sink[u]) return false;
        for (std::size_t e : g.out_edges(u)) {
            const std::size_t v = g.edge(e).second;
            if (!removed[e] && !seen[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return true;
}

namespace {

/// Vertices that reach a sink through `usable` edges without touching `blocked` vertices.
std::vector<bool> reaches_sink(const DirectedGraph& g, const std::vector<bool>& usable, const std::vector<bool>& is_sink,
                               const std::vector<bool>& blocked) {
    std::vector<bool> r(g.vertex_count(), false);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (is_sink[v] && !blocked[v]) {
            r[v] = true;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t e : g.in_edges(v)) {
            const std::size_t u = g.edge(e).first;
            if (usable[e] && !r[u] && !blocked[u] && !is_sink[u]) {
                r[u] = true;
                queue.push_back(u);
            }
        }
    }
    return r;
}

/// Largest bottleneck over source-to-sink paths (modified Dijkstra); 0 when none exists.
double widest_bottleneck(const DirectedGraph& g, const std::vector<double>& vals, const std::vector<std::size_t>& starts,
                         const std::vector<bool>& is_sink, double floor) {
    std::vector<double> best(g.vertex_count(), 0.0);
    std::set<std::pair<double, std::size_t>, std::greater<>> heap;
    for (std::size_t s : starts) {
        best[s] = std::numeric_limits<double>::infinity();
        heap.emplace(best[s], s);
    }
    double answer = 0;
    while (!heap.empty()) {
        const auto [w, u] = *heap.begin();
        heap.erase(heap.begin());
        if (w < best[u]) continue;
        if (is_sink[u]) {
            answer = std::max(answer, w);
            continue;
        }
        for (std::size_t e : g.out_edges(u)) {
            if (vals[e] <= floor) continue;
            const std::size_t v = g.edge(e).second;
            const double cand = std::min(w, vals[e]);
            if (cand > best[v]) {
                if (best[v] > 0) heap.erase({best[v], v});
                best[v] = cand;
                heap.emplace(cand, v);
            }
        }
    }
    return answer;
}

}  // namespace

PathDecomposition decompose_flow(const DirectedGraph& g, const Flow& f, const Terminals& t, double floor) {
    if (f.values.size() != g.edge_count()) throw std::invalid_argument("flow size differs from edge count");
    PathDecomposition out;
    out.residual = f;
    auto& vals = out.residual.values;
    const auto is_sink = membership(g, t.sinks);
    std::vector<std::size_t> sources;
    for (const Point& a : t.sources) {
        if (auto v = g.find_vertex(a)) sources.push_back(*v);
    }
    std::sort(sources.begin(), sources.end(), [&](std::size_t a, std::size_t b) { return g.vertex(a) < g.vertex(b); });

    for (std::size_t iter = 0; iter <= g.edge_count(); ++iter) {
        std::vector<std::size_t> starts;
        for (std::size_t s : sources) {
            if (out.residual.divergence(g, s) > floor) starts.push_back(s);
        }
        const double bottleneck = widest_bottleneck(g, vals, starts, is_sink, floor);
        if (bottleneck <= floor) break;
        const double level = bottleneck - 1e-12 * std::max(1.0, bottleneck);
        std::vector<bool> usable(g.edge_count());
        for (std::size_t e = 0; e < g.edge_count(); ++e) usable[e] = vals[e] >= level && vals[e] > floor;

        std::vector<bool> on_path(g.vertex_count(), false);
        const auto reach0 = reaches_sink(g, usable, is_sink, on_path);
        std::optional<std::size_t> start;
        for (std::size_t s : starts) {
            if (reach0[s]) {
                start = s;
                break;
            }
        }
        if (!start) break;
        WeightedPath path;
        std::size_t cur = *start;
        on_path[cur] = true;
        path.sites.push_back(g.vertex(cur));
        while (!is_sink[cur]) {
            const auto reach = reaches_sink(g, usable, is_sink, on_path);
            std::optional<std::size_t> pick;
            for (std::size_t e : g.out_edges(cur)) {
                const std::size_t v = g.edge(e).second;
                if (!usable[e] || on_path[v] || !reach[v]) continue;
                if (!pick || g.vertex(v) < g.vertex(g.edge(*pick).second)) pick = e;
            }
            if (!pick) throw std::logic_error("path extension lost sink reachability");
            cur = g.edge(*pick).second;
            on_path[cur] = true;
            path.edges.push_back(*pick);
            path.sites.push_back(g.vertex(cur));
        }
        double w = std::numeric_limits<double>::infinity();
        for (std::size_t e : path.edges) w = std::min(w, vals[e]);
        for (std::size_t e : path.edges) vals[e] = std::max(0.0, vals[e] - w);
        path.weight = w;
        out.paths.push_back(std::move(path));
    }
    return out;
}

Flow root_at_origin(DirectedGraph& g, const Flow& f, const Point& companion) {
    const Point o{};
    Flow rooted = f;
    const auto vc = g.find_vertex(companion);
    if (!vc) return rooted;
    const double carried = f.divergence(g, *vc);
    const std::size_t e = g.add_edge(o, companion);
    rooted.values.resize(g.edge_count(), 0.0);
    rooted.values[e] += std::max(0.0, carried);
    return rooted;
}

ProbabilityBoundSample flow_probability_bound(const EnvironmentWindow& env, int radius, const DirectedGraph& g,
                                              const Flow& f, const Terminals& t, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in (0, 1]");
    ProbabilityBoundSample s;
    s.max_hitting = max_hitting_probability(env, radius, Norm::sup).max_probability;
    s.strength = f.strength(g, t);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (f.values[e] <= 0.0) continue;
        const auto [u, v] = g.edge(e);
        const Point& x = g.vertex(u);
        const Point& y = g.vertex(v);
        Direction dir(1);
        for (Direction d : directions(env.dim())) {
            if (x.step(d) == y) dir = d;
        }
        const double w = env.at(x)[dir];
        s.log_weight += w > 0.0 ? f.values[e] * std::log(w) : -std::numeric_limits<double>::infinity();
    }
    s.lhs_event = s.max_hitting <= q;
    s.rhs_event = s.log_weight <= s.strength * std::log(q);
    return s;
}

EdgeList read_edge_list(std::istream& in) {
    EdgeList out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        auto fail = [&] { throw std::invalid_argument("malformed edge list line " + std::to_string(lineno)); };
        if (first == "source" || first == "sink") {
            int x = 0, y = 0;
            if (!(ss >> x >> y)) fail();
            (first == "source" ? out.terminals.sources : out.terminals.sinks).emplace_back(x, y);
            out.graph.add_vertex(Point{x, y});
            continue;
        }
        int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
        double c = 0;
        try {
            x1 = std::stoi(first);
        } catch (const std::exception&) {
            fail();
        }
        std::string cap;
        if (!(ss >> y1 >> x2 >> y2 >> cap)) fail();
        c = cap == "inf" ? std::numeric_limits<double>::infinity() : std::stod(cap);
        const std::size_t e = out.graph.add_edge(Point{x1, y1}, Point{x2, y2});
        out.capacity.resize(out.graph.edge_count(), 0.0);
        out.capacity[e] = c;
    }
    out.capacity.resize(out.graph.edge_count(), 0.0);
    return out;
}

void write_edge_list(std::ostream& out, const DirectedGraph& g, const std::vector<double>& values,
                     const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "# x1 y1 x2 y2 value\n";
    out.precision(17);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edge(e);
        const Point& a = g.vertex(u);
        const Point& b = g.vertex(v);
        out << a[0] << ' ' << a[1] << ' ' << b[0] << ' ' << b[1] << ' ' << values[e] << '\n';
    }
}

}  // namespace rwre
