#include "rwre/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace rwre {

namespace {

const Direction kRight(1), kLeft(-1), kUp(2), kDown(-2);

struct AliasEntry {
    const char* name;
    bool is_beta;
    Direction i;
    Direction j;
};

const std::array<AliasEntry, 8>& alias_table() {
    static const std::array<AliasEntry, 8> table = {{
        {"vdash", true, kRight, kRight},
        {"dashv", true, kLeft, kLeft},
        {"perp", true, kUp, kUp},
        {"top", true, kDown, kDown},
        {"ulcorner", false, kRight, kDown},
        {"urcorner", false, kLeft, kDown},
        {"lrcorner", false, kLeft, kUp},
        {"llcorner", false, kRight, kUp},
    }};
    return table;
}

const AliasEntry& find_alias(const std::string& alias) {
    for (const auto& a : alias_table()) {
        if (alias == a.name) return a;
    }
    throw std::invalid_argument("unknown exponent alias: " + alias);
}

}  // namespace

std::size_t ExponentSet::corner_index(Direction i, Direction j) {
    if (!i.orthogonal_to(j) || i.axis() > 1 || j.axis() > 1) {
        throw std::invalid_argument("corner needs two orthogonal planar directions");
    }
    const Direction h = i.axis() == 0 ? i : j;
    const Direction v = i.axis() == 0 ? j : i;
    return static_cast<std::size_t>((h.sign() > 0 ? 0 : 2) + (v.sign() > 0 ? 0 : 1));
}

std::array<std::pair<Direction, Direction>, 4> ExponentSet::corners() {
    return {{{kRight, kUp}, {kRight, kDown}, {kLeft, kUp}, {kLeft, kDown}}};
}

std::array<std::string, 8> ExponentSet::aliases() {
    std::array<std::string, 8> out;
    for (std::size_t k = 0; k < 8; ++k) out[k] = alias_table()[k].name;
    return out;
}

void ExponentSet::set(const std::string& alias, double v) {
    const auto& a = find_alias(alias);
    if (a.is_beta) {
        set_beta(a.i, v);
    } else {
        set_alpha(a.i, a.j, v);
    }
}

double ExponentSet::get(const std::string& alias) const {
    const auto& a = find_alias(alias);
    return a.is_beta ? beta(a.i) : alpha(a.i, a.j);
}

void ExponentSet::validate() const {
    for (double v : beta_) {
        if (!(v > 0.0)) throw std::invalid_argument("exponents must be positive");
    }
    for (double v : alpha_) {
        if (!(v > 0.0)) throw std::invalid_argument("exponents must be positive");
    }
}

bool ExponentSet::dominated() const {
    for (auto [i, j] : corners()) {
        if (alpha(i, j) > std::min(beta(i), beta(j))) return false;
    }
    return true;
}

void ExponentSet::enforce_domination() {
    for (auto [i, j] : corners()) set_alpha(i, j, std::min({alpha(i, j), beta(i), beta(j)}));
}

ExponentSet natural_exponents(const CounterexampleLaw& law) {
    ExponentSet x;
    x.set("dashv", law.beta_dashv);
    x.set("perp", law.beta_perp);
    x.set("vdash", law.beta_vdash);
    x.set("top", std::numeric_limits<double>::infinity());
    x.set("ulcorner", law.beta_vdash);
    x.set("urcorner", law.beta_dashv / 2.0);
    x.set("lrcorner", law.beta_perp);
    x.set("llcorner", std::min(law.beta_perp, law.beta_vdash));
    return x;
}

std::vector<RelationCheck> check_relations(const ExponentSet& x, double a) {
    std::vector<RelationCheck> out;
    for (Direction j : {kRight, kUp}) {
        const double v = x.beta(j) + x.beta(j.opposite());
        out.push_back({"edge " + j.name(), v, v > a});
    }
    for (auto [i, j] : ExponentSet::corners()) {
        const double v = x.alpha(i, j) + x.beta(i.opposite()) + x.beta(j.opposite());
        out.push_back({"wedge " + QSubset::corner(2, i, j).name(), v, v > a});
    }
    double square = 0;
    for (auto [i, j] : ExponentSet::corners()) square += x.alpha(i, j);
    out.push_back({"square", square, square > a});
    return out;
}

std::optional<double> relation_margin(const ExponentSet& x, double a) {
    for (int k = 0; k <= 60; ++k) {
        const double eps = std::ldexp(a, -k);
        const auto rel = check_relations(x, a + eps);
        if (std::all_of(rel.begin(), rel.end(), [](const RelationCheck& r) { return r.holds; })) return eps;
    }
    return std::nullopt;
}

std::string Instruction::name() const {
    if (kind == Kind::forward) return "forward(" + first.name() + ")";
    return "orthogonal(" + first.name() + "," + second.name() + ")";
}

double CapacityLabel::value(const ExponentSet& x) const { return kind == Kind::beta ? x.beta(i) : x.alpha(i, j); }

std::string CapacityLabel::name() const {
    if (kind == Kind::beta) return "beta(" + i.name() + ")";
    return "alpha(" + QSubset::corner(2, i, j).name() + ")";
}

namespace {

/// Argmax over a set of directions; ties go to the smallest slot.
Direction argmax_of(const TransitionVector& w, std::initializer_list<Direction> dirs) {
    std::optional<Direction> best;
    for (Direction e : dirs) {
        if (!best || w[e] > w[*best] || (w[e] == w[*best] && e < *best)) best = e;
    }
    return *best;
}

struct ComponentEdge {
    Point tail;
    Point head;
    Instruction instruction;
    CapacityLabel label;
};

class ExplorationProcess {
public:
    ExplorationProcess(const EnvironmentWindow& env, int radius) : env_(env), radius_(radius) {}

    void run(const Point& start, const Instruction& init) {
        instruction_.emplace(start, init);
        if (sup_norm(start) < radius_) active_.insert(start);
        const std::size_t guard = 8 * Box::ball(2, radius_).size() + 8;
        while (!active_.empty()) {
            if (++steps_ > guard) throw std::logic_error("exploration exceeded its step bound");
            const Point x = *active_.begin();
            active_.erase(active_.begin());
            expand(x);
        }
    }

    [[nodiscard]] const std::vector<ComponentEdge>& edges() const { return edges_; }
    [[nodiscard]] int bifurcations() const { return bifurcations_; }
    [[nodiscard]] std::size_t steps() const { return steps_; }

private:
    void expand(const Point& x) {
        const Instruction ins = instruction_.at(x);
        const TransitionVector& w = env_.at(x);
        if (ins.kind == Instruction::Kind::orthogonal) {
            const Direction k = argmax_of(w, {ins.first, ins.second});
            link(x, k, ins, {CapacityLabel::Kind::alpha, ins.first, ins.second}, ins);
            return;
        }
        const Direction j = ins.first;
        const QSubset t = QSubset::t_shape(2, j);
        if (attains_max(w, t, j)) {
            link(x, j, ins, {CapacityLabel::Kind::beta, j, j}, ins);
            return;
        }
        const Direction k1 = argmax_direction(w, t);
        const Direction k2 = argmax_of(w, {j, k1.opposite()});
        const CapacityLabel main{CapacityLabel::Kind::beta, k1, k1};
        const CapacityLabel side{CapacityLabel::Kind::alpha, j, k1.opposite()};
        if (bifurcations_ == 0) {
            link(x, k1, ins, main, Instruction::forward(k1));
            link(x, k2, ins, side, Instruction::orthogonal(j, k1.opposite()));
        } else {
            link(x, k1, ins, main, Instruction::orthogonal(j, k1));
            link(x, k2, ins, side, Instruction::orthogonal(j, k1.opposite()));
        }
        ++bifurcations_;
    }

    void link(const Point& x, Direction e, const Instruction& at_tail, const CapacityLabel& label,
              const Instruction& passed_on) {
        const Point y = x.step(e);
        edges_.push_back({x, y, at_tail, label});
        if (instruction_.emplace(y, passed_on).second && sup_norm(y) < radius_) active_.insert(y);
    }

    const EnvironmentWindow& env_;
    int radius_;
    std::map<Point, Instruction> instruction_;
    std::set<Point> active_;
    std::vector<ComponentEdge> edges_;
    int bifurcations_ = 0;
    std::size_t steps_ = 0;
};

}  // namespace

ExitStrategyGraph explore(const EnvironmentWindow& env, int radius) {
    if (env.dim() != 2) throw std::invalid_argument("exploration is defined in two dimensions");
    if (radius < 2) throw std::invalid_argument("exploration needs R >= 2");
    if (!env.box().contains(Point{-radius, -radius}) || !env.box().contains(Point{radius, radius})) {
        throw WindowExhausted("environment window does not cover B_R");
    }
    ExitStrategyGraph g;
    g.radius = radius;
    const Point o{};
    const TransitionVector& w0 = env.at(o);
    g.favourite = argmax_of(w0, {kRight, kLeft, kUp, kDown});
    g.companion = o.step(g.favourite);

    std::map<std::pair<Point, Point>, std::size_t> index;
    const std::array<std::pair<Point, Instruction>, 2> starts = {{
        {o, Instruction::forward(g.favourite.opposite())},
        {g.companion, Instruction::forward(g.favourite)},
    }};
    for (std::size_t c = 0; c < 2; ++c) {
        ExplorationProcess p(env, radius);
        p.run(starts[c].first, starts[c].second);
        g.bifurcations[c] = p.bifurcations();
        g.steps[c] = p.steps();
        for (const auto& e : p.edges()) {
            auto [it, inserted] = index.try_emplace({e.tail, e.head}, g.edges.size());
            if (inserted) g.edges.push_back({e.tail, e.head, 0, {}, {}});
            auto& merged = g.edges[it->second];
            merged.components |= static_cast<std::uint8_t>(1U << c);
            merged.instruction[c] = e.instruction;
            merged.label[c] = e.label;
        }
    }
    return g;
}

DirectedGraph ExitStrategyGraph::graph() const {
    DirectedGraph dg;
    for (const auto& e : edges) dg.add_edge(e.tail, e.head);
    return dg;
}

Terminals ExitStrategyGraph::terminals() const {
    Terminals t;
    t.sources = {Point{}, companion};
    t.sinks = sphere(2, radius);
    return t;
}

CapacityMap assign_capacities(const ExitStrategyGraph& g, const ExponentSet& x) {
    CapacityMap c(g.edges.size(), 0.0);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        for (const auto& label : g.edges[k].label) {
            if (label) c[k] = std::max(c[k], label->value(x));
        }
    }
    return c;
}

namespace {

std::string classify_cut(const ExitStrategyGraph& g, const ExponentSet& x, const std::vector<std::size_t>& cut) {
    int betas = 0, alphas = 0;
    for (std::size_t e : cut) {
        std::optional<CapacityLabel> best;
        for (const auto& label : g.edges[e].label) {
            if (label && (!best || label->value(x) > best->value(x))) best = label;
        }
        if (!best) continue;
        (best->kind == CapacityLabel::Kind::beta ? betas : alphas)++;
    }
    if (betas == 2 && alphas == 0) return "edge relation";
    if (betas == 2 && alphas == 1) return "wedge relation";
    if (betas == 0 && alphas == 4) return "square relation";
    return "cut with " + std::to_string(betas) + " beta and " + std::to_string(alphas) + " alpha edges";
}

}  // namespace

FlowStrengthReport verify_flow_strength(const ExitStrategyGraph& g, const ExponentSet& x, double a) {
    FlowStrengthReport r;
    r.margin = relation_margin(x, a);
    const DirectedGraph dg = g.graph();
    const auto cap = assign_capacities(g, x);
    const auto mf = max_flow(dg, cap, g.terminals());
    r.max_flow = mf.value;
    r.min_cut = mf.min_cut;
    if (!r.margin) {
        r.required = a;
        r.diagnostic = "exponent relations fail at level a";
        return r;
    }
    r.required = a + *r.margin;
    r.pass = r.max_flow >= r.required - 1e-9;
    if (!r.pass) r.diagnostic = classify_cut(g, x, mf.min_cut) + " below a + eps";
    return r;
}

void write_exit_strategy(std::ostream& out, const ExitStrategyGraph& g, const ExponentSet* x,
                         const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "# radius=" << g.radius << " companion=" << to_string(g.companion) << '\n';
    out << "tail_x,tail_y,head_x,head_y,components,instruction,capacity\n";
    const auto cap = x ? assign_capacities(g, *x) : CapacityMap(g.edges.size(), 0.0);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const auto& e = g.edges[k];
        std::string comps, ins;
        for (std::size_t c = 0; c < 2; ++c) {
            if (!(e.components & (1U << c))) continue;
            comps += comps.empty() ? "" : "+";
            comps += c == 0 ? "C1" : "C2";
            ins += ins.empty() ? "" : "|";
            ins += e.instruction[c]->name();
        }
        out << e.tail[0] << ',' << e.tail[1] << ',' << e.head[0] << ',' << e.head[1] << ',' << comps << ",\"" << ins
            << "\"," << cap[k] << '\n';
    }
}

}  // namespace rwre
