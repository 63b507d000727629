#include <json.hpp>
#include <cmath>

#include "rwre/conditions.hpp"

namespace rwre {

namespace {

nlohmann::json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

void ConditionReport::settle() {
    bool any_fail = false, any_open = false;
    for (const auto& c : clauses) {
        any_fail = any_fail || c.verdict == Verdict::fail;
        any_open = any_open || c.verdict == Verdict::inconclusive;
    }
    verdict = any_fail ? Verdict::fail : any_open ? Verdict::inconclusive : Verdict::pass;
}

const ClauseResult* ConditionReport::find(const std::string& clause_name) const {
    for (const auto& c : clauses) {
        if (c.name == clause_name) return &c;
    }
    return nullptr;
}

std::string ConditionReport::to_json() const {
    nlohmann::json j;
    j["condition"] = condition;
    j["verdict"] = to_string(verdict);
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["clauses"] = nlohmann::json::array();
    for (const auto& c : clauses) {
        j["clauses"].push_back({{"name", c.name},
                                {"verdict", to_string(c.verdict)},
                                {"estimate", number(c.estimate)},
                                {"half_width", number(c.half_width)},
                                {"threshold", number(c.threshold)},
                                {"detail", c.detail}});
    }
    for (const auto& [k, v] : metrics) j["metrics"][k] = number(v);
    for (const auto& [k, v] : notes) j["notes"][k] = v;
    return j.dump(2);
}

}  // namespace rwre
