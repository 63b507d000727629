#include "rwre/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rwre {

namespace {

std::string key_name(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double parse_number(const std::string& s) {
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters in number: " + s);
    return v;
}

Direction parse_direction(const std::string& s) {
    if (s == "right" || s == "e1") return Direction(1);
    if (s == "left") return Direction(-1);
    if (s == "up" || s == "e2") return Direction(2);
    if (s == "down") return Direction(-2);
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad direction: " + s);
    return Direction(v);
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("key outside a section: " + section);
        auto& dst = cfg.sections_[section];
        for (const auto& [key, value] : body) dst[key] = value.data();
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse(in);
}

bool ExperimentConfig::has_section(const std::string& section) const { return sections_.contains(section); }

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.contains(key);
}

void ExperimentConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

void ExperimentConfig::erase(const std::string& section, const std::string& key) {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return;
    it->second.erase(key);
    if (it->second.empty()) sections_.erase(it);
}

std::string ExperimentConfig::text(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError("missing key " + key_name(section, key));
    return sections_.at(section).at(key);
}

std::string ExperimentConfig::text(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? text(section, key) : fallback;
}

double ExperimentConfig::number(const std::string& section, const std::string& key) const {
    const std::string v = text(section, key);
    try {
        return parse_number(v);
    } catch (const std::exception&) {
        throw ConfigError("malformed number for " + key_name(section, key) + ": " + v);
    }
}

double ExperimentConfig::number(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

std::int64_t ExperimentConfig::integer(const std::string& section, const std::string& key) const {
    const std::string v = text(section, key);
    try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("malformed integer for " + key_name(section, key) + ": " + v);
    }
}

std::int64_t ExperimentConfig::integer(const std::string& section, const std::string& key, std::int64_t fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

std::vector<double> ExperimentConfig::numbers(const std::string& section, const std::string& key) const {
    std::string v = text(section, key);
    for (char& c : v) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(v);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        try {
            out.push_back(parse_number(token));
        } catch (const std::exception&) {
            throw ConfigError("malformed list for " + key_name(section, key) + ": " + token);
        }
    }
    return out;
}

std::vector<double> ExperimentConfig::numbers(const std::string& section, const std::string& key,
                                              std::vector<double> fallback) const {
    return has(section, key) ? numbers(section, key) : fallback;
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    for (const auto& [section, body] : sections_) {
        out << "[" << section << "]\n";
        for (const auto& [key, value] : body) out << key << " = " << value << "\n";
    }
    return out.str();
}

std::string ExperimentConfig::hash() const {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << fnv1a(canonical());
    return out.str();
}

SiteLaw ExperimentConfig::law() const {
    if (!has_section("law")) throw ConfigError("missing [law] section");
    const std::string variant = text("law", "variant");
    const int dim = static_cast<int>(integer("law", "dim", 2));
    try {
        SiteLaw law;
        if (variant == "counterexample") {
            law = counterexample_law(number("law", "beta_dashv", 0.9), number("law", "beta_perp", 0.5),
                                     number("law", "beta_vdash", 0.25));
        } else if (variant == "uniform") {
            law = uniform_law(dim);
        } else if (variant == "dirichlet") {
            law = dirichlet_law(numbers("law", "alpha"));
        } else if (variant == "drifted") {
            law = drifted_uniform_law(dim, number("law", "kappa", 0.05), parse_direction(text("law", "drift", "+1")),
                                      number("law", "weight", 0.5));
        } else if (variant == "symmetric") {
            law = symmetric_law(dim);
        } else if (variant == "deterministic") {
            law = deterministic_law(dim, parse_direction(text("law", "direction", "+1")));
        } else {
            throw ConfigError("unknown value for [law] variant: " + variant);
        }
        law.validate();
        return law;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid [law] section: ") + e.what());
    }
}

ExponentSet ExperimentConfig::exponents(const ExponentSet& base) const {
    ExponentSet x = base;
    if (!has_section("exponents")) return x;
    for (const auto& [key, value] : sections_.at("exponents")) {
        try {
            x.set(key, parse_number(value));
        } catch (const std::exception&) {
            throw ConfigError("malformed exponent " + key_name("exponents", key) + ": " + value);
        }
    }
    return x;
}

}  // namespace rwre
