#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/exploration.hpp"

namespace rwre {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sectioned key-value configuration (INI syntax). Every run is a function of this object.
class ExperimentConfig {
public:
    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig parse_string(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    void erase(const std::string& section, const std::string& key);

    /// Throws ConfigError naming "[section] key" when the key is absent or malformed.
    [[nodiscard]] std::string text(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double number(const std::string& section, const std::string& key) const;
    [[nodiscard]] double number(const std::string& section, const std::string& key, double fallback) const;
    [[nodiscard]] std::int64_t integer(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::int64_t integer(const std::string& section, const std::string& key, std::int64_t fallback) const;
    /// Comma- or space-separated numbers.
    [[nodiscard]] std::vector<double> numbers(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& section, const std::string& key,
                                              std::vector<double> fallback) const;

    /// Sections and keys in sorted order, one "key = value" per line.
    [[nodiscard]] std::string canonical() const;
    /// FNV-1a of the canonical text, as 16 hex digits.
    [[nodiscard]] std::string hash() const;

    /// The [law] section: variant = counterexample | uniform | dirichlet | drifted | symmetric | deterministic.
    [[nodiscard]] SiteLaw law() const;
    /// The [exponents] section, keyed by alias, starting from `base`.
    [[nodiscard]] ExponentSet exponents(const ExponentSet& base) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::uint64_t fnv1a(const std::string& bytes);
/// Parses "+1", "-2", "right", "left", "up", "down".
Direction parse_direction(const std::string& s);
/// Number that also accepts "inf".
double parse_number(const std::string& s);

}  // namespace rwre
