#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwre/conditions.hpp"

namespace rwre::cli {

/// Provenance written at the top of every output file.
struct Stamp {
    std::string condition;
    std::string config_hash;
    std::uint64_t seed = 0;
    [[nodiscard]] std::string comment() const;
};

/// Shortest round-trip decimal form; "inf"/"nan" for non-finite values.
std::string format_number(double v);

/// CSV file whose first line is the stamp comment and second line the header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const Stamp& stamp, const std::vector<std::string>& columns);
    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(double v);
    CsvWriter& cell(std::uint64_t v);
    CsvWriter& cell(int v) { return cell(static_cast<double>(v)); }
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json json_number(double v);
void write_clauses_csv(const std::filesystem::path& path, const Stamp& stamp, const ConditionReport& report);

}  // namespace rwre::cli
