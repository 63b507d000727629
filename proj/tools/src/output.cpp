#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rwre::cli {

std::string Stamp::comment() const {
    return "# condition=" + condition + " config_hash=" + config_hash + " seed=" + std::to_string(seed);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const Stamp& stamp, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << stamp.comment() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    out_ << (filled_++ ? "," : "");
    if (v.find_first_of(",\"\n") == std::string::npos) {
        out_ << v;
    } else {
        out_ << '"';
        for (char c : v) out_ << (c == '"' ? "\"\"" : std::string(1, c));
        out_ << '"';
    }
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
    if (filled_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
    out_ << '\n';
    filled_ = 0;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void write_clauses_csv(const std::filesystem::path& path, const Stamp& stamp, const ConditionReport& report) {
    CsvWriter csv(path, stamp, {"clause", "verdict", "estimate", "half_width", "threshold", "detail"});
    for (const auto& c : report.clauses) {
        csv.cell(c.name).cell(to_string(c.verdict)).cell(c.estimate).cell(c.half_width).cell(c.threshold).cell(c.detail);
        csv.end_row();
    }
}

}  // namespace rwre::cli
