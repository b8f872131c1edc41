#include "report.hpp"

#include <charconv>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr::app {
namespace {

std::string csv_field(const nlohmann::ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        return std::string(buf, res.ptr);
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + '"';
    }
    return v.dump();
}

}  // namespace

ReportFormat parse_report_format(const std::string& text) {
    if (text == "json") return ReportFormat::json;
    if (text == "csv") return ReportFormat::csv;
    throw ArgumentError("unknown report format '" + text + "' (expected json or csv)");
}

ReportWriter::ReportWriter(std::ostream& out, ReportFormat format, std::vector<std::string> columns)
    : out_(out), format_(format), columns_(std::move(columns)) {}

void ReportWriter::write(const nlohmann::ordered_json& record) {
    if (format_ == ReportFormat::json) {
        nlohmann::ordered_json row;
        for (const auto& c : columns_) row[c] = record.contains(c) ? record.at(c) : nullptr;
        out_ << row.dump() << '\n';
    } else {
        if (!header_written_) {
            for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
            out_ << '\n';
            header_written_ = true;
        }
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            out_ << (i ? "," : "") << (record.contains(columns_[i]) ? csv_field(record.at(columns_[i])) : "");
        }
        out_ << '\n';
    }
    out_.flush();
}

}  // namespace mdlatlrr::app
