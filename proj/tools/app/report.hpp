#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mdlatlrr::app {

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(const std::string& text);

/// Writes records with a fixed column set, either as JSON lines or as CSV
/// with a single header row. Columns missing from a record are written as
/// null / empty.
class ReportWriter {
public:
    ReportWriter(std::ostream& out, ReportFormat format, std::vector<std::string> columns);

    void write(const nlohmann::ordered_json& record);

private:
    std::ostream& out_;
    ReportFormat format_;
    std::vector<std::string> columns_;
    bool header_written_ = false;
};

}  // namespace mdlatlrr::app
