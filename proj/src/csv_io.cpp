#include "homsim/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace homsim {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "length_um,reflectance,transmittance,throughput,P\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : rows) {
        out << format_double(row.length_um) << ',';
        if (row.ok) {
            out << format_double(row.reflectance) << ',' << format_double(row.transmittance)
                << ',' << format_double(row.throughput) << ',' << format_double(row.bunching);
        } else {
            out << format_double(nan) << ',' << format_double(nan) << ',' << format_double(nan)
                << ',' << format_double(nan);
        }
        out << '\n';
    }
}

void write_records_csv(std::ostream& out, std::span<const CoincidenceRecord> records) {
    out << "stage_position_um,counts,integration_s\n";
    for (const auto& record : records) {
        out << format_double(record.stage_position_um) << ',' << record.counts << ','
            << format_double(record.integration_time_s) << '\n';
    }
}

namespace {

constexpr const char* kRecordsHeader = "stage_position_um,counts,integration_s";

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

double parse_field(const std::string& field, const std::string& source, std::size_t line_no,
                   const char* column) {
    const std::string value = trim(field);
    if (value.empty()) {
        throw ValidationError(source + ": line " + std::to_string(line_no) + ": empty " +
                              column + " field");
    }
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || !std::isfinite(parsed)) {
        throw ValidationError(source + ": line " + std::to_string(line_no) +
                              ": cannot parse " + column + " value '" + value + "'");
    }
    return parsed;
}

} // namespace

std::vector<DatasetRow> read_dataset_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<DatasetRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty()) {
            continue;
        }
        if (!header_seen) {
            if (content != kRecordsHeader) {
                throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                                      ": expected header '" + kRecordsHeader + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream splitter(content);
        while (std::getline(splitter, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != 3) {
            throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                                  ": expected 3 comma-separated fields, got " +
                                  std::to_string(fields.size()));
        }
        DatasetRow row;
        row.stage_position_um = parse_field(fields[0], source_name, line_no, "stage_position_um");
        row.counts = parse_field(fields[1], source_name, line_no, "counts");
        row.integration_time_s = parse_field(fields[2], source_name, line_no, "integration_s");
        if (row.counts < 0.0) {
            throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                                  ": counts must be >= 0");
        }
        if (!(row.integration_time_s > 0.0)) {
            throw ValidationError(source_name + ": line " + std::to_string(line_no) +
                                  ": integration_s must be > 0");
        }
        rows.push_back(row);
    }
    if (!header_seen) {
        throw ValidationError(source_name + ": empty file");
    }
    return rows;
}

std::vector<DatasetRow> load_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open '" + path + "'");
    }
    return read_dataset_csv(in, path);
}

std::vector<FitPoint> fit_points_from_rows(std::span<const DatasetRow> rows) {
    std::vector<FitPoint> points(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        points[i] = {rows[i].stage_position_um, rows[i].counts};
    }
    return points;
}

} // namespace homsim
