#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "homsim/coupled_mode.hpp"
#include "homsim/experiment_sim.hpp"
#include "homsim/fitting.hpp"

namespace homsim {

// 12 significant digits, '.' decimal separator, locale independent.
std::string format_double(double value);

// Header: length_um,reflectance,transmittance,throughput,P
// Flagged sweep rows print nan for the physical columns.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// Header: stage_position_um,counts,integration_s
// counts is printed as a plain integer.
void write_records_csv(std::ostream& out, std::span<const CoincidenceRecord> records);

// Row of a measured or simulated coincidence dataset. counts is a double so
// externally produced (e.g. averaged) data can be fitted unchanged.
struct DatasetRow {
    double stage_position_um = 0.0;
    double counts = 0.0;
    double integration_time_s = 0.0;
};

// Reads a records CSV back. Malformed input is rejected with the 1-based line
// number in the message. source_name prefixes error messages.
std::vector<DatasetRow> read_dataset_csv(std::istream& in, const std::string& source_name);
std::vector<DatasetRow> load_dataset_csv(const std::string& path);

std::vector<FitPoint> fit_points_from_rows(std::span<const DatasetRow> rows);

} // namespace homsim
