/// @file io.hpp
/// @brief Deterministic output formats: CSV time series (17 significant
///        digits, LF endings) and the flat binary snapshot format with an
///        ASCII header. Writes are atomic (temp file + rename).

#pragma once

#include <string>
#include <vector>

namespace corofsi {

void write_timeseries(const std::string& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

/// Parses a file produced by write_timeseries; values round-trip exactly.
void read_timeseries(const std::string& path, std::vector<std::string>& columns,
                     std::vector<std::vector<double>>& rows);

/// One named field in a snapshot file.
struct SnapshotField {
    std::string name;
    int nx = 0, ny = 0;
    std::string staggering; // cell | uface | vface | node1d
    std::vector<double> data;
};

/// Format: lines "field <name> <nx> <ny> <staggering>", one "time <t>",
/// a blank line, then row-major little-endian float64 blocks in header
/// order.
void write_snapshot(const std::string& path,
                    const std::vector<SnapshotField>& fields, double t);

void read_snapshot(const std::string& path, std::vector<SnapshotField>& fields,
                   double& t);

/// Atomic text write used for config echoes and small reports.
void write_text(const std::string& path, const std::string& text);

} // namespace corofsi
