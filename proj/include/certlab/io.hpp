// Serialization: CSV writers with 17-significant-digit round-trip, JSON
// reports/manifests (NaN encoded as the string "nan"), and deterministic PPM
// renderings of heatmaps.  Images are presentational only; the data files are
// the contract.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "certlab/scan.hpp"

namespace certlab {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Shortest decimal form that round-trips a double exactly (17 significant
// digits); non-finite values become "nan", "inf", "-inf".
std::string format_double(double x);

// RFC-4180 quoting for text fields (numeric fields never need it).
std::string csv_escape(const std::string& field);

void write_heatmap_csv(const Heatmap& h, const std::string& path);
void write_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                          const std::string& path);

// Rows of fields; the first row is the header.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// JSON text with envelope fields (tool_version, schema_version, subcommand)
// and the full flat config echo, seed included; re-running with these values
// reproduces every output bit-identically.
std::string manifest_json(const std::string& subcommand,
                          const std::map<std::string, std::string>& config);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// JSON encoding helpers for report writers: numbers are emitted with
// format_double, non-finite values as quoted strings.
std::string json_number(double x);

// Binary PPM (P6).  Pass/fail maps render green/red, converged maps
// green/white, scalar maps as a grayscale ramp over the finite value range.
// A non-empty overlay (one value per cell) draws the overlay's zero contour
// in black by marking sign changes between neighboring cells.
void render_heatmap_ppm(const Heatmap& h, const std::string& path,
                        const std::vector<double>& overlay = {},
                        int pixel_scale = 3);

}  // namespace certlab
