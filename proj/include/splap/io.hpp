#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "splap/branch.hpp"
#include "splap/grid.hpp"
#include "splap/solve.hpp"
#include "splap/verify.hpp"

namespace splap::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Deterministic shortest round-trip formatting for doubles.
std::string format_double(double v);

json params_to_json(const ProblemParams& params);
ProblemParams params_from_json(const json& j);

json grid_descriptor(const RadialGrid& grid);

// CSV with columns r,value; leading '#' comment lines embed the schema
// version and the resolved config.
std::string field_to_csv(const Field& field, const json& config);
Field field_from_csv(const std::string& text, const GridPtr& grid);

std::string diagram_to_csv(const BifurcationDiagram& diagram, const json& config);
json diagram_summary(const BifurcationDiagram& diagram, const json& config);

// Scatter + branch polylines, fold marker and nonexistence barrier lines.
// Throws Error{EmptyDiagram}.
std::string diagram_to_svg(const BifurcationDiagram& diagram);

json report_to_json(const VerificationReport& report, const json& config);
std::string report_to_table(const VerificationReport& report);

// T-calibration cache: one JSON file per directory, key "N=..,p=..,delta=..".
std::string calibration_key(int dim_N, double p, double delta);
std::map<std::string, double> load_calibration(const std::string& dir);
void save_calibration(const std::string& dir, const std::map<std::string, double>& table);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace splap::io
