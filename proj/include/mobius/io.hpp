#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mobius/equilibria.hpp"
#include "mobius/geometry.hpp"
#include "mobius/integrator.hpp"
#include "mobius/reduced.hpp"

namespace mobius::io {

using json = nlohmann::ordered_json;

/// Shortest decimal that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

json to_json(const VortexSystem& s);
/// Parses {"vortices":[{"x","y","gamma","label"}]}; x may be any real.
/// Throws ValidationError on schema violations.
VortexSystem system_from_json(const json& j);
VortexSystem parse_system(const std::string& text);
VortexSystem read_system(const std::filesystem::path& path);

json to_json(const Diagnostics& d);
json to_json(const EquilibriumResult& r);
json to_json(const CriticalReport& r);
json to_json(const OrbitReport& r);
json to_json(const ReducedParams& p);

/// Column-oriented rows shared by the CSV and JSON writers.
struct Table {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Comma-delimited with a header line and Unix newlines.
  std::string to_csv() const;
  /// Array of objects keyed by column name; NaN becomes null.
  json to_json() const;
};

/// `t,label,x,y,gamma`, one row per vortex per sample.
Table trajectory_table(const Trajectory& traj);
/// `t,label`.
Table flips_table(const Trajectory& traj);
/// `dx,y1,H`; masked cells hold NaN.
Table portrait_table(const Portrait& p);

std::string dump(const json& j);

/// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes every file or none: contents go to temporaries first and are
/// renamed into place only after all writes succeed. Throws IoError.
void write_all(const std::vector<std::pair<std::filesystem::path, std::string>>& files);

}  // namespace mobius::io
