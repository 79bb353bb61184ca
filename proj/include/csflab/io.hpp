#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "csflab/flow.hpp"
#include "csflab/geometry.hpp"

namespace csflab {

using json = nlohmann::json;

// {"closed": bool, "points": [[x, y], ...], "time": number | null}
json curve_to_json(const DiscreteCurve& curve);
// Validates through the DiscreteCurve constructor (orientation is normalized).
// Throws Error(Io) on a malformed document.
DiscreteCurve curve_from_json(const json& j);

DiscreteCurve load_curve(const std::filesystem::path& path);
void save_curve(const std::filesystem::path& path, const DiscreteCurve& curve);

json controls_to_json(const EvolveControls& c);
EvolveControls controls_from_json(const json& j);

// JSON-Lines: a header record {"kind": "header", mode, controls, stop_reason,
// frame_count} followed by one {"kind": "frame", time, mode, curve} per line.
// The step log is not persisted.
void write_trajectory(std::ostream& out, const FlowTrajectory& traj);
FlowTrajectory read_trajectory(std::istream& in);
void save_trajectory(const std::filesystem::path& path, const FlowTrajectory& traj);
FlowTrajectory load_trajectory(const std::filesystem::path& path);

// %.17g; non-finite values become "nan", "inf", "-inf".
std::string format_double(double v);

using CsvCell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or
// line break. The header row is always written.
void write_csv(std::ostream& out, const CsvTable& table);
void save_csv(const std::filesystem::path& path, const CsvTable& table);

struct CsvText {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Index of a header column; throws Error(Io) if absent.
  std::size_t column(const std::string& name) const;
};
CsvText read_csv(std::istream& in);
CsvText load_csv(const std::filesystem::path& path);

// Command parameters plus a seed. Serialization round-trips bit-exactly
// (doubles are written with 17 significant digits).
struct RunConfig {
  std::string command;
  json params = json::object();
  std::uint64_t seed = 0;
  bool operator==(const RunConfig&) const = default;
};

json run_config_to_json(const RunConfig& c);
// Throws Error(OutOfDomain) if a parameter whose name contains "tol" is not
// a positive number, Error(Io) on a malformed document.
RunConfig run_config_from_json(const json& j);

// Non-finite numbers are mapped to null; callers carry explicit status fields.
json finite_or_null(double v);

json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& j);

}  // namespace csflab
