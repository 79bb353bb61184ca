#include "csflab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csflab/error.hpp"

namespace csflab {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string(what) + ": " + e.what());
  }
}

json spacing_to_json(const AdaptiveSpacing& s) {
  return {{"c", s.c}, {"h_min", s.h_min}, {"h_max", s.h_max}, {"grading", s.grading}};
}

AdaptiveSpacing spacing_from_json(const json& j) {
  AdaptiveSpacing s;
  s.c = j.at("c").get<double>();
  s.h_min = j.at("h_min").get<double>();
  s.h_max = j.at("h_max").get<double>();
  s.grading = j.at("grading").get<double>();
  return s;
}

std::string csv_field(const CsvCell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace

json curve_to_json(const DiscreteCurve& curve) {
  json pts = json::array();
  for (const Vec2& p : curve.points()) pts.push_back({p.x, p.y});
  json j = {{"closed", curve.closed()}, {"points", std::move(pts)}};
  j["time"] = curve.time() ? json(*curve.time()) : json(nullptr);
  return j;
}

DiscreteCurve curve_from_json(const json& j) {
  return guarded("curve", [&] {
    std::vector<Vec2> pts;
    for (const json& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::Io, "curve point must be [x, y]");
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    std::optional<double> t;
    if (j.contains("time") && !j["time"].is_null()) t = j["time"].get<double>();
    return DiscreteCurve(std::move(pts), j.at("closed").get<bool>(), t);
  });
}

DiscreteCurve load_curve(const std::filesystem::path& path) {
  return curve_from_json(load_json(path));
}

void save_curve(const std::filesystem::path& path, const DiscreteCurve& curve) {
  save_json(path, curve_to_json(curve));
}

json controls_to_json(const EvolveControls& c) {
  const StepControls& s = c.step;
  return {{"dt_max", c.dt_max},
          {"save_interval", c.save_interval},
          {"kappa_cap", c.kappa_cap},
          {"max_steps", c.max_steps},
          {"step",
           {{"n", s.n},
            {"adaptive", s.adaptive},
            {"spacing", spacing_to_json(s.spacing)},
            {"remesh_every", s.remesh_every},
            {"cfl", s.cfl},
            {"fixed_dt", s.fixed_dt},
            {"max_kappa_dt", s.max_kappa_dt},
            {"max_halvings", s.max_halvings}}}};
}

EvolveControls controls_from_json(const json& j) {
  return guarded("controls", [&] {
    EvolveControls c;
    c.dt_max = j.at("dt_max").get<double>();
    c.save_interval = j.at("save_interval").get<double>();
    c.kappa_cap = j.at("kappa_cap").get<double>();
    c.max_steps = j.at("max_steps").get<std::size_t>();
    const json& s = j.at("step");
    c.step.n = s.at("n").get<std::size_t>();
    c.step.adaptive = s.at("adaptive").get<bool>();
    c.step.spacing = spacing_from_json(s.at("spacing"));
    c.step.remesh_every = s.at("remesh_every").get<int>();
    c.step.cfl = s.at("cfl").get<double>();
    c.step.fixed_dt = s.at("fixed_dt").get<bool>();
    c.step.max_kappa_dt = s.at("max_kappa_dt").get<double>();
    c.step.max_halvings = s.at("max_halvings").get<int>();
    return c;
  });
}

void write_trajectory(std::ostream& out, const FlowTrajectory& traj) {
  json header = {{"kind", "header"},
                 {"mode", to_string(traj.mode)},
                 {"controls", controls_to_json(traj.controls)},
                 {"stop_reason", traj.stop_reason},
                 {"frame_count", traj.frames.size()}};
  out << header.dump() << '\n';
  for (const FlowState& f : traj.frames) {
    json line = {{"kind", "frame"}, {"time", f.time}, {"mode", to_string(f.mode)}, {"curve", curve_to_json(f.curve)}};
    out << line.dump() << '\n';
  }
}

FlowTrajectory read_trajectory(std::istream& in) {
  FlowTrajectory traj;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = "trajectory line " + std::to_string(lineno);
    guarded(where.c_str(), [&] {
      const json j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        if (have_header) throw Error(ErrorCode::Io, where + ": second header");
        have_header = true;
        traj.mode = flow_mode_from_string(j.at("mode").get<std::string>());
        traj.controls = controls_from_json(j.at("controls"));
        traj.stop_reason = j.at("stop_reason").get<std::string>();
        expected = j.at("frame_count").get<std::size_t>();
      } else if (kind == "frame") {
        if (!have_header) throw Error(ErrorCode::Io, where + ": frame before header");
        const double t = j.at("time").get<double>();
        if (!traj.frames.empty() && !(t > traj.frames.back().time))
          throw Error(ErrorCode::Io, where + ": frame times must increase");
        traj.frames.push_back(
            {curve_from_json(j.at("curve")), t, flow_mode_from_string(j.at("mode").get<std::string>())});
      } else {
        throw Error(ErrorCode::Io, where + ": unknown record kind " + kind);
      }
      return 0;
    });
  }
  if (!have_header) throw Error(ErrorCode::Io, "trajectory has no header record");
  if (traj.frames.size() != expected)
    throw Error(ErrorCode::Io, "trajectory header promises " + std::to_string(expected) + " frames, found " +
                                   std::to_string(traj.frames.size()));
  return traj;
}

void save_trajectory(const std::filesystem::path& path, const FlowTrajectory& traj) {
  auto out = open_out(path);
  write_trajectory(out, traj);
  finish(out, path);
}

FlowTrajectory load_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trajectory(in);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto row = [&](auto begin, auto end, auto fmt) {
    for (auto it = begin; it != end; ++it) {
      if (it != begin) out << ',';
      out << fmt(*it);
    }
    out << "\r\n";
  };
  row(table.header.begin(), table.header.end(), [](const std::string& s) { return csv_field(CsvCell{s}); });
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw Error(ErrorCode::Io, "csv row width does not match the header");
    row(r.begin(), r.end(), csv_field);
  }
}

void save_csv(const std::filesystem::path& path, const CsvTable& table) {
  auto out = open_out(path);
  write_csv(out, table);
  finish(out, path);
}

std::size_t CsvText::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw Error(ErrorCode::Io, "csv has no column " + name);
}

CsvText read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  char ch;
  auto end_record = [&] {
    rec.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(rec));
    rec.clear();
    any = false;
  };
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      rec.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get(ch);
      end_record();
    } else if (ch == '\n') {
      end_record();
    } else {
      field += ch;
    }
  }
  if (quoted) throw Error(ErrorCode::Io, "csv ends inside a quoted field");
  if (any) end_record();
  if (records.empty()) throw Error(ErrorCode::Io, "csv has no header row");
  CsvText t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      throw Error(ErrorCode::Io, "csv record " + std::to_string(i) + " has the wrong width");
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

CsvText load_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in);
}

json run_config_to_json(const RunConfig& c) {
  return {{"command", c.command}, {"params", c.params}, {"seed", c.seed}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c = guarded("run config", [&] {
    RunConfig r;
    r.command = j.at("command").get<std::string>();
    r.params = j.at("params");
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  });
  if (!c.params.is_object()) throw Error(ErrorCode::Io, "run config params must be an object");
  for (const auto& [key, value] : c.params.items()) {
    if (key.find("tol") == std::string::npos) continue;
    if (!value.is_number() || !(value.get<double>() > 0.0))
      throw Error(ErrorCode::OutOfDomain, "tolerance " + key + " must be a positive number");
  }
  return c;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json load_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  return guarded(path.string().c_str(), [&] { return json::parse(in); });
}

void save_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace csflab
