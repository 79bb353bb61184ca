#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csflab/asymptotics.hpp"
#include "csflab/critical.hpp"
#include "csflab/error.hpp"
#include "csflab/exact.hpp"
#include "csflab/flow.hpp"
#include "csflab/gaussian.hpp"
#include "csflab/io.hpp"
#include "csflab/parallel.hpp"
#include "csflab/spectral.hpp"
#include "csflab/verify.hpp"

using namespace csflab;

namespace {

enum class Level { Error = 0, Info = 1, Debug = 2 };
Level g_level = Level::Info;

void log(Level l, const std::string& msg) {
  if (static_cast<int>(l) <= static_cast<int>(g_level)) std::cerr << msg << '\n';
}

// Exit 2 on a bad CSFLAB_LOG, like any other usage error.
bool read_log_env() {
  const char* v = std::getenv("CSFLAB_LOG");
  if (!v) return true;
  const std::string s = v;
  if (s == "error") g_level = Level::Error;
  else if (s == "info") g_level = Level::Info;
  else if (s == "debug") g_level = Level::Debug;
  else return false;
  return true;
}

Vec2 parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("point", "expected a,b but got " + s);
  try {
    std::size_t ua = 0, ub = 0;
    const std::string a = s.substr(0, comma), b = s.substr(comma + 1);
    const Vec2 p{std::stod(a, &ua), std::stod(b, &ub)};
    if (ua != a.size() || ub != b.size()) throw std::invalid_argument(s);
    return p;
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("point", "expected a,b but got " + s);
  }
}

std::string fmt(double v) { return format_double(v); }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- exact -----------------------------------------------------------------

struct ExactOpts {
  std::string family = "circle", out;
  double time = -0.5;
  std::size_t n = 512;
  bool rescaled = false, adaptive = false;
  AdaptiveSpacing spacing{};
  double angle = 0.0, offset = 0.0, half_length = 50.0, window = 1.2;
};

void add_spacing(CLI::App* sub, AdaptiveSpacing& s) {
  sub->add_option("--c", s.c, "adaptive spacing constant")->check(CLI::PositiveNumber);
  sub->add_option("--h-min", s.h_min, "smallest adaptive spacing")->check(CLI::PositiveNumber);
  sub->add_option("--h-max", s.h_max, "largest adaptive spacing")->check(CLI::PositiveNumber);
  sub->add_option("--grading", s.grading, "adaptive spacing growth per unit length")->check(CLI::PositiveNumber);
}

int run_exact(const ExactOpts& o) {
  ExactFamily f;
  f.kind = family_from_string(o.family);
  f.angle = o.angle;
  f.offset = o.offset;
  f.half_length = o.half_length;
  f.window = o.window;
  DiscreteCurve c = o.rescaled ? (o.adaptive ? sample_rescaled_adaptive(f, o.time, o.spacing)
                                             : sample_rescaled(f, o.time, o.n))
                               : (o.adaptive ? sample_adaptive(f, o.time, o.spacing) : sample(f, o.time, o.n))
                                     .with_time(o.time);
  save_curve(o.out, c);
  std::cout << "exact: " << o.family << (o.rescaled ? " tau=" : " t=") << short_num(o.time) << " n=" << c.size()
            << " length=" << short_num(c.length()) << " -> " << o.out << '\n';
  return 0;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateOpts {
  std::string in, out, mode = "physical";
  double horizon = 0.0, dt = 1e-4, save_interval = 0.0, cfl = 0.25, kappa_cap = 1e6;
  std::optional<double> start;
  std::size_t n = 512;
  bool adaptive = false, fixed_dt = false;
  AdaptiveSpacing spacing{};
  int remesh_every = 1, max_halvings = 20;
};

int run_simulate(const SimulateOpts& o) {
  const DiscreteCurve c = load_curve(o.in);
  EvolveControls ec;
  ec.dt_max = o.dt;
  ec.save_interval = o.save_interval;
  ec.kappa_cap = o.kappa_cap;
  ec.step.n = o.n;
  ec.step.adaptive = o.adaptive;
  ec.step.spacing = o.spacing;
  ec.step.remesh_every = o.remesh_every;
  ec.step.cfl = o.cfl;
  ec.step.fixed_dt = o.fixed_dt;
  ec.step.max_halvings = o.max_halvings;
  const double t0 = o.start.value_or(c.time().value_or(0.0));
  const auto t_start = std::chrono::steady_clock::now();
  FlowTrajectory tr = evolve({c.with_time(t0), t0, flow_mode_from_string(o.mode)}, o.horizon, ec, true);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  log(Level::Debug, "simulate: " + std::to_string(tr.step_log.size()) + " steps in " + short_num(secs) + " s");
  save_trajectory(o.out, tr);
  std::cout << "simulate: " << o.mode << ' ' << tr.frames.size() << " frames, " << tr.step_log.size()
            << " steps, time " << short_num(tr.frames.front().time) << " -> " << short_num(tr.frames.back().time)
            << ", stop " << tr.stop_reason << " -> " << o.out << '\n';
  return 0;
}

// ---- rescale -----------------------------------------------------------------

struct RescaleOpts {
  std::string traj, out;
};

int run_rescale(const RescaleOpts& o) {
  const FlowTrajectory in = load_trajectory(o.traj);
  FlowTrajectory out;
  out.mode = FlowMode::Rescaled;
  out.controls = in.controls;
  out.stop_reason = in.stop_reason;
  for (const FlowState& f : in.frames) out.frames.push_back(rescale_frame(f));
  save_trajectory(o.out, out);
  std::cout << "rescale: " << out.frames.size() << " frames";
  if (!out.frames.empty())
    std::cout << ", tau " << short_num(out.frames.front().time) << " -> " << short_num(out.frames.back().time);
  std::cout << " -> " << o.out << '\n';
  return 0;
}

// ---- entropy / density ---------------------------------------------------------

json density_json(const DensityReport& r) {
  json j = {{"kind", to_string(r.kind)},
            {"center", {r.center.x, r.center.y}},
            {"scale", finite_or_null(r.scale)},
            {"value", finite_or_null(r.value)},
            {"truncated", r.truncated}};
  j["cutoff"] = r.cutoff ? finite_or_null(*r.cutoff) : json(nullptr);
  return j;
}

struct EntropyOpts {
  std::string in, out;
  std::size_t grid = 21;
};

int run_entropy(const EntropyOpts& o) {
  EntropySearch s;
  s.grid = o.grid;
  const DensityReport r = entropy(load_curve(o.in), s);
  if (!o.out.empty()) save_json(o.out, density_json(r));
  std::cout << "entropy: " << fmt(r.value) << " at (" << short_num(r.center.x) << ", " << short_num(r.center.y)
            << ") lambda " << short_num(r.scale) << (r.truncated ? " (open curve, truncated)" : "") << '\n';
  return 0;
}

struct DensityOpts {
  std::string traj, x0 = "0,0", out;
  double t0 = 0.0, r = 1.0;
  std::optional<double> localized;
};

int run_density(const DensityOpts& o) {
  const FlowTrajectory tr = load_trajectory(o.traj);
  const Vec2 x = parse_point(o.x0);
  DensityReport r;
  r.center = x;
  r.scale = o.r;
  if (o.localized) {
    r.kind = DensityKind::ThetaLocalized;
    r.cutoff = *o.localized;
    r.value = theta_localized(tr, x, o.t0, *o.localized, o.r);
  } else {
    r.kind = DensityKind::Theta;
    r.value = theta(tr, x, o.t0, o.r);
  }
  json j = density_json(r);
  j["t0"] = o.t0;
  if (!o.out.empty()) save_json(o.out, j);
  std::cout << "density: " << to_string(r.kind) << " = " << fmt(r.value) << " at (" << short_num(x.x) << ", "
            << short_num(x.y) << ", " << short_num(o.t0) << ") r " << short_num(o.r) << '\n';
  return 0;
}

// ---- diagnose ------------------------------------------------------------------

struct DiagnoseOpts {
  std::string traj, x0 = "0,0", out, csv;
};

int run_diagnose(const DiagnoseOpts& o) {
  const FlowTrajectory tr = load_trajectory(o.traj);
  const Vec2 x0 = parse_point(o.x0);
  CsvTable table{{"tau", "knuckles", "tips", "sharp", "flat", "inflections", "bumpy"}, {}};
  json frames = json::array();
  for (const FlowState& f : tr.frames) {
    json row = {{"time", f.time}};
    std::vector<CsvCell> cells{f.time};
    try {
      const double t = f.mode == FlowMode::Physical ? f.time : 0.0;
      const auto cr = detect_critical(distance_profile(f.curve, x0, t));
      row["knuckles"] = cr.knuckles.size();
      row["tips"] = cr.tips.size();
      row["critical_status"] = "ok";
      cells.push_back(static_cast<long long>(cr.knuckles.size()));
      cells.push_back(static_cast<long long>(cr.tips.size()));
    } catch (const Error& e) {
      row["knuckles"] = nullptr;
      row["tips"] = nullptr;
      row["critical_status"] = std::string(to_string(e.code()));
      cells.push_back(std::string());
      cells.push_back(std::string());
    }
    try {
      const auto vr = detect_vertices(f.curve);
      row["sharp"] = vr.sharp.size();
      row["flat"] = vr.flat.size();
      row["inflections"] = vr.inflections.size();
      row["bumpy"] = vr.bumpy;
      row["vertex_status"] = "ok";
      cells.push_back(static_cast<long long>(vr.sharp.size()));
      cells.push_back(static_cast<long long>(vr.flat.size()));
      cells.push_back(static_cast<long long>(vr.inflections.size()));
      cells.push_back(std::string(vr.bumpy ? "true" : "false"));
    } catch (const Error& e) {
      for (const char* k : {"sharp", "flat", "inflections", "bumpy"}) row[k] = nullptr;
      row["vertex_status"] = std::string(to_string(e.code()));
      for (int i = 0; i < 4; ++i) cells.push_back(std::string());
    }
    frames.push_back(row);
    table.rows.push_back(std::move(cells));
  }

  json paths = json::object();
  for (PathKind k : {PathKind::Tip, PathKind::Knuckle, PathKind::SharpVertex, PathKind::FlatVertex,
                     PathKind::Inflection}) {
    json list = json::array();
    try {
      const PathSet ps = track_paths(tr, k, x0);
      for (const CriticalPath& p : ps.paths) {
        list.push_back({{"id", p.id},
                        {"birth_time", tr.frames[p.birth].time},
                        {"death_time", tr.frames[p.death - 1].time},
                        {"frames", p.death - p.birth}});
      }
      paths[std::string(to_string(k))] = {{"status", "ok"}, {"paths", list}, {"ambiguous_frames", ps.ambiguous_frames}};
    } catch (const Error& e) {
      paths[std::string(to_string(k))] = {{"status", std::string(to_string(e.code()))}, {"paths", list}};
    }
  }
  save_json(o.out, {{"mode", to_string(tr.mode)}, {"x0", {x0.x, x0.y}}, {"frames", frames}, {"paths", paths}});
  if (!o.csv.empty()) save_csv(o.csv, table);
  std::cout << "diagnose: " << tr.frames.size() << " frames -> " << o.out << '\n';
  return 0;
}

// ---- verify ------------------------------------------------------------------------

struct VerifyOpts {
  std::string suite = "all", out;
  std::uint64_t seed = VerifyOptions{}.seed;
};

int run_verify_suite(const VerifyOpts& o) {
  VerifyOptions opt;
  try {
    opt.ids = parse_suite(o.suite);
  } catch (const Error& e) {
    std::cerr << "--suite: " << e.what() << '\n';
    return 2;
  }
  opt.seed = o.seed;
  opt.on_done = [](const VerifyOutcome& v, double secs) {
    log(Level::Info, "criterion " + std::to_string(v.id) + " (" + v.title + "): " + (v.pass ? "pass" : "FAIL") +
                         " in " + short_num(secs) + " s");
    for (const VerifyCheck& c : v.checks)
      log(Level::Debug, "  " + c.name + ": " + fmt(c.measured) + " " + std::string(to_string(c.relation)) + " " +
                            fmt(c.expected) + (c.relation == Relation::Near ? " +- " + fmt(c.tolerance) : "") +
                            (c.pass ? "" : "  FAIL"));
    if (!v.error.empty()) log(Level::Error, "  error: " + v.error);
  };
  const VerifyReport rep = run_verify(opt);
  if (!o.out.empty()) save_json(o.out, to_json(rep));
  std::size_t passed = 0;
  for (const auto& v : rep.outcomes) passed += v.pass;
  std::cout << "verify: " << passed << "/" << rep.outcomes.size() << " criteria passed" << '\n';
  return rep.exit_code;
}

// Per-frame asymptotic diagnostics: rescaled curvature at the sharpest vertex,
// its grim reaper distance, and the graphical radius.
CsvTable asymptotics_table(const FlowTrajectory& tr, double eps, std::size_t m) {
  CsvTable t{{"tau", "chi", "c2_distance", "rho_hat"}, {}};
  for (std::size_t k = 0; k < tr.frames.size(); ++k) {
    const FlowState& f = tr.frames[k];
    const double scale = f.mode == FlowMode::Physical && f.time < 0 ? std::sqrt(-f.time) : 1.0;
    const double tau = f.mode == FlowMode::Physical && f.time < 0 ? -std::log(-f.time) : f.time;
    double chi = NAN, c2 = NAN, rho = NAN;
    try {
      const auto vr = detect_vertices(f.curve);
      const auto kap = curvature(f.curve);
      std::size_t best = 0;
      double kmax = -1.0;
      for (std::size_t v : vr.sharp)
        if (std::abs(kap[v]) > kmax) kmax = std::abs(kap[v]), best = v;
      if (kmax > 0) {
        chi = kmax * scale;
        c2 = grim_fit(tr, {k, best}, 1.0 / kmax).c2_distance;
      }
    } catch (const Error& e) {
      log(Level::Debug, "frame " + std::to_string(k) + ": " + e.what());
    }
    try {
      const DiscreteCurve frame = scale != 1.0 ? scaled(f.curve, 1.0 / scale) : f.curve;
      rho = graphical_radius(frame, 0.0, eps, m).rho_hat;
    } catch (const Error& e) {
      log(Level::Debug, "frame " + std::to_string(k) + ": " + e.what());
    }
    t.rows.push_back({tau, chi, c2, rho});
  }
  return t;
}

struct VertexOpts {
  std::string traj, out, csv;
  double slack = 0.02, eps = 0.05;
  std::size_t m = 2;
};

int run_verify_vertex(const VertexOpts& o) {
  const FlowTrajectory tr = load_trajectory(o.traj);
  const PathSet ps = track_paths(tr, PathKind::SharpVertex);
  json paths = json::array();
  bool ok = true;
  std::size_t checked = 0;
  for (const CriticalPath& p : ps.paths) {
    if (p.death - p.birth < 5) continue;
    const auto r = vertex_ode_check(tr, p, o.slack);
    const bool pass = r.ode_ok && r.lower_ok && r.monotone_in_minus_tau;
    ok = ok && pass;
    ++checked;
    paths.push_back({{"id", p.id},
                     {"min_abs_chi", r.min_abs_chi},
                     {"ode_ok", r.ode_ok},
                     {"lower_ok", r.lower_ok},
                     {"monotone_in_minus_tau", r.monotone_in_minus_tau},
                     {"pass", pass}});
  }
  ok = ok && checked > 0;
  if (!o.out.empty()) save_json(o.out, {{"paths", paths}, {"pass", ok}});
  if (!o.csv.empty()) save_csv(o.csv, asymptotics_table(tr, o.eps, o.m));
  std::cout << "verify vertex: " << checked << " sharp-vertex paths, " << (ok ? "pass" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

struct RadiusOpts {
  std::string traj, out, csv;
  double eps = 0.05, rotation = 0.0;
  std::size_t m = 2;
};

int run_verify_radius(const RadiusOpts& o) {
  const FlowTrajectory tr = load_trajectory(o.traj);
  json frames = json::array();
  bool ok = !tr.frames.empty();
  for (const FlowState& f : tr.frames) {
    const auto r = graphical_radius(f.curve, o.rotation, o.eps, o.m);
    ok = ok && r.passed();
    frames.push_back({{"tau", f.time},
                      {"rho", finite_or_null(r.rho)},
                      {"rho_hat", finite_or_null(r.rho_hat)},
                      {"decomposition_radius", finite_or_null(r.decomposition_radius)},
                      {"u_bound", r.u_bound},
                      {"uy_bound", r.uy_bound},
                      {"uyy_bound", r.uyy_bound}});
  }
  if (!o.out.empty()) save_json(o.out, {{"frames", frames}, {"pass", ok}});
  if (!o.csv.empty()) save_csv(o.csv, asymptotics_table(tr, o.eps, o.m));
  std::cout << "verify radius: " << tr.frames.size() << " frames, " << (ok ? "pass" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

// ---- spectral / decay -----------------------------------------------------------------

struct SpectralOpts {
  std::string traj, out;
  double r = 4.0, Y = 12.0, h = 0.01, rotation = 0.0;
  std::size_t m = 2;
};

int run_spectral(const SpectralOpts& o) {
  const FlowTrajectory tr = load_trajectory(o.traj);
  SpectralGrid g{o.Y, o.h};
  CsvTable t{{"tau", "sheet", "a", "b", "stable_norm", "grad_norm"}, {}};
  for (const FlowState& f : tr.frames) {
    for (const SheetProfile& s : extract_sheets(f.curve, o.m, g, o.r, o.rotation)) {
      const auto p = project(s);
      t.rows.push_back({f.time, static_cast<long long>(s.sheet), p.a, p.b, p.stable_norm, p.grad_norm});
    }
  }
  save_csv(o.out, t);
  std::cout << "spectral: " << tr.frames.size() << " frames, " << t.rows.size() << " sheet rows -> " << o.out << '\n';
  return 0;
}

struct DecayOpts {
  std::string in, traj, out;
  double R = 3.0, r = 4.0;
  std::size_t m = 2;
};

int run_decay(const DecayOpts& o) {
  std::vector<double> taus, vals;
  std::string source;
  if (!o.traj.empty()) {
    // max over sheets of the C2 norm on |y| <= R
    const FlowTrajectory tr = load_trajectory(o.traj);
    for (const FlowState& f : tr.frames) {
      double v = 0.0;
      for (const SheetProfile& s : extract_sheets(f.curve, o.m, SpectralGrid{}, o.r)) v = std::max(v, c2_norm(s, o.R));
      taus.push_back(f.time);
      vals.push_back(v);
    }
    source = "C2 norm on |y| <= " + short_num(o.R);
  } else {
    // max over sheets of |u-hat|_H = sqrt(a^2 + b^2 + stable_norm^2)
    const CsvText csv = load_csv(o.in);
    const std::size_t ct = csv.column("tau"), ca = csv.column("a"), cb = csv.column("b"),
                      cs = csv.column("stable_norm");
    for (const auto& row : csv.rows) {
      const double tau = std::stod(row[ct]);
      const double a = std::stod(row[ca]), b = std::stod(row[cb]), s = std::stod(row[cs]);
      const double v = std::sqrt(a * a + b * b + s * s);
      if (!taus.empty() && taus.back() == tau) {
        vals.back() = std::max(vals.back(), v);
      } else {
        taus.push_back(tau);
        vals.push_back(v);
      }
    }
    source = "Gaussian norm of the cut sheets";
  }
  const DecayFit fit = decay_fit(taus, vals);
  if (!o.out.empty())
    save_json(o.out, {{"rate", fit.rate}, {"intercept", fit.intercept}, {"r2", fit.r2}, {"samples", taus.size()},
                      {"series", source}});
  std::cout << "decay: rate " << fmt(fit.rate) << " r2 " << fmt(fit.r2) << " over " << taus.size() << " frames ("
            << source << ")\n";
  return 0;
}

// ---- export ------------------------------------------------------------------------------

struct ExportOpts {
  std::string traj, report, format = "csv", out;
};

int run_export(const ExportOpts& o) {
  if (!o.traj.empty()) {
    const FlowTrajectory tr = load_trajectory(o.traj);
    if (o.format == "csv") {
      const auto mono = monotonicity_report(tr, 1e-4);
      CsvTable t{{"tau", "F"}, {}};
      for (std::size_t k = 0; k < mono.tau.size(); ++k) t.rows.push_back({mono.tau[k], mono.F[k]});
      save_csv(o.out, t);
      std::cout << "export: " << t.rows.size() << " rows tau,F -> " << o.out << '\n';
    } else {
      json frames = json::array();
      for (const FlowState& f : tr.frames) frames.push_back({{"time", f.time}, {"curve", curve_to_json(f.curve)}});
      save_json(o.out, {{"mode", to_string(tr.mode)},
                        {"controls", controls_to_json(tr.controls)},
                        {"stop_reason", tr.stop_reason},
                        {"frames", frames}});
      std::cout << "export: " << tr.frames.size() << " frames -> " << o.out << '\n';
    }
    return 0;
  }
  const VerifyReport rep = verify_report_from_json(load_json(o.report));
  if (o.format == "json") {
    save_json(o.out, to_json(rep));
  } else {
    CsvTable t{{"id", "title", "check", "measured", "expected", "tolerance", "relation", "pass"}, {}};
    for (const auto& v : rep.outcomes)
      for (const auto& c : v.checks)
        t.rows.push_back({static_cast<long long>(v.id), v.title, c.name, c.measured, c.expected, c.tolerance,
                          std::string(to_string(c.relation)), std::string(c.pass ? "true" : "false")});
    save_csv(o.out, t);
  }
  std::cout << "export: report with " << rep.outcomes.size() << " criteria -> " << o.out << '\n';
  return 0;
}

// ---- run configs -------------------------------------------------------------------------

json param_value(const std::string& s) {
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(d)) return d;
  return s;
}

RunConfig config_of(CLI::App* sub, std::uint64_t seed) {
  RunConfig c;
  c.command = sub->get_name();
  c.seed = seed;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (opt->count() == 0 || name == "help" || name == "save-config") continue;
    if (opt->get_type_size() == 0) {
      c.params[name] = true;
    } else {
      c.params[name] = param_value(opt->results().back());
    }
  }
  return c;
}

std::vector<std::string> argv_of(const RunConfig& c) {
  std::vector<std::string> a{"csflab", c.command};
  for (const auto& [key, value] : c.params.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) a.push_back("--" + key);
      continue;
    }
    a.push_back("--" + key);
    a.push_back(value.is_number() ? format_double(value.get<double>()) : value.get<std::string>());
  }
  if (c.command == "verify" && !c.params.contains("seed")) {
    a.push_back("--seed");
    a.push_back(std::to_string(c.seed));
  }
  return a;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Curve-shortening-flow numerical lab"};
  app.require_subcommand(1);
  unsigned thread_count = 1;
  std::string config_path;
  app.add_option("--threads", thread_count, "worker threads (0 = all cores)");
  app.add_option("--config", config_path, "replay a saved run config")->check(CLI::ExistingFile);
  std::string save_config;

  ExactOpts ex;
  auto* s_exact = app.add_subcommand("exact", "sample a closed-form solution");
  s_exact->add_option("--family", ex.family, "circle | line | grim_reaper | paper_clip")
      ->check(CLI::IsMember({"circle", "line", "grim_reaper", "paper_clip"}));
  s_exact->add_option("--time", ex.time, "t (or tau with --rescaled)");
  s_exact->add_option("--n", ex.n, "point count")->check(CLI::Range(std::size_t{8}, std::size_t{1} << 24));
  s_exact->add_flag("--rescaled", ex.rescaled, "sample the rescaled frame at tau = --time");
  s_exact->add_flag("--adaptive", ex.adaptive, "curvature-adapted spacing");
  add_spacing(s_exact, ex.spacing);
  s_exact->add_option("--angle", ex.angle, "line direction");
  s_exact->add_option("--offset", ex.offset, "line offset");
  s_exact->add_option("--half-length", ex.half_length, "line half length")->check(CLI::PositiveNumber);
  s_exact->add_option("--window", ex.window, "grim reaper |x| window");
  s_exact->add_option("--out", ex.out, "curve JSON")->required();

  SimulateOpts sim;
  auto* s_sim = app.add_subcommand("simulate", "evolve a curve");
  s_sim->add_option("--in", sim.in, "curve JSON")->required()->check(CLI::ExistingFile);
  s_sim->add_option("--mode", sim.mode, "physical | rescaled")->check(CLI::IsMember({"physical", "rescaled"}));
  s_sim->add_option("--horizon", sim.horizon, "time span")->required()->check(CLI::PositiveNumber);
  s_sim->add_option("--start", sim.start, "initial time (default: the curve's time, else 0)");
  s_sim->add_option("--n", sim.n, "remesh point count");
  s_sim->add_option("--dt", sim.dt, "step cap")->check(CLI::PositiveNumber);
  s_sim->add_flag("--fixed-dt", sim.fixed_dt, "use --dt as given, without the CFL cap");
  s_sim->add_option("--cfl", sim.cfl, "CFL factor on h_min^2")->check(CLI::PositiveNumber);
  s_sim->add_option("--max-halvings", sim.max_halvings, "step retries before StepRejected")
      ->check(CLI::NonNegativeNumber);
  s_sim->add_option("--save-interval", sim.save_interval, "time between saved frames (0 = every step)");
  s_sim->add_option("--kappa-cap", sim.kappa_cap, "stop once max |kappa| exceeds this")
      ->check(CLI::PositiveNumber);
  s_sim->add_flag("--adaptive", sim.adaptive, "curvature-adapted remeshing");
  add_spacing(s_sim, sim.spacing);
  s_sim->add_option("--remesh-every", sim.remesh_every, "adaptive remesh period")->check(CLI::PositiveNumber);
  s_sim->add_option("--out", sim.out, "trajectory JSONL")->required();

  RescaleOpts rs;
  auto* s_rescale = app.add_subcommand("rescale", "physical trajectory to rescaled frames");
  s_rescale->add_option("--traj", rs.traj, "physical trajectory JSONL")->required()->check(CLI::ExistingFile);
  s_rescale->add_option("--out", rs.out, "rescaled trajectory JSONL")->required();

  EntropyOpts en;
  auto* s_ent = app.add_subcommand("entropy", "entropy of a curve");
  s_ent->add_option("--in", en.in, "curve JSON")->required()->check(CLI::ExistingFile);
  s_ent->add_option("--grid", en.grid, "grid cells per axis")->check(CLI::Range(2, 101));
  s_ent->add_option("--out", en.out, "report JSON");

  DensityOpts de;
  auto* s_den = app.add_subcommand("density", "Gaussian density ratio on a trajectory");
  s_den->add_option("--traj", de.traj, "physical trajectory JSONL")->required()->check(CLI::ExistingFile);
  s_den->add_option("--x0", de.x0, "centre a,b");
  s_den->add_option("--t0", de.t0, "centre time");
  s_den->add_option("--r", de.r, "scale (sigma when localized)")->check(CLI::PositiveNumber);
  s_den->add_option("--localized", de.localized, "cutoff radius R")->check(CLI::PositiveNumber);
  s_den->add_option("--out", de.out, "report JSON");

  DiagnoseOpts dg;
  auto* s_diag = app.add_subcommand("diagnose", "critical points, vertices and their paths");
  s_diag->add_option("--traj", dg.traj, "trajectory JSONL")->required()->check(CLI::ExistingFile);
  s_diag->add_option("--x0", dg.x0, "distance centre a,b");
  s_diag->add_option("--out", dg.out, "report JSON")->required();
  s_diag->add_option("--csv", dg.csv, "per-frame counts CSV");

  VerifyOpts vf;
  auto* s_ver = app.add_subcommand("verify", "acceptance suite and trajectory checks");
  s_ver->require_subcommand(0, 1);
  s_ver->add_option("--suite", vf.suite, "all or a list such as 1,4,11");
  s_ver->add_option("--out", vf.out, "report JSON");
  s_ver->add_option("--seed", vf.seed, "seed for randomized checks");

  VertexOpts vx;
  auto* s_vx = s_ver->add_subcommand("vertex", "vertex curvature ODE along sharp-vertex paths");
  s_vx->add_option("--traj", vx.traj, "rescaled trajectory JSONL")->required()->check(CLI::ExistingFile);
  s_vx->add_option("--slack", vx.slack, "tolerance")->check(CLI::PositiveNumber);
  s_vx->add_option("--eps", vx.eps, "slope bound for the CSV radius column")->check(CLI::PositiveNumber);
  s_vx->add_option("--m", vx.m, "sheet count for the CSV radius column");
  s_vx->add_option("--out", vx.out, "report JSON");
  s_vx->add_option("--csv", vx.csv, "tau,chi,c2_distance,rho_hat");

  RadiusOpts ra;
  auto* s_ra = s_ver->add_subcommand("radius", "graphical radius bounds per frame");
  s_ra->add_option("--traj", ra.traj, "rescaled trajectory JSONL")->required()->check(CLI::ExistingFile);
  s_ra->add_option("--eps", ra.eps, "slope bound")->check(CLI::PositiveNumber);
  s_ra->add_option("--m", ra.m, "sheet count");
  s_ra->add_option("--rotation", ra.rotation, "frame rotation");
  s_ra->add_option("--out", ra.out, "report JSON");
  s_ra->add_option("--csv", ra.csv, "tau,chi,c2_distance,rho_hat");

  SpectralOpts sp;
  auto* s_spec = app.add_subcommand("spectral", "sheet projections onto the Hermite modes");
  s_spec->add_option("--traj", sp.traj, "rescaled trajectory JSONL")->required()->check(CLI::ExistingFile);
  s_spec->add_option("--r", sp.r, "cutoff radius")->check(CLI::PositiveNumber);
  s_spec->add_option("--m", sp.m, "sheet count");
  s_spec->add_option("--Y", sp.Y, "grid half width")->check(CLI::PositiveNumber);
  s_spec->add_option("--dy", sp.h, "grid spacing")->check(CLI::PositiveNumber);
  s_spec->add_option("--rotation", sp.rotation, "frame rotation");
  s_spec->add_option("--out", sp.out, "CSV")->required();

  DecayOpts dc;
  auto* s_dec = app.add_subcommand("decay", "exponential fit of sheet norms in tau");
  auto* dc_in = s_dec->add_option("--in", dc.in, "spectral CSV")->check(CLI::ExistingFile);
  auto* dc_traj = s_dec->add_option("--traj", dc.traj, "rescaled trajectory JSONL")->check(CLI::ExistingFile);
  dc_in->excludes(dc_traj);
  s_dec->add_option("--R", dc.R, "C2 ball radius (with --traj)")->check(CLI::PositiveNumber);
  s_dec->add_option("--r", dc.r, "cutoff radius (with --traj)")->check(CLI::PositiveNumber);
  s_dec->add_option("--m", dc.m, "sheet count (with --traj)");
  s_dec->add_option("--out", dc.out, "fit JSON");

  ExportOpts xp;
  auto* s_exp = app.add_subcommand("export", "trajectory or report to CSV / JSON");
  auto* xp_traj = s_exp->add_option("--traj", xp.traj, "trajectory JSONL")->check(CLI::ExistingFile);
  auto* xp_rep = s_exp->add_option("--report", xp.report, "verify report JSON")->check(CLI::ExistingFile);
  xp_traj->excludes(xp_rep);
  s_exp->add_option("--format", xp.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  s_exp->add_option("--out", xp.out, "output file")->required();

  for (CLI::App* sub : {s_exact, s_sim, s_rescale, s_ent, s_den, s_diag, s_ver, s_spec, s_dec, s_exp})
    sub->add_option("--save-config", save_config, "write the run config as JSON");

  // --config replays a saved command line; no subcommand is needed then.
  std::vector<std::string> parse_args(args.begin() + 1, args.end());
  const bool replay = std::find(parse_args.begin(), parse_args.end(), "--config") != parse_args.end();
  if (replay) app.require_subcommand(0, 1);
  try {
    std::vector<std::string> rev(parse_args.rbegin(), parse_args.rend());
    app.parse(rev);
    if (replay && !config_path.empty()) {
      if (!app.get_subcommands().empty()) throw CLI::ValidationError("--config", "takes no subcommand");
      RunConfig c = run_config_from_json(load_json(config_path));
      auto a = argv_of(c);
      if (thread_count != 1) {
        a.insert(a.begin() + 1, std::to_string(thread_count));
        a.insert(a.begin() + 1, "--threads");
      }
      return run(a);
    }
    if (app.get_subcommands().empty()) throw CLI::RequiredError("a subcommand");
    if (s_dec->parsed() && dc.in.empty() && dc.traj.empty()) throw CLI::RequiredError("--in or --traj");
    if (s_exp->parsed() && xp.traj.empty() && xp.report.empty()) throw CLI::RequiredError("--traj or --report");
    if (s_den->parsed()) parse_point(de.x0);
    if (s_diag->parsed()) parse_point(dg.x0);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  set_threads(thread_count);
  CLI::App* sub = app.get_subcommands().front();
  if (!save_config.empty()) save_json(save_config, run_config_to_json(config_of(sub, sub == s_ver ? vf.seed : 0)));
  if (sub == s_exact) return run_exact(ex);
  if (sub == s_sim) return run_simulate(sim);
  if (sub == s_rescale) return run_rescale(rs);
  if (sub == s_ent) return run_entropy(en);
  if (sub == s_den) return run_density(de);
  if (sub == s_diag) return run_diagnose(dg);
  if (sub == s_ver) {
    if (s_vx->parsed()) return run_verify_vertex(vx);
    if (s_ra->parsed()) return run_verify_radius(ra);
    return run_verify_suite(vf);
  }
  if (sub == s_spec) return run_spectral(sp);
  if (sub == s_dec) return run_decay(dc);
  return run_export(xp);
}

}  // namespace

int main(int argc, char** argv) {
  if (!read_log_env()) {
    std::cerr << "CSFLAB_LOG must be one of error, info, debug\n";
    return 2;
  }
  try {
    return run(std::vector<std::string>(argv, argv + argc));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
