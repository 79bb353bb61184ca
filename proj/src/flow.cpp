#include "csflab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csflab/error.hpp"

namespace csflab {

std::string_view to_string(FlowMode m) { return m == FlowMode::Physical ? "physical" : "rescaled"; }

FlowMode flow_mode_from_string(std::string_view s) {
  if (s == "physical") return FlowMode::Physical;
  if (s == "rescaled") return FlowMode::Rescaled;
  throw Error(ErrorCode::InvalidCurve, "unknown flow mode '" + std::string(s) + "'");
}

namespace {

std::vector<Vec2> velocity(const DiscreteCurve& c, FlowMode mode, double* kappa_max) {
  const FrameData f = compute_frame(c);
  std::vector<Vec2> v(c.size());
  double km = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double speed = f.kappa[i];
    if (mode == FlowMode::Rescaled) speed += 0.5 * dot(c[i], f.normal[i]);
    v[i] = speed * f.normal[i];
    km = std::max(km, std::abs(f.kappa[i]));
  }
  if (kappa_max) *kappa_max = km;
  return v;
}

std::vector<Vec2> advance(const std::vector<Vec2>& x, const std::vector<Vec2>& v, double dt) {
  std::vector<Vec2> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + dt * v[i];
  return out;
}

}  // namespace

FlowState step(const FlowState& state, double dt_max, const StepControls& ctl, StepInfo* info,
               std::size_t step_index) {
  if (!(dt_max > 0.0)) throw Error(ErrorCode::StepRejected, "dt_max must be positive");
  const DiscreteCurve& c = state.curve;
  double dt = dt_max;
  if (!ctl.fixed_dt) {
    const double h = c.min_edge();
    dt = std::min(dt_max, ctl.cfl * h * h);
  }

  double kmax = 0.0;
  const std::vector<Vec2> v0 = velocity(c, state.mode, &kmax);

  std::string last_reason = "no attempt";
  for (int attempt = 0; attempt <= ctl.max_halvings; ++attempt, dt *= 0.5) {
    if (kmax * dt > ctl.max_kappa_dt) {
      last_reason = "kappa_max * dt = " + std::to_string(kmax * dt);
      continue;
    }
    try {
      const DiscreteCurve mid(advance(c.points(), v0, 0.5 * dt), c.closed());
      double kmid = 0.0;
      const std::vector<Vec2> v1 = velocity(mid, state.mode, &kmid);
      if (kmid * dt > ctl.max_kappa_dt) {
        last_reason = "midpoint kappa_max * dt = " + std::to_string(kmid * dt);
        continue;
      }
      DiscreteCurve next(advance(c.points(), v1, dt), c.closed());
      const bool remesh =
          !ctl.adaptive || ctl.remesh_every <= 1 ||
          (step_index + 1) % static_cast<std::size_t>(ctl.remesh_every) == 0;
      if (remesh) {
        next = ctl.adaptive ? resample_adaptive(next, ctl.spacing)
                            : resample(next, ctl.n == 0 ? c.size() : ctl.n);
      }
      if (self_intersects(next)) {
        last_reason = "self-intersection";
        continue;
      }
      if (info) *info = {dt, attempt, kmax * dt, remesh};
      return {next.with_time(state.time + dt), state.time + dt, state.mode};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidCurve && e.code() != ErrorCode::DegenerateSpacing) throw;
      last_reason = e.what();
    }
  }
  throw Error(ErrorCode::StepRejected, "step at time " + std::to_string(state.time) + " rejected after " +
                                           std::to_string(ctl.max_halvings) + " halvings (" +
                                           last_reason + ")");
}

std::size_t FlowTrajectory::frame_at_or_before(double t) const {
  if (frames.empty() || frames.front().time > t)
    throw Error(ErrorCode::OutOfWindow, "time " + std::to_string(t) + " precedes the trajectory");
  auto it = std::upper_bound(frames.begin(), frames.end(), t,
                             [](double v, const FlowState& s) { return v < s.time; });
  return static_cast<std::size_t>(it - frames.begin()) - 1;
}

FlowTrajectory evolve(const FlowState& initial, double horizon, const EvolveControls& ctl,
                      bool keep_step_log) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::OutOfDomain, "horizon must be positive");
  if (self_intersects(initial.curve)) throw Error(ErrorCode::InvalidCurve, "initial curve is not embedded");
  FlowTrajectory traj;
  traj.mode = initial.mode;
  traj.controls = ctl;
  traj.frames.push_back(initial);
  const double t_end = initial.time + horizon;
  FlowState s = initial;
  double last_saved = initial.time;
  for (std::size_t k = 0; k < ctl.max_steps; ++k) {
    const double remaining = t_end - s.time;
    // absorb the round-off left by summing many steps
    if (remaining <= 1e-9 * std::max(1.0, std::abs(t_end))) {
      s.time = t_end;
      break;
    }
    StepInfo info;
    StepControls sc = ctl.step;
    double dt_cap = std::min(ctl.dt_max, remaining);
    // land exactly on the horizon
    if (!sc.fixed_dt) {
      const double h = s.curve.min_edge();
      const double natural = std::min(ctl.dt_max, sc.cfl * h * h);
      if (remaining <= natural) {
        dt_cap = remaining;
        sc.fixed_dt = true;
      }
    }
    s = step(s, dt_cap, sc, &info, k);
    if (keep_step_log) traj.step_log.push_back({s.time, info.dt, info.cfl_number, info.halvings, info.remeshed});
    const bool last = t_end - s.time <= 1e-9 * std::max(1.0, std::abs(t_end));
    if (last) s.time = t_end;
    if (last || ctl.save_interval <= 0.0 || s.time - last_saved >= ctl.save_interval * (1 - 1e-9)) {
      traj.frames.push_back(s);
      last_saved = s.time;
    }
    if (info.cfl_number / std::max(info.dt, 1e-300) > ctl.kappa_cap) {
      if (traj.frames.back().time != s.time) traj.frames.push_back(s);
      traj.stop_reason = "near_singular";
      return traj;
    }
  }
  if (traj.frames.back().time != s.time) traj.frames.push_back(s);
  if (t_end - s.time > 1e-9 * std::max(1.0, std::abs(t_end))) traj.stop_reason = "max_steps";
  return traj;
}

FlowState rescale_frame(const FlowState& state) {
  if (state.mode != FlowMode::Physical)
    throw Error(ErrorCode::OutOfDomain, "rescale_frame expects a physical frame");
  if (!(state.time < 0.0)) throw Error(ErrorCode::OutOfDomain, "rescale_frame needs t < 0");
  const double tau = -std::log(-state.time);
  return {scaled(state.curve, 1.0 / std::sqrt(-state.time)).with_time(tau), tau, FlowMode::Rescaled};
}

std::vector<RotationAlignment> align_rotation(const FlowTrajectory& traj,
                                              const std::vector<std::optional<std::size_t>>& idx,
                                              int path_id) {
  if (idx.size() != traj.frames.size())
    throw Error(ErrorCode::PathBroken, "knuckle path does not cover every frame");
  std::vector<RotationAlignment> out;
  out.reserve(idx.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!idx[k]) throw Error(ErrorCode::PathBroken, "knuckle path gap at frame " + std::to_string(k));
    const FrameData f = compute_frame(traj.frames[k].curve);
    const Vec2 t = f.tangent.at(*idx[k]);
    // Angle of the tangent line from the vertical axis, taken mod pi so both
    // knuckles of an aligned frame read 0.
    double a = std::atan2(t.y, t.x) - 0.5 * std::numbers::pi;
    a -= std::numbers::pi * std::round(a / std::numbers::pi);
    if (k == 0) {
      if (a <= -0.5 * std::numbers::pi) a += std::numbers::pi;
    } else {
      a += std::numbers::pi * std::round((prev - a) / std::numbers::pi);
    }
    prev = a;
    out.push_back({traj.frames[k].time, a, path_id});
  }
  return out;
}

}  // namespace csflab
