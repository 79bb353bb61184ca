#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "csflab/geometry.hpp"

namespace csflab {

enum class FlowMode { Physical, Rescaled };

std::string_view to_string(FlowMode m);
FlowMode flow_mode_from_string(std::string_view s);

// `time` is t in physical mode and tau in rescaled mode.
struct FlowState {
  DiscreteCurve curve;
  double time = 0.0;
  FlowMode mode = FlowMode::Physical;
};

struct StepControls {
  // Uniform remesh target; 0 keeps the incoming point count.
  std::size_t n = 512;
  // Curvature-adapted remeshing instead of uniform (spacing in the curve's units).
  bool adaptive = false;
  AdaptiveSpacing spacing{};
  // Remesh after every k-th accepted step (uniform mode always remeshes).
  int remesh_every = 1;
  double cfl = 0.25;
  // Use dt_max as given, skipping the cfl * h_min^2 cap.
  bool fixed_dt = false;
  double max_kappa_dt = 0.5;
  int max_halvings = 20;
};

struct StepInfo {
  double dt = 0.0;
  int halvings = 0;
  double cfl_number = 0.0;  // kappa_max * dt
  bool remeshed = false;
};

// One explicit midpoint (RK2) step of the normal velocity
//   physical: kappa n      rescaled: (kappa + <x, n> / 2) n
// followed by remeshing. Throws Error(StepRejected) after max_halvings failed
// retries (self-intersection, kappa_max * dt too large, or degenerate output).
FlowState step(const FlowState& state, double dt_max, const StepControls& controls = {},
               StepInfo* info = nullptr, std::size_t step_index = 0);

struct EvolveControls {
  StepControls step{};
  double dt_max = 1e-4;
  // Record a frame whenever this much time has passed (0 = every step).
  double save_interval = 0.0;
  // Stop with reason "near_singular" once max |kappa| exceeds this.
  double kappa_cap = 1e6;
  std::size_t max_steps = 100'000'000;
};

struct StepLogEntry {
  double time = 0.0;  // time after the step
  double dt = 0.0;
  double cfl_number = 0.0;
  int halvings = 0;
  bool remeshed = false;
};

struct FlowTrajectory {
  FlowMode mode = FlowMode::Physical;
  EvolveControls controls{};
  std::vector<FlowState> frames;
  std::vector<StepLogEntry> step_log;
  std::string stop_reason = "horizon";

  // Index of the last frame with time <= t (throws OutOfWindow if none).
  std::size_t frame_at_or_before(double t) const;
};

// Integrates from state.time to state.time + horizon. The first and last
// states are always recorded. Propagates Error(StepRejected); throws
// Error(InvalidCurve) if the initial curve is not embedded.
FlowTrajectory evolve(const FlowState& initial, double horizon, const EvolveControls& controls,
                      bool keep_step_log = true);

// Physical frame at t < 0 to the rescaled frame at tau = -log(-t).
FlowState rescale_frame(const FlowState& state);

struct RotationAlignment {
  double tau = 0.0;
  double angle = 0.0;
  int source_knuckle = 0;
};

// Rotation that takes the tangent line at a tracked knuckle to the vertical
// axis (the sheet direction), unwrapped in time in steps of pi; 0 on an
// axis-aligned paper clip. knuckle_index[k] is the knuckle's vertex on frame k. Throws Error(PathBroken) on a gap.
std::vector<RotationAlignment> align_rotation(const FlowTrajectory& traj,
                                              const std::vector<std::optional<std::size_t>>& knuckle_index,
                                              int path_id = 0);

}  // namespace csflab
