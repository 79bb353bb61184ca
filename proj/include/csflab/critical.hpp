#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "csflab/flow.hpp"
#include "csflab/geometry.hpp"

namespace csflab {

// phi = |gamma - x0|^2 + 2t and its arc-length derivatives
//   phi_s = 2 <gamma - x0, T>,  phi_ss = 2 + 2 <gamma - x0, kappa N>.
struct DistanceProfile {
  Vec2 x0{};
  double t = 0.0;
  std::vector<double> arclength;
  std::vector<double> phi;
  std::vector<double> phi_s;
  std::vector<double> phi_ss;
  bool closed = true;
};

DistanceProfile distance_profile(const DiscreteCurve& curve, Vec2 x0, double t = 0.0);

enum class Multiplicity { Simple, Multiple };

struct Finger {
  std::size_t knuckle_a = 0;  // the arc runs forward from knuckle_a to knuckle_b
  std::size_t knuckle_b = 0;
  std::size_t tip = 0;
};

struct Tail {
  std::size_t knuckle = 0;
  std::size_t end = 0;  // 0 or n - 1
};

struct CriticalReport {
  std::vector<std::size_t> tips;      // local maxima of phi, increasing index
  std::vector<std::size_t> knuckles;  // local minima of phi, increasing index
  std::vector<Multiplicity> tip_multiplicity;
  std::vector<Multiplicity> knuckle_multiplicity;
  std::vector<Finger> fingers;
  std::vector<Tail> tails;
};

// Sign-change scan of phi_s. A critical point is Multiple when |phi_ss| <
// multiple_tol there. Throws Error(DegenerateProfile) if phi_s vanishes
// identically (circle about its centre).
CriticalReport detect_critical(const DistanceProfile& profile, double multiple_tol = 1e-4);

// Shoelace area of the finger arc closed by the chord between its knuckles.
// Throws Error(SelfCrossingChord) if the chord meets the arc away from its ends.
double finger_region_area(const DiscreteCurve& curve, const Finger& finger);

struct VertexTolerance {
  // Hysteresis floor for kappa_s: max(rel * max|kappa_s|, abs * max kappa^2);
  // for kappa: rel * max|kappa|.
  double rel = 1e-6;
  double abs = 1e-8;
};

struct VertexReport {
  std::vector<std::size_t> sharp;        // local maxima of |kappa|
  std::vector<std::size_t> flat;         // local minima of |kappa|
  std::vector<std::size_t> inflections;  // sign changes of kappa
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // arcs between consecutive sharp vertices
  bool bumpy = true;       // every zero of kappa and kappa_s is a clean sign change
  bool edges_ok = true;    // one inflection per opposite-sign edge, one flat vertex per same-sign edge
};

// Throws Error(DegenerateVertexSet) if kappa_s vanishes identically (circle).
VertexReport detect_vertices(const DiscreteCurve& curve, const VertexTolerance& tol = {});

enum class ZeroBoundary { Periodic, Nonvanishing };

struct ZeroCount {
  std::size_t count = 0;
  bool multiple = false;  // a plateau or a touching zero was seen
};

// Sign changes with hysteresis: samples with |v| <= tol count as neither
// sign. tol < 0 selects 1e-9 * max|v|. Nonvanishing boundaries need
// |v| > tol at both ends, else Error(BoundaryViolated).
ZeroCount count_zeros(const std::vector<double>& samples, ZeroBoundary boundary, double tol = -1.0);

enum class ZeroField { PhiS, Kappa, KappaS };

struct ZeroMonotonicity {
  std::vector<double> time;
  std::vector<std::size_t> counts;
  std::vector<bool> multiple;
  std::vector<std::size_t> violations;  // frames k with counts[k + 1] > counts[k]
};

ZeroMonotonicity zero_monotonicity_check(const FlowTrajectory& traj, ZeroField field, Vec2 x0 = {});

// Explicit finite differences for u_t = u_xx on a periodic grid over
// [0, 2 pi) (sample i at x = (i + 1/2) h). Returns zero counts at `frames`
// equally spaced times in [0, t_end] (both ends included).
std::vector<std::size_t> heat_zero_counts(const std::vector<double>& u0, double t_end, std::size_t frames);

enum class PathKind { Tip, Knuckle, SharpVertex, FlatVertex, Inflection };
std::string_view to_string(PathKind k);

struct CriticalPath {
  int id = 0;
  PathKind kind = PathKind::Tip;
  std::size_t birth = 0;  // first frame
  std::size_t death = 0;  // one past the last frame
  std::vector<std::optional<std::size_t>> index;  // vertex per frame (nullopt outside [birth, death))
};

struct PathSet {
  PathKind kind = PathKind::Tip;
  std::vector<CriticalPath> paths;
  std::vector<std::size_t> ambiguous_frames;  // frames with a tied match (smaller index won)
};

// Frame-to-frame matching by arc-length fraction with a speed gate:
// a match may move at most 5 * (max point speed) * dt + 2 * (max edge).
PathSet track_paths(const FlowTrajectory& traj, PathKind kind, Vec2 x0 = {});

struct ExtremumPathCheck {
  bool phi_monotone = true;    // knuckles non-decreasing, tips non-increasing
  bool scaled_monotone = true; // knuckles: |gamma - x0|^2 / (-t) increasing
  double worst_phi_violation = 0.0;
  double worst_scaled_violation = 0.0;
  bool passed() const { return phi_monotone && scaled_monotone; }
};

// Physical trajectory with t < 0. Extremal values are refined by a parabola
// through the three vertices around the tracked index.
ExtremumPathCheck extremum_path_check(const FlowTrajectory& traj, const PathSet& paths, Vec2 x0 = {},
                                      double slack = 1e-6);

enum class CenterClass { LocalMax, LocalMin, OsculatingDegenerate };
std::string_view to_string(CenterClass c);

// x0 = gamma(s0) + (beta / kappa) N(s0); beta = 1 is the osculating centre.
// Throws Error(ZeroCurvature) if kappa(s0) = 0 and beta != 0.
CenterClass classify_center(const DiscreteCurve& curve, std::size_t s0, double beta);

}  // namespace csflab
