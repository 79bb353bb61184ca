#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "csflab/critical.hpp"
#include "csflab/flow.hpp"
#include "csflab/geometry.hpp"

namespace csflab {

// A vertex of a trajectory frame.
struct FrameVertex {
  std::size_t frame = 0;
  std::size_t index = 0;
};

// Largest r (bisection in log r) such that on every frame with time in
// [t - r^2, t] the points in B(x, r) have |kappa| <= 1/r and no curve end
// point lies in B(x, r). Capped by sqrt(t - t_first) and by `r_cap`.
// Throws Error(WindowTooSmall) if t is not covered by the trajectory.
double regularity_scale(const FlowTrajectory& traj, Vec2 x, double t, double r_cap = 1e3);

struct GrimFit {
  FrameVertex vertex;
  double scale = 1.0;        // length scale; the curve is shrunk by 1/scale
  double window = 1.4;       // |x| range of the comparison after rescaling
  double slab_depth = 0.0;   // rescaled time depth actually compared
  std::size_t frames_used = 0;
  double position_error = 0.0;
  double tangent_error = 0.0;
  double curvature_error = 0.0;
  double c2_distance = 0.0;  // max of the three
};

// Moves the vertex to the origin, rotates so the inward normal there is +y,
// scales lengths by 1/scale and compares with y = s - log cos x (s = rescaled
// time offset, s = 0 on the vertex frame) over |x| <= min(window, 1.4).
// Earlier frames within s >= -min(window^2, 4) enter the comparison when the
// trajectory is physical; rescaled trajectories compare the vertex frame only.
// Throws Error(OrientationAmbiguous) if kappa(vertex) = 0.
GrimFit grim_fit(const FlowTrajectory& traj, FrameVertex vertex, double scale, double window = 1.4);

struct VertexOdeReport {
  std::vector<double> tau;
  std::vector<double> chi;   // rescaled curvature at the vertex
  std::vector<double> dchi;  // Savitzky-Golay (width 5) derivative in tau
  double min_abs_chi = 0.0;
  bool ode_ok = true;        // d|chi|/dtau <= -|chi|/2 + |chi|^3 + slack wherever |chi| < 1/sqrt2
  bool lower_ok = true;      // |chi| >= 1/sqrt2 - slack once attained, over the later half
  bool monotone_in_minus_tau = true;  // |chi| non-increasing in tau (slack)
};

// Path of sharp vertices on a rescaled trajectory with uniform tau spacing.
// Throws Error(PathBroken) on a gap inside the path's lifetime.
VertexOdeReport vertex_ode_check(const FlowTrajectory& traj, const CriticalPath& path, double slack = 0.02);

struct TipRelations {
  double r0 = 0.0;  // sup |kappa - cos(theta)/lambda| * lambda
  double r1 = 0.0;  // sup |kappa_s + sgn(theta) kappa sqrt(lambda^-2 - kappa^2)| * lambda^2
  double r2 = 0.0;  // sup |kappa_ss + 2 kappa^3 - kappa / lambda^2| * lambda^3
  std::size_t samples = 0;
};

// theta(s) = integral of kappa from the vertex; sups over |theta| <= window.
// The curve is oriented so that kappa(vertex) > 0. Throws Error(ZeroCurvature).
TipRelations tip_relations_check(const DiscreteCurve& curve, std::size_t vertex, double lambda,
                                 double window = 1.3);

struct TailDecayFrame {
  double time = 0.0;
  std::size_t tails = 0;
  bool monotone = true;          // |kappa| non-increasing away from the outermost sharp vertex
  double worst_increase = 0.0;
  double sup_kappa_times_r = 0.0;  // sup |kappa| |x| over the tails
};

// Tails are the arcs of an open curve beyond its outermost sharp vertices.
// Closed frames contribute nothing.
std::vector<TailDecayFrame> tail_decay_check(const FlowTrajectory& traj, double slack = 1e-6);

struct SheetNorms {
  double sup_u = 0.0;
  double sup_uy = 0.0;
  double sup_uyy = 0.0;
};

struct GraphicalRadiusReport {
  double tau = 0.0;
  std::size_t m = 0;
  double rho = 0.0;                   // rho^-4 = max_i ||u^i||_C2([-1,1])
  double decomposition_radius = 0.0;  // largest R with m graphs and |u_y| <= eps on |y| <= R
  double extent = 0.0;                // max |y| on the curve
  double rho_hat = 0.0;               // min(rho, extent, decomposition_radius)
  std::vector<SheetNorms> unit_norms;  // on |y| <= 1
  bool u_bound = true;    // |u| <= (|y| + 2)^2 rho^-4 on |y| <= rho_hat
  bool uy_bound = true;   // |u_y| <= eps on |y| <= rho_hat
  bool uyy_bound = true;  // |u_yy| <= 5 eps / rho_hat on |y| <= rho_hat / 2
  bool passed() const { return u_bound && uy_bound && uyy_bound; }
};

// Sheets are graphs x = u^i(y) after rotating the frame by `rotation`,
// found by intersecting with horizontal lines on a y grid of spacing dy.
// Throws Error(SheetCountMismatch) if a line y = c, |c| <= 2, meets the
// curve within |x| <= 2 other than m times.
GraphicalRadiusReport graphical_radius(const DiscreteCurve& frame, double rotation, double eps, std::size_t m,
                                       double dy = 0.01);

struct TromboneFrame {
  double tau = 0.0;
  bool bumpy = false;
  bool one_sharp_per_finger = false;
  bool tip_vertex_same_sign = false;
  bool knuckle_angles = false;  // | |theta| - pi | < eps across every finger
  bool grim_close = false;      // grim_fit c2_distance < grim_tol at every sharp vertex
  double worst_angle_error = 0.0;
  double worst_c2 = 0.0;
  bool all() const { return bumpy && one_sharp_per_finger && tip_vertex_same_sign && knuckle_angles && grim_close; }
};

struct TromboneReport {
  std::vector<TromboneFrame> frames;
  // Latest tau such that every frame at or before it satisfies all conditions.
  std::optional<double> trombone_tau;
  // The satisfying frames form an initial run in tau.
  bool prefix_structure = true;
};

// grim_tol < 0 selects eps / 100. Distances are taken about the origin.
TromboneReport trombone_check(const FlowTrajectory& traj, double eps, double grim_tol = -1.0);

}  // namespace csflab
