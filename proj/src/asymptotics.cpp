#include "csflab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csflab/error.hpp"
#include "csflab/parallel.hpp"

namespace csflab {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

}  // namespace

double regularity_scale(const FlowTrajectory& traj, Vec2 x, double t, double r_cap) {
  if (traj.frames.empty()) throw Error(ErrorCode::WindowTooSmall, "empty trajectory");
  const double t_first = traj.frames.front().time, t_last = traj.frames.back().time;
  const double eps = 1e-12 * std::max(1.0, std::abs(t));
  if (t < t_first - eps || t > t_last + eps)
    throw Error(ErrorCode::WindowTooSmall, "time " + std::to_string(t) + " outside the trajectory");
  const std::size_t k_end = traj.frame_at_or_before(std::max(t, t_first));
  const double r_min = 1e-9 * std::max(traj.frames[k_end].curve.extent(), 1e-300);
  double r_max = std::min(r_cap, std::sqrt(std::max(t - t_first, 0.0)));
  if (r_max < r_min) throw Error(ErrorCode::WindowTooSmall, "no room before t for a parabolic ball");

  std::vector<std::vector<double>> kappa(k_end + 1);
  parallel_for(k_end + 1, [&](std::size_t k) { kappa[k] = curvature(traj.frames[k].curve); });

  auto ok = [&](double r) {
    for (std::size_t k = k_end + 1; k-- > 0;) {
      const FlowState& s = traj.frames[k];
      if (s.time < t - r * r - eps) break;
      const auto& p = s.curve.points();
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 d = p[i] - x;
        if (dot(d, d) >= r * r) continue;
        if (std::abs(kappa[k][i]) > 1.0 / r) return false;
        if (!s.curve.closed() && (i == 0 || i + 1 == p.size())) return false;
      }
    }
    return true;
  };
  if (ok(r_max)) return r_max;
  if (!ok(r_min)) return r_min;
  double lo = std::log(r_min), hi = std::log(r_max);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(std::exp(mid)) ? lo : hi) = mid;
  }
  return std::exp(lo);
}

GrimFit grim_fit(const FlowTrajectory& traj, FrameVertex v, double scale, double window) {
  if (v.frame >= traj.frames.size()) throw Error(ErrorCode::OutOfDomain, "vertex frame out of range");
  if (!(scale > 0.0)) throw Error(ErrorCode::OutOfDomain, "scale must be positive");
  const FlowState& fv = traj.frames[v.frame];
  if (v.index >= fv.curve.size()) throw Error(ErrorCode::OutOfDomain, "vertex index out of range");
  const FrameData f0 = compute_frame(fv.curve);
  const double kv = f0.kappa[v.index];
  if (std::abs(kv) * fv.curve.extent() < 1e-12)
    throw Error(ErrorCode::OrientationAmbiguous, "curvature vanishes at the vertex");
  const double sigma = kv > 0 ? 1.0 : -1.0;
  const Vec2 nv = sigma * f0.normal[v.index];
  const double rot = kPi / 2 - std::atan2(nv.y, nv.x);
  const Vec2 pv = fv.curve[v.index];

  GrimFit g;
  g.vertex = v;
  g.scale = scale;
  g.window = std::min(window, 1.4);
  const double W = g.window;
  const double depth = std::min(W * W, 4.0);
  const bool physical = traj.mode == FlowMode::Physical;

  for (std::size_t k = v.frame + 1; k-- > 0;) {
    const FlowState& fs = traj.frames[k];
    const double s = physical ? (fs.time - fv.time) / (scale * scale) : 0.0;
    if (k != v.frame && (!physical || s < -depth - 1e-12)) break;
    const FrameData f = k == v.frame ? f0 : compute_frame(fs.curve);
    const std::size_t n = fs.curve.size();
    std::vector<Vec2> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = (1.0 / scale) * rotate(fs.curve[i] - pv, rot);
    std::size_t start = v.index;
    if (k != v.frame) {
      double best = 1e300;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = norm(q[i] - Vec2{0.0, s});
        if (d < best) best = d, start = i;
      }
    }
    auto visit = [&](std::size_t i) {
      const double x = q[i].x;
      const Vec2 tq = sigma * rotate(f.tangent[i], rot);
      const double kq = sigma * f.kappa[i] * scale;
      g.position_error = std::max(g.position_error, std::abs(q[i].y - (s - std::log(std::cos(x)))));
      g.tangent_error = std::max(g.tangent_error, std::abs(wrap_angle(std::atan2(tq.y, tq.x) - x)));
      g.curvature_error = std::max(g.curvature_error, std::abs(kq - std::cos(x)));
    };
    if (std::abs(q[start].x) > W) continue;
    visit(start);
    const bool closed = fs.curve.closed();
    for (int dir : {1, -1}) {
      std::size_t i = start;
      for (std::size_t steps = 1; steps < n; ++steps) {
        if (!closed && ((dir > 0 && i + 1 == n) || (dir < 0 && i == 0))) break;
        i = (i + n + static_cast<std::size_t>(dir + n)) % n;
        if (std::abs(q[i].x) > W) break;
        visit(i);
      }
    }
    ++g.frames_used;
    g.slab_depth = std::max(g.slab_depth, -s);
  }
  g.c2_distance = std::max({g.position_error, g.tangent_error, g.curvature_error});
  return g;
}

namespace {

std::vector<double> sg_derivative(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-2 * f[i - 2] - f[i - 1] + f[i + 1] + 2 * f[i + 2]) / (10 * h);
    } else if (i >= 1 && i + 1 < n) {
      d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    } else if (i == 0) {
      d[i] = (f[1] - f[0]) / h;
    } else {
      d[i] = (f[n - 1] - f[n - 2]) / h;
    }
  }
  return d;
}

}  // namespace

VertexOdeReport vertex_ode_check(const FlowTrajectory& traj, const CriticalPath& path, double slack) {
  VertexOdeReport r;
  if (path.death > traj.frames.size() || path.birth >= path.death)
    throw Error(ErrorCode::PathBroken, "path lifetime outside the trajectory");
  for (std::size_t k = path.birth; k < path.death; ++k) {
    if (!path.index.at(k)) throw Error(ErrorCode::PathBroken, "path gap at frame " + std::to_string(k));
    const FlowState& s = traj.frames[k];
    const std::vector<double> kappa = curvature(s.curve);
    r.tau.push_back(s.time);
    r.chi.push_back(kappa[*path.index[k]]);
  }
  r.dchi = sg_derivative(r.tau, r.chi);
  const std::size_t n = r.chi.size();
  const double crit = 1.0 / std::sqrt(2.0);
  r.min_abs_chi = 1e300;
  std::optional<std::size_t> attained;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::abs(r.chi[k]);
    r.min_abs_chi = std::min(r.min_abs_chi, a);
    const double da = (r.chi[k] >= 0 ? 1.0 : -1.0) * r.dchi[k];
    if (a > 0 && a < crit && da > -0.5 * a + a * a * a + slack) r.ode_ok = false;
    if (!attained && a >= crit) attained = k;
    if (k + 1 < n && std::abs(r.chi[k + 1]) > a + slack) r.monotone_in_minus_tau = false;
  }
  if (attained)
    for (std::size_t k = std::max(*attained, n / 2); k < n; ++k)
      if (std::abs(r.chi[k]) < crit - slack) r.lower_ok = false;
  return r;
}

TipRelations tip_relations_check(const DiscreteCurve& curve, std::size_t vertex, double lambda, double window) {
  if (vertex >= curve.size()) throw Error(ErrorCode::OutOfDomain, "vertex index out of range");
  if (!(lambda > 0.0)) throw Error(ErrorCode::OutOfDomain, "lambda must be positive");
  const FrameData f = compute_frame(curve);
  if (std::abs(f.kappa[vertex]) * curve.extent() < 1e-12)
    throw Error(ErrorCode::ZeroCurvature, "curvature vanishes at the vertex");
  const double sigma = f.kappa[vertex] > 0 ? 1.0 : -1.0;
  std::vector<double> k = f.kappa, ks = f.kappa_s;
  std::vector<double> kss = derivative_s(f, ks, curve.closed());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] *= sigma, ks[i] *= sigma, kss[i] *= sigma;

  TipRelations r;
  const double il2 = 1.0 / (lambda * lambda);
  auto visit = [&](std::size_t i, double theta) {
    const double sg = theta > 0 ? 1.0 : (theta < 0 ? -1.0 : 0.0);
    r.r0 = std::max(r.r0, std::abs(k[i] - std::cos(theta) / lambda) * lambda);
    r.r1 = std::max(r.r1, std::abs(ks[i] + sg * k[i] * std::sqrt(std::max(il2 - k[i] * k[i], 0.0))) * lambda * lambda);
    r.r2 = std::max(r.r2, std::abs(kss[i] + 2 * k[i] * k[i] * k[i] - il2 * k[i]) * lambda * lambda * lambda);
    ++r.samples;
  };
  visit(vertex, 0.0);
  const std::size_t n = curve.size();
  const bool closed = curve.closed();
  for (int dir : {1, -1}) {
    std::size_t i = vertex;
    double theta = 0.0;
    for (std::size_t steps = 1; steps <= n / 2; ++steps) {
      if (!closed && ((dir > 0 && i + 1 == n) || (dir < 0 && i == 0))) break;
      const std::size_t j = (i + n + static_cast<std::size_t>(dir + n)) % n;
      const double h = f.edge[dir > 0 ? i : j];
      theta += dir * 0.5 * (k[i] + k[j]) * h;
      i = j;
      if (std::abs(theta) > window) break;
      // end stencils are one-sided; keep them out of the sup
      if (!closed && (i == 0 || i + 1 == n)) break;
      visit(i, theta);
    }
  }
  return r;
}

std::vector<TailDecayFrame> tail_decay_check(const FlowTrajectory& traj, double slack) {
  std::vector<TailDecayFrame> out;
  for (const FlowState& s : traj.frames) {
    if (s.curve.closed()) continue;
    TailDecayFrame tf;
    tf.time = s.time;
    std::vector<std::size_t> sharp;
    try {
      sharp = detect_vertices(s.curve).sharp;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateVertexSet) throw;
    }
    if (!sharp.empty()) {
      const std::vector<double> k = curvature(s.curve);
      const std::size_t n = k.size();
      auto run = [&](std::size_t from, int dir) {
        ++tf.tails;
        std::size_t i = from;
        while ((dir > 0 && i + 1 < n) || (dir < 0 && i > 0)) {
          const std::size_t j = dir > 0 ? i + 1 : i - 1;
          const double inc = std::abs(k[j]) - std::abs(k[i]);
          tf.worst_increase = std::max(tf.worst_increase, inc);
          if (inc > slack) tf.monotone = false;
          tf.sup_kappa_times_r = std::max(tf.sup_kappa_times_r, std::abs(k[j]) * norm(s.curve[j]));
          i = j;
        }
      };
      run(sharp.front(), -1);
      run(sharp.back(), 1);
    }
    out.push_back(tf);
  }
  return out;
}

GraphicalRadiusReport graphical_radius(const DiscreteCurve& frame, double rotation, double eps, std::size_t m,
                                       double dy) {
  if (m == 0 || !(dy > 0.0)) throw Error(ErrorCode::OutOfDomain, "graphical_radius needs m >= 1 and dy > 0");
  const DiscreteCurve c = rotation == 0.0 ? frame : rotated(frame, rotation);
  const FrameData f = compute_frame(c);
  GraphicalRadiusReport r;
  r.tau = frame.time().value_or(0.0);
  r.m = m;
  for (const Vec2& p : c.points()) r.extent = std::max(r.extent, std::abs(p.y));

  // Lines out to |y| = 2 are always probed, even past the curve's extent.
  const auto steps = static_cast<long>(std::floor(std::max(r.extent, 2.0) / dy));
  std::vector<double> ys;
  for (long j = -steps; j <= steps; ++j) ys.push_back(static_cast<double>(j) * dy);
  std::vector<std::vector<GraphCrossing>> cross(ys.size());
  parallel_for(ys.size(), [&](std::size_t j) { cross[j] = horizontal_crossings(c, f, ys[j]); });

  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (std::abs(ys[j]) > 2.0) continue;
    std::size_t inside = 0;
    for (const GraphCrossing& x : cross[j])
      if (std::abs(x.x) <= 2.0) ++inside;
    if (inside != m)
      throw Error(ErrorCode::SheetCountMismatch, "line y = " + std::to_string(ys[j]) + " meets the curve " +
                                                     std::to_string(inside) + " times with |x| <= 2, expected " +
                                                     std::to_string(m));
  }

  r.unit_norms.assign(m, {});
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (std::abs(ys[j]) > 1.0 || cross[j].size() != m) continue;
    for (std::size_t i = 0; i < m; ++i) {
      r.unit_norms[i].sup_u = std::max(r.unit_norms[i].sup_u, std::abs(cross[j][i].x));
      r.unit_norms[i].sup_uy = std::max(r.unit_norms[i].sup_uy, std::abs(cross[j][i].uy));
      r.unit_norms[i].sup_uyy = std::max(r.unit_norms[i].sup_uyy, std::abs(cross[j][i].uyy));
    }
  }
  double c2 = 0.0;
  for (const SheetNorms& s : r.unit_norms) c2 = std::max(c2, s.sup_u + s.sup_uy + s.sup_uyy);
  r.rho = c2 > 0.0 ? std::pow(c2, -0.25) : std::numeric_limits<double>::infinity();

  // Decomposition radius: grow |y| symmetrically until a line fails.
  const std::size_t mid = static_cast<std::size_t>(steps);
  double R = 0.0;
  for (std::size_t d = 0; d <= mid; ++d) {
    bool good = true;
    for (std::size_t j : {mid - d, mid + d}) {
      if (cross[j].size() != m) good = false;
      else
        for (const GraphCrossing& x : cross[j])
          if (std::abs(x.uy) > eps) good = false;
    }
    if (!good) break;
    R = static_cast<double>(d) * dy;
  }
  r.decomposition_radius = R;
  r.rho_hat = std::min({r.rho, r.extent, R});

  const double rho4 = std::isfinite(r.rho) ? std::pow(r.rho, -4.0) : 0.0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double y = std::abs(ys[j]);
    if (y > r.rho_hat || cross[j].size() != m) continue;
    for (const GraphCrossing& x : cross[j]) {
      if (std::abs(x.x) > (y + 2) * (y + 2) * rho4 * (1 + 1e-9)) r.u_bound = false;
      if (std::abs(x.uy) > eps) r.uy_bound = false;
      if (y <= 0.5 * r.rho_hat && std::abs(x.uyy) > 5 * eps / r.rho_hat) r.uyy_bound = false;
    }
  }
  return r;
}

TromboneReport trombone_check(const FlowTrajectory& traj, double eps, double grim_tol) {
  if (grim_tol < 0.0) grim_tol = eps / 100.0;
  TromboneReport rep;
  const std::size_t nf = traj.frames.size();
  rep.frames.resize(nf);
  parallel_for(nf, [&](std::size_t k) {
    const FlowState& s = traj.frames[k];
    TromboneFrame& tf = rep.frames[k];
    tf.tau = s.time;
    VertexReport v;
    CriticalReport cr;
    try {
      v = detect_vertices(s.curve);
      cr = detect_critical(distance_profile(s.curve, {0.0, 0.0}));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateVertexSet || e.code() == ErrorCode::DegenerateProfile) return;
      throw;
    }
    const std::vector<double> kappa = curvature(s.curve);
    const bool closed = s.curve.closed();
    tf.bumpy = v.bumpy;
    tf.one_sharp_per_finger = !cr.fingers.empty();
    tf.tip_vertex_same_sign = !cr.fingers.empty();
    tf.knuckle_angles = !cr.fingers.empty();
    for (const Finger& fg : cr.fingers) {
      auto between = [&](std::size_t x) {
        const std::size_t a = fg.knuckle_a, b = fg.knuckle_b;
        if (!closed || a < b) return a < x && x < b;
        if (a == b) return x != a;
        return x > a || x < b;
      };
      std::vector<std::size_t> in;
      for (std::size_t sv : v.sharp)
        if (between(sv)) in.push_back(sv);
      if (in.size() != 1) tf.one_sharp_per_finger = false;
      for (std::size_t sv : in)
        if ((kappa[sv] > 0) != (kappa[fg.tip] > 0)) tf.tip_vertex_same_sign = false;
      const double theta = turning_angle(s.curve, fg.knuckle_a, fg.knuckle_b);
      const double err = std::abs(std::abs(theta) - kPi);
      tf.worst_angle_error = std::max(tf.worst_angle_error, err);
      if (err >= eps) tf.knuckle_angles = false;
    }
    tf.grim_close = !v.sharp.empty();
    FlowTrajectory single;
    single.mode = FlowMode::Rescaled;
    single.frames = {s};
    for (std::size_t sv : v.sharp) {
      if (kappa[sv] == 0.0) {
        tf.grim_close = false;
        continue;
      }
      const GrimFit g = grim_fit(single, {0, sv}, 1.0 / std::abs(kappa[sv]));
      tf.worst_c2 = std::max(tf.worst_c2, g.c2_distance);
      if (g.c2_distance >= grim_tol) tf.grim_close = false;
    }
  });
  bool in_prefix = true;
  for (std::size_t k = 0; k < nf; ++k) {
    if (rep.frames[k].all()) {
      if (!in_prefix) rep.prefix_structure = false;
      else rep.trombone_tau = rep.frames[k].tau;
    } else {
      in_prefix = false;
    }
  }
  return rep;
}

}  // namespace csflab
