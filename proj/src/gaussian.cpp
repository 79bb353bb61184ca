#include "csflab/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "csflab/error.hpp"
#include "csflab/parallel.hpp"

namespace csflab {

std::string_view to_string(DensityKind k) {
  switch (k) {
    case DensityKind::F: return "F";
    case DensityKind::Entropy: return "entropy";
    case DensityKind::Theta: return "theta";
    case DensityKind::ThetaLocalized: return "theta_localized";
  }
  return "?";
}

namespace {

constexpr double kCullExponent = 40.0;
constexpr double kRelTol = 1e-8;
constexpr int kMaxLevel = 14;
constexpr std::size_t kMaxPoints = std::size_t{1} << 24;

double segment_distance2(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double ee = dot(e, e);
  double s = ee > 0.0 ? dot(p - a, e) / ee : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const Vec2 d = a + s * e - p;
  return dot(d, d);
}

struct ActiveEdge {
  Vec2 a, b;
  std::size_t pieces;
};

double weighted_integral(const DiscreteCurve& curve, Vec2 x0, double lambda,
                         const kernels::CubicCutoff& cut) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::OutOfDomain, "lambda must be positive");
  const double inv4l = 0.25 / lambda;
  const double sq = std::sqrt(lambda);
  std::vector<ActiveEdge> active;
  const auto& p = curve.points();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < curve.edge_count(); ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % n];
    const double d2 = segment_distance2(x0, a, b);
    if (d2 * inv4l > kCullExponent) continue;
    if (cut.enabled && cut.inv_r2 > 0.0 && (d2 - cut.shift) * cut.inv_r2 >= 1.0) continue;
    const double len = norm(b - a);
    const auto pieces = static_cast<std::size_t>(std::clamp(std::ceil(len / sq), 1.0, 4096.0));
    active.push_back({a, b, pieces});
  }
  if (active.empty()) return 0.0;

  std::vector<double> xs, ys, ws;
  auto midpoint_sum = [&](std::size_t mult) {
    xs.clear(), ys.clear(), ws.clear();
    for (const auto& e : active) {
      const std::size_t m = e.pieces * mult;
      const Vec2 d = e.b - e.a;
      const double w = norm(d) / static_cast<double>(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
        xs.push_back(e.a.x + s * d.x);
        ys.push_back(e.a.y + s * d.y);
        ws.push_back(w);
      }
    }
    return kernels::gaussian_sum({xs, ys, ws}, x0.x, x0.y, inv4l, cut);
  };

  std::size_t base = 0;
  for (const auto& e : active) base += e.pieces;
  double m_prev = midpoint_sum(1);
  double r_prev = m_prev;
  for (int level = 1; level <= kMaxLevel && (base << level) <= kMaxPoints; ++level) {
    const double m = midpoint_sum(std::size_t{1} << level);
    const double r = (4.0 * m - m_prev) / 3.0;
    if (level >= 2 && std::abs(r - r_prev) <= kRelTol * std::max(std::abs(r), 1e-300)) return r;
    m_prev = m;
    r_prev = r;
  }
  return r_prev;
}

double normalized(const DiscreteCurve& curve, Vec2 x0, double lambda, const kernels::CubicCutoff& cut) {
  return weighted_integral(curve, x0, lambda, cut) / std::sqrt(4.0 * std::numbers::pi * lambda);
}

// Maximizes f over R^3 with a Nelder-Mead simplex.
template <class F>
std::pair<std::array<double, 3>, double> nelder_mead_max(F f, std::array<double, 3> x0,
                                                         std::array<double, 3> step, int max_iter,
                                                         double tol) {
  using P = std::array<double, 3>;
  std::array<P, 4> s;
  std::array<double, 4> v;
  s[0] = x0;
  for (int i = 0; i < 3; ++i) {
    s[i + 1] = x0;
    s[i + 1][i] += step[i];
  }
  for (int i = 0; i < 4; ++i) v[i] = -f(s[i]);
  auto lerp = [](const P& a, const P& b, double t) {
    P r;
    for (int i = 0; i < 3; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 4> ord{0, 1, 2, 3};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return v[a] < v[b]; });
    const int best = ord[0], worst = ord[3], second = ord[2];
    if (v[worst] - v[best] <= tol) break;
    P c{0, 0, 0};
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) c[i] += s[ord[k]][i] / 3.0;
    const P xr = lerp(c, s[worst], -1.0);
    const double fr = -f(xr);
    if (fr < v[best]) {
      const P xe = lerp(c, s[worst], -2.0);
      const double fe = -f(xe);
      if (fe < fr) s[worst] = xe, v[worst] = fe;
      else s[worst] = xr, v[worst] = fr;
    } else if (fr < v[second]) {
      s[worst] = xr, v[worst] = fr;
    } else {
      const bool outside = fr < v[worst];
      const P xc = lerp(c, outside ? xr : s[worst], 0.5);
      const double fc = -f(xc);
      if (fc < (outside ? fr : v[worst])) {
        s[worst] = xc, v[worst] = fc;
      } else {
        for (int k = 1; k < 4; ++k) {
          s[ord[k]] = lerp(s[best], s[ord[k]], 0.5);
          v[ord[k]] = -f(s[ord[k]]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  return {s[best], -v[best]};
}

// Value of fn(frame, lambda) at time t_query, interpolated linearly between
// the bracketing frames. lambda_of(t) gives the scale belonging to a frame.
template <class Fn>
double interpolate_frames(const FlowTrajectory& traj, double t_query, double t0, Fn fn) {
  if (traj.frames.empty()) throw Error(ErrorCode::OutOfWindow, "empty trajectory");
  const double t_first = traj.frames.front().time, t_last = traj.frames.back().time;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_query));
  if (t_query < t_first - eps || t_query > t_last + eps)
    throw Error(ErrorCode::OutOfWindow, "time " + std::to_string(t_query) + " outside [" +
                                            std::to_string(t_first) + ", " + std::to_string(t_last) + "]");
  std::size_t a = traj.frame_at_or_before(std::max(t_query, t_first));
  const FlowState& fa = traj.frames[a];
  if (std::abs(fa.time - t_query) <= eps || a + 1 == traj.frames.size())
    return fn(fa, t0 - fa.time);
  const FlowState& fb = traj.frames[a + 1];
  if (std::abs(fb.time - t_query) <= eps) return fn(fb, t0 - fb.time);
  const double va = fn(fa, t0 - fa.time);
  // The later frame can sit at or past the centre time; fall back to the earlier one.
  if (!(t0 - fb.time > 0.0)) return va;
  const double vb = fn(fb, t0 - fb.time);
  const double w = (t_query - fa.time) / (fb.time - fa.time);
  return (1.0 - w) * va + w * vb;
}

void require_physical(const FlowTrajectory& traj) {
  if (traj.mode != FlowMode::Physical)
    throw Error(ErrorCode::OutOfDomain, "density ratios need a physical-time trajectory");
}

}  // namespace

double gaussian_length(const DiscreteCurve& curve, Vec2 x0, double lambda) {
  return normalized(curve, x0, lambda, {});
}

double gaussian_length_cutoff(const DiscreteCurve& curve, Vec2 x0, double lambda, double R,
                              double shift) {
  if (!(R > 0.0)) throw Error(ErrorCode::OutOfDomain, "cutoff radius must be positive");
  return normalized(curve, x0, lambda, {true, 1.0 / (R * R), shift});
}

DensityReport entropy(const DiscreteCurve& curve, const EntropySearch& search) {
  const std::size_t g = std::max<std::size_t>(search.grid, 2);
  if (!(search.lambda_min > 0.0 && search.lambda_max > search.lambda_min))
    throw Error(ErrorCode::OutOfDomain, "entropy lambda range must satisfy 0 < min < max");
  Vec2 lo = curve[0], hi = curve[0];
  for (const Vec2& p : curve.points()) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double llo = std::log(search.lambda_min), lhi = std::log(search.lambda_max);
  const double dl = (lhi - llo) / static_cast<double>(g - 1);
  const double dx = (hi.x - lo.x) / static_cast<double>(g - 1);
  const double dy = (hi.y - lo.y) / static_cast<double>(g - 1);
  auto param = [&](std::size_t idx) {
    const std::size_t il = idx / (g * g), ix = (idx / g) % g, iy = idx % g;
    return std::array<double, 3>{lo.x + static_cast<double>(ix) * dx,
                                 lo.y + static_cast<double>(iy) * dy, llo + static_cast<double>(il) * dl};
  };
  auto eval = [&](const std::array<double, 3>& q) {
    const double ll = std::clamp(q[2], llo, lhi);
    return gaussian_length(curve, {q[0], q[1]}, std::exp(ll));
  };

  const std::size_t cells = g * g * g;
  std::vector<double> values(cells);
  parallel_for(cells, [&](std::size_t i) { values[i] = eval(param(i)); });

  std::vector<std::size_t> order(cells);
  for (std::size_t i = 0; i < cells; ++i) order[i] = i;
  const std::size_t starts = std::min(search.refine_starts, cells);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  const double fallback = 0.05 * std::max(curve.extent(), 1e-12);
  const std::array<double, 3> step{dx > 0 ? dx : fallback, dy > 0 ? dy : fallback, dl};
  std::vector<std::pair<std::array<double, 3>, double>> refined(starts);
  parallel_for(starts, [&](std::size_t k) {
    refined[k] = nelder_mead_max(eval, param(order[k]), step, search.max_iterations, search.tolerance);
  });

  std::array<double, 3> best = param(order[0]);
  double best_value = values[order[0]];
  for (const auto& [q, v] : refined)
    if (v > best_value) best = q, best_value = v;

  DensityReport r;
  r.kind = DensityKind::Entropy;
  r.center = {best[0], best[1]};
  r.scale = std::exp(std::clamp(best[2], llo, lhi));
  r.value = best_value;
  r.truncated = !curve.closed();
  return r;
}

double theta(const FlowTrajectory& traj, Vec2 x0, double t0, double r) {
  require_physical(traj);
  if (!(r > 0.0)) throw Error(ErrorCode::OutOfDomain, "r must be positive");
  return interpolate_frames(traj, t0 - r * r, t0, [&](const FlowState& f, double lambda) {
    return gaussian_length(f.curve, x0, lambda);
  });
}

double theta_localized(const FlowTrajectory& traj, Vec2 xbar, double tbar, double R, double sigma) {
  require_physical(traj);
  if (!(R > 0.0 && sigma > 0.0)) throw Error(ErrorCode::OutOfDomain, "R and sigma must be positive");
  const double t_query = tbar - sigma * sigma;
  // Properness: no end point inside the support of psi on the queried span.
  if (!traj.frames.empty() && !traj.frames.front().curve.closed()) {
    std::size_t k = t_query >= traj.frames.front().time ? traj.frame_at_or_before(t_query) : 0;
    for (; k < traj.frames.size() && traj.frames[k].time <= tbar; ++k) {
      const FlowState& f = traj.frames[k];
      const double shift = 2.0 * (tbar - f.time);
      for (const Vec2& e : {f.curve.points().front(), f.curve.points().back()}) {
        const Vec2 d = e - xbar;
        if (dot(d, d) - shift < R * R)
          throw Error(ErrorCode::NotProper, "curve end point inside the cutoff support at t = " +
                                                std::to_string(f.time));
      }
    }
  }
  return interpolate_frames(traj, t_query, tbar, [&](const FlowState& f, double lambda) {
    return gaussian_length_cutoff(f.curve, xbar, lambda, R, 2.0 * lambda);
  });
}

MonotonicityReport monotonicity_report(const FlowTrajectory& traj, double tolerance) {
  if (traj.mode != FlowMode::Rescaled)
    throw Error(ErrorCode::OutOfDomain, "monotonicity_report expects a rescaled trajectory");
  MonotonicityReport rep;
  const std::size_t n = traj.frames.size();
  rep.tau.resize(n);
  rep.F.resize(n);
  parallel_for(n, [&](std::size_t k) {
    rep.tau[k] = traj.frames[k].time;
    rep.F[k] = gaussian_length(traj.frames[k].curve, {0.0, 0.0}, 1.0);
  });
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double jump = rep.F[k + 1] - rep.F[k];
    if (jump > rep.max_jump) rep.max_jump = jump, rep.jump_index = k;
  }
  rep.passed = rep.max_jump <= tolerance;
  return rep;
}

LemmaA1Result lemma_a1_check(double a, double b, double r, const DiscreteCurve& curve, double C,
                             double delta) {
  auto violated = [](const std::string& m) { throw Error(ErrorCode::HypothesisViolated, m); };
  if (!(a >= 0.0 && a < delta)) violated("need 0 <= a < delta");
  if (!(b >= 0.0 && b < delta)) violated("need 0 <= b < delta");
  if (!(r > 1.0 / delta)) violated("need r > 1 / delta");
  if (curve.closed()) violated("curve must be an arc with end points on the circle |x| = r");
  for (const Vec2& e : {curve.points().front(), curve.points().back()})
    if (std::abs(norm(e) - r) > 1e-6 * r) violated("end point not on the circle |x| = r");
  const std::vector<double> k = curvature(curve);
  const double kbound = b / r;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (std::abs(k[i]) > kbound * (1.0 + 1e-3) + 1e-9 / r)
      violated("curvature " + std::to_string(k[i]) + " exceeds b / r at vertex " + std::to_string(i));

  LemmaA1Result res;
  res.value = normalized(curve, {0.0, 0.0}, 1.0, {true, a * a, 2.0});
  res.d0 = distance_to_polyline({0.0, 0.0}, curve);
  res.upper = 1.0 + C * a * a + C * b;
  res.lower = 1.0 - C * res.d0 * res.d0 - C * a - C * b - C * std::exp(-r / 4.0);
  res.inside = res.lower <= res.value && res.value <= res.upper;
  return res;
}

}  // namespace csflab
