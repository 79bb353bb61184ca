#include "csflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "csflab/error.hpp"
#include "csflab/kernels.hpp"
#include "csflab/spline.hpp"

namespace csflab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::DegenerateSpacing: return "DegenerateSpacing";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::NotProper: return "NotProper";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::PathBroken: return "PathBroken";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::DegenerateVertexSet: return "DegenerateVertexSet";
    case ErrorCode::SelfCrossingChord: return "SelfCrossingChord";
    case ErrorCode::BoundaryViolated: return "BoundaryViolated";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
    case ErrorCode::OrientationAmbiguous: return "OrientationAmbiguous";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SheetCountMismatch: return "SheetCountMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

double shoelace(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0, n = p.size(); i < n; ++i) a += cross(p[i], p[(i + 1) % n]);
  return 0.5 * a;
}

// Derivative at the middle node of a quadratic through three samples with
// spacings h1 (left) and h2 (right).
template <class T>
T centered(const T& fm, const T& f0, const T& fp, double h1, double h2) {
  return (h1 * h1 * (fp - f0) + h2 * h2 * (f0 - fm)) * (1.0 / (h1 * h2 * (h1 + h2)));
}

// Derivative at the first node of a quadratic through f0, f1, f2.
template <class T>
T one_sided(const T& f0, const T& f1, const T& f2, double h1, double h2) {
  return f0 * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + f1 * ((h1 + h2) / (h1 * h2)) +
         f2 * (-h1 / (h2 * (h1 + h2)));
}

Vec2 unit(Vec2 v) {
  const double l = norm(v);
  return {v.x / l, v.y / l};
}

}  // namespace

DiscreteCurve::DiscreteCurve(std::vector<Vec2> points, bool closed, std::optional<double> time)
    : points_(std::move(points)), closed_(closed), time_(time) {
  if (closed_ && points_.size() > kMinPoints && points_.front() == points_.back())
    points_.pop_back();
  if (points_.size() < kMinPoints)
    throw Error(ErrorCode::InvalidCurve, "curve needs at least 8 points, got " +
                                             std::to_string(points_.size()));
  for (const Vec2& p : points_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorCode::InvalidCurve, "non-finite coordinate");
  for (std::size_t i = 0; i < edge_count(); ++i)
    if (points_[i] == points_[(i + 1) % size()])
      throw Error(ErrorCode::InvalidCurve, "coincident consecutive points at " + std::to_string(i));
  if (closed_ && shoelace(points_) < 0.0) std::reverse(points_.begin(), points_.end());
}

DiscreteCurve DiscreteCurve::with_time(std::optional<double> t) const {
  DiscreteCurve c = *this;
  c.time_ = t;
  return c;
}

double DiscreteCurve::length() const {
  double l = 0.0;
  for (std::size_t i = 0; i < edge_count(); ++i) l += norm(points_[(i + 1) % size()] - points_[i]);
  return l;
}

double DiscreteCurve::signed_area() const { return closed_ ? shoelace(points_) : 0.0; }

double DiscreteCurve::extent() const {
  double x0 = points_[0].x, x1 = x0, y0 = points_[0].y, y1 = y0;
  for (const Vec2& p : points_) {
    x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

double DiscreteCurve::min_edge() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edge_count(); ++i)
    m = std::min(m, norm(points_[(i + 1) % size()] - points_[i]));
  return m;
}

double DiscreteCurve::max_edge() const {
  double m = 0.0;
  for (std::size_t i = 0; i < edge_count(); ++i)
    m = std::max(m, norm(points_[(i + 1) % size()] - points_[i]));
  return m;
}

namespace {

// Menger curvature and edge lengths through the active kernel backend.
// For open curves the end values of kappa are placeholders (overwritten).
void menger(const DiscreteCurve& c, std::vector<double>& kappa, std::vector<double>& edge) {
  const std::size_t n = c.size();
  const auto& p = c.points();
  std::vector<double> xs(n + 2), ys(n + 2);
  for (std::size_t i = 0; i < n; ++i) { xs[i + 1] = p[i].x; ys[i + 1] = p[i].y; }
  if (c.closed()) {
    xs[0] = p[n - 1].x; ys[0] = p[n - 1].y;
    xs[n + 1] = p[0].x; ys[n + 1] = p[0].y;
  } else {
    // reflect so the padded triples are well defined; the results are discarded
    xs[0] = 2 * p[0].x - p[1].x; ys[0] = 2 * p[0].y - p[1].y;
    xs[n + 1] = 2 * p[n - 1].x - p[n - 2].x; ys[n + 1] = 2 * p[n - 1].y - p[n - 2].y;
  }
  kappa.assign(n, 0.0);
  std::vector<double> e(n);
  kernels::menger_curvature(xs, ys, {kappa, e});
  edge.assign(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(c.edge_count()));
  for (double& k : kappa)
    if (!std::isfinite(k)) k = 0.0;
}

void check_spacing(const DiscreteCurve& c, const std::vector<double>& edge) {
  const double floor = 1e-12 * c.extent();
  for (std::size_t i = 0; i < edge.size(); ++i)
    if (edge[i] < floor)
      throw Error(ErrorCode::DegenerateSpacing, "edge " + std::to_string(i) + " shorter than 1e-12 * diameter");
}

}  // namespace

std::vector<double> curvature(const DiscreteCurve& curve) {
  std::vector<double> kappa, edge;
  menger(curve, kappa, edge);
  check_spacing(curve, edge);
  if (!curve.closed()) {
    const std::size_t n = curve.size();
    kappa[0] = kappa[1] + (kappa[1] - kappa[2]) * edge[0] / edge[1];
    kappa[n - 1] = kappa[n - 2] + (kappa[n - 2] - kappa[n - 3]) * edge[n - 2] / edge[n - 3];
  }
  return kappa;
}

FrameData compute_frame(const DiscreteCurve& curve) {
  FrameData f;
  const std::size_t n = curve.size();
  const auto& p = curve.points();
  menger(curve, f.kappa, f.edge);
  check_spacing(curve, f.edge);

  f.arclength.resize(n);
  f.arclength[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) f.arclength[i] = f.arclength[i - 1] + f.edge[i - 1];
  f.total_length = curve.closed() ? f.arclength[n - 1] + f.edge[n - 1] : f.arclength[n - 1];

  f.tangent.resize(n);
  f.normal.resize(n);
  f.kappa_s.resize(n);
  const bool closed = curve.closed();
  auto hl = [&](std::size_t i) { return f.edge[(i + n - 1) % n]; };  // edge into i
  auto hr = [&](std::size_t i) { return f.edge[i]; };                 // edge out of i

  for (std::size_t i = 0; i < n; ++i) {
    if (!closed && (i == 0 || i == n - 1)) continue;
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    f.tangent[i] = unit(centered(p[im], p[i], p[ip], hl(i), hr(i)));
  }
  if (!closed) {
    f.tangent[0] = unit(one_sided(p[0], p[1], p[2], f.edge[0], f.edge[1]));
    f.tangent[n - 1] =
        -unit(one_sided(p[n - 1], p[n - 2], p[n - 3], f.edge[n - 2], f.edge[n - 3]));
    f.kappa[0] = f.kappa[1] + (f.kappa[1] - f.kappa[2]) * f.edge[0] / f.edge[1];
    f.kappa[n - 1] =
        f.kappa[n - 2] + (f.kappa[n - 2] - f.kappa[n - 3]) * f.edge[n - 2] / f.edge[n - 3];
  }
  for (std::size_t i = 0; i < n; ++i) f.normal[i] = perp(f.tangent[i]);

  f.kappa_s = derivative_s(f, f.kappa, closed);
  return f;
}

std::vector<double> derivative_s(const FrameData& f, const std::vector<double>& v, bool closed) {
  const std::size_t n = v.size();
  if (n != f.arclength.size() || n < 3) throw Error(ErrorCode::InvalidCurve, "derivative_s: size mismatch");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!closed && (i == 0 || i == n - 1)) continue;
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    d[i] = centered(v[im], v[i], v[ip], f.edge[im], f.edge[i]);
  }
  if (!closed) {
    d[0] = one_sided(v[0], v[1], v[2], f.edge[0], f.edge[1]);
    d[n - 1] = -one_sided(v[n - 1], v[n - 2], v[n - 3], f.edge[n - 2], f.edge[n - 3]);
  }
  return d;
}

std::vector<GraphCrossing> horizontal_crossings(const DiscreteCurve& c, const FrameData& f, double y) {
  std::vector<GraphCrossing> out;
  const auto& p = c.points();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < c.edge_count(); ++i) {
    const std::size_t j = (i + 1) % n;
    const Vec2 a = p[i], b = p[j];
    if (!((a.y <= y && y < b.y) || (b.y <= y && y < a.y))) continue;
    const double w = (y - a.y) / (b.y - a.y);
    const Vec2 t = (1 - w) * f.tangent[i] + w * f.tangent[j];
    const double k = (1 - w) * f.kappa[i] + w * f.kappa[j];
    const double uy = t.y != 0.0 ? t.x / t.y : std::copysign(1e300, t.x);
    // x = u(y): kappa = -sgn(t.y) u_yy / (1 + u_y^2)^{3/2}
    const double uyy = -(t.y > 0 ? 1.0 : -1.0) * k * std::pow(1 + uy * uy, 1.5);
    out.push_back({a.x + w * (b.x - a.x), uy, uyy});
  }
  std::sort(out.begin(), out.end(), [](const GraphCrossing& u, const GraphCrossing& v) { return u.x < v.x; });
  return out;
}

DiscreteCurve resample(const DiscreteCurve& curve, std::size_t n) {
  if (n < DiscreteCurve::kMinPoints)
    throw Error(ErrorCode::InvalidCurve, "resample target must be at least 8 points");
  const CurveSpline sp(curve.points(), curve.closed());
  const double total = sp.arc_length();
  const std::size_t intervals = curve.closed() ? n : n - 1;
  std::vector<double> targets(n);
  for (std::size_t k = 0; k < n; ++k)
    targets[k] = total * static_cast<double>(k) / static_cast<double>(intervals);
  std::vector<Vec2> out = sp.points_at_arcs(targets);
  if (!curve.closed()) {
    out.front() = curve.points().front();
    out.back() = curve.points().back();
  }
  return DiscreteCurve(std::move(out), curve.closed(), curve.time());
}

DiscreteCurve resample_adaptive(const DiscreteCurve& curve, const AdaptiveSpacing& sp_cfg) {
  const CurveSpline sp(curve.points(), curve.closed());
  const auto& arc = sp.arc_at_knots();
  const std::size_t segs = sp.segments();

  auto target = [&](double u) {
    const double k = std::max(std::abs(sp.curvature(u)), std::sqrt(std::abs(sp.curvature_s(u))));
    return std::clamp(sp_cfg.c / std::max(k, 1e-300), sp_cfg.h_min, sp_cfg.h_max);
  };

  // Fine grid in arc length with the spacing target at each node.
  const auto& knots = sp.knots();
  std::vector<double> s, h;
  s.reserve(segs * 6);
  for (std::size_t i = 0; i < segs; ++i) {
    const double len = arc[i + 1] - arc[i];
    const double du = knots[i + 1] - knots[i];
    const double hseg = std::min(target(knots[i]), target(knots[i + 1] - 1e-12 * du));
    const std::size_t m = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(4.0 * len / hseg)), 4, 256);
    for (std::size_t j = 0; j < m; ++j) {
      const double u = knots[i] + du * static_cast<double>(j) / static_cast<double>(m);
      s.push_back(j == 0 ? arc[i] : sp.arc_at(u));
      h.push_back(target(u));
    }
  }
  const double total = arc.back();
  if (!curve.closed()) {
    s.push_back(total);
    h.push_back(target(knots.back()));
  }

  // Grading limit: h_i <= h_j + g |s_i - s_j|, by forward and backward sweeps
  // (twice around for closed curves).
  const std::size_t m = s.size();
  const int laps = curve.closed() ? 2 : 1;
  for (int lap = 0; lap < laps; ++lap) {
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t km = k == 0 ? m - 1 : k - 1;
      if (k == 0 && !curve.closed()) continue;
      double ds = s[k] - s[km];
      if (ds < 0.0) ds += total;
      h[k] = std::min(h[k], h[km] + sp_cfg.grading * ds);
    }
    for (std::size_t k = m; k-- > 0;) {
      const std::size_t kp = k + 1 == m ? 0 : k + 1;
      if (k + 1 == m && !curve.closed()) continue;
      double ds = s[kp] - s[k];
      if (ds < 0.0) ds += total;
      h[k] = std::min(h[k], h[kp] + sp_cfg.grading * ds);
    }
  }

  // Cumulative point density N(s) = int ds / h (trapezoid).
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t kp = (k + 1) % m;
    double ds = (k + 1 < m ? s[k + 1] : total) - s[k];
    const double hn = (k + 1 < m || curve.closed()) ? h[kp] : h[k];
    cum[k + 1] = cum[k] + 0.5 * ds * (1.0 / h[k] + 1.0 / hn);
  }
  std::vector<double> sgrid(s);
  sgrid.push_back(total);
  if (!curve.closed()) {
    cum.pop_back();
    sgrid.pop_back();
  }
  const double density = cum.back();
  std::size_t count = std::max<std::size_t>(DiscreteCurve::kMinPoints,
                                            static_cast<std::size_t>(std::ceil(density)));
  const std::size_t intervals = curve.closed() ? count : count - 1;
  std::vector<double> targets;
  targets.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target_n = density * static_cast<double>(k) / static_cast<double>(intervals);
    while (seg + 2 < cum.size() && cum[seg + 1] < target_n) ++seg;
    const double f = (target_n - cum[seg]) / (cum[seg + 1] - cum[seg]);
    targets.push_back(sgrid[seg] + f * (sgrid[seg + 1] - sgrid[seg]));
  }
  std::vector<Vec2> out = sp.points_at_arcs(targets);
  if (!curve.closed()) {
    out.front() = curve.points().front();
    out.back() = curve.points().back();
  }
  return DiscreteCurve(std::move(out), curve.closed(), curve.time());
}

double spline_length(const DiscreteCurve& curve) {
  return CurveSpline(curve.points(), curve.closed()).arc_length();
}

double turning_angle(const DiscreteCurve& curve, std::size_t i, std::size_t j) {
  const std::size_t n = curve.size();
  const auto& p = curve.points();
  if (i >= n || j >= n) throw Error(ErrorCode::InvalidCurve, "turning_angle index out of range");
  auto edge = [&](std::size_t k) { return p[(k + 1) % n] - p[k]; };
  auto angle = [](Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); };

  if (curve.closed() && i == j) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += angle(edge((k + n - 1) % n), edge(k));
    return total;
  }
  std::size_t steps;
  if (curve.closed()) {
    steps = (j + n - i) % n;
  } else {
    if (j < i) return -turning_angle(curve, j, i);
    steps = j - i;
  }
  if (steps == 0) return 0.0;
  // Exterior angles at interior vertices plus the half-turns from the vertex
  // tangents at both ends onto the adjacent edges.
  const FrameData fr = compute_frame(curve);
  double total = angle(fr.tangent[i], edge(i));
  for (std::size_t k = 1; k < steps; ++k) {
    const std::size_t v = (i + k) % n;
    total += angle(edge((v + n - 1) % n), edge(v));
  }
  total += angle(edge((j + n - 1) % n), fr.tangent[j]);
  return total;
}

namespace {

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_meet(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool self_intersects(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const std::size_t ne = curve.edge_count();
  const auto& p = curve.points();
  double x0 = p[0].x, x1 = x0, y0 = p[0].y, y1 = y0;
  for (const Vec2& q : p) {
    x0 = std::min(x0, q.x); x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y); y1 = std::max(y1, q.y);
  }
  const bool use_x = (x1 - x0) >= (y1 - y0);
  auto key = [&](Vec2 q) { return use_x ? q.x : q.y; };

  struct Span { double lo, hi; std::size_t e; };
  std::vector<Span> spans(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const double a = key(p[e]), b = key(p[(e + 1) % n]);
    spans[e] = {std::min(a, b), std::max(a, b), e};
  }
  std::sort(spans.begin(), spans.end(), [](const Span& l, const Span& r) { return l.lo < r.lo; });

  auto adjacent = [&](std::size_t e, std::size_t f) {
    if (e > f) std::swap(e, f);
    if (f == e + 1) return true;
    return curve.closed() && e == 0 && f == ne - 1;
  };

  for (std::size_t a = 0; a < ne; ++a) {
    const Span& sa = spans[a];
    for (std::size_t b = a + 1; b < ne && spans[b].lo <= sa.hi; ++b) {
      const Span& sb = spans[b];
      if (adjacent(sa.e, sb.e)) continue;
      if (segments_meet(p[sa.e], p[(sa.e + 1) % n], p[sb.e], p[(sb.e + 1) % n])) return true;
    }
  }
  return false;
}

double distance_to_polyline(Vec2 q, const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const auto& p = curve.points();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < curve.edge_count(); ++e) {
    const Vec2 a = p[e], b = p[(e + 1) % n];
    const Vec2 ab = b - a;
    const double t = std::clamp(dot(q - a, ab) / dot(ab, ab), 0.0, 1.0);
    const Vec2 d = q - (a + t * ab);
    best = std::min(best, dot(d, d));
  }
  return std::sqrt(best);
}

double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  double h = 0.0;
  for (const Vec2& q : a.points()) h = std::max(h, distance_to_polyline(q, b));
  for (const Vec2& q : b.points()) h = std::max(h, distance_to_polyline(q, a));
  return h;
}

DiscreteCurve rotated(const DiscreteCurve& curve, double angle, Vec2 about) {
  std::vector<Vec2> pts(curve.points());
  for (Vec2& q : pts) q = about + rotate(q - about, angle);
  return DiscreteCurve(std::move(pts), curve.closed(), curve.time());
}

DiscreteCurve translated(const DiscreteCurve& curve, Vec2 offset) {
  std::vector<Vec2> pts(curve.points());
  for (Vec2& q : pts) q += offset;
  return DiscreteCurve(std::move(pts), curve.closed(), curve.time());
}

DiscreteCurve scaled(const DiscreteCurve& curve, double factor) {
  std::vector<Vec2> pts(curve.points());
  for (Vec2& q : pts) q *= factor;
  return DiscreteCurve(std::move(pts), curve.closed(), curve.time());
}

}  // namespace csflab
