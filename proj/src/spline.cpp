#include "csflab/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "csflab/error.hpp"

namespace csflab {
namespace {

// Thomas algorithm; a: sub, b: diag, c: super. Solves in place into d.
void solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                       std::vector<Vec2>& d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] = (1.0 / b[n - 1]) * d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (1.0 / b[i]) * (d[i] - c[i] * d[i + 1]);
}

// Cyclic tridiagonal system via Sherman-Morrison.
void solve_cyclic(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<double>& c, std::vector<Vec2>& d) {
  const std::size_t n = b.size();
  const double alpha = c[n - 1];  // bottom-left corner
  const double beta = a[0];       // top-right corner
  const double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;

  std::vector<Vec2> x(d);
  solve_tridiagonal(a, bb, c, x);

  std::vector<Vec2> u(n, Vec2{});
  u[0] = {gamma, 0.0};
  u[n - 1] = {alpha, 0.0};
  solve_tridiagonal(a, bb, c, u);

  const double vx = x[0].x + beta * x[n - 1].x / gamma;
  const double vy = x[0].y + beta * x[n - 1].y / gamma;
  const double vz = 1.0 + u[0].x + beta * u[n - 1].x / gamma;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = {x[i].x - (vx / vz) * u[i].x, x[i].y - (vy / vz) * u[i].x};
  }
}

// 5-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 5> kGaussX{-0.9061798459386640, -0.5384693101056831, 0.0,
                                        0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussW{0.2369268850561891, 0.4786286704993665,
                                        0.5688888888888889, 0.4786286704993665,
                                        0.2369268850561891};

}  // namespace

CurveSpline::CurveSpline(std::span<const Vec2> points, bool closed) : closed_(closed) {
  const std::size_t n = points.size();
  if (n < 4) throw Error(ErrorCode::InvalidCurve, "spline needs at least 4 points");
  pts_.assign(points.begin(), points.end());
  if (closed) pts_.push_back(points.front());
  const std::size_t segs = pts_.size() - 1;

  knots_.resize(segs + 1);
  knots_[0] = 0.0;
  std::vector<double> h(segs);
  for (std::size_t i = 0; i < segs; ++i) {
    h[i] = norm(pts_[i + 1] - pts_[i]);
    knots_[i + 1] = knots_[i] + h[i];
  }
  auto slope = [&](std::size_t i) { return (1.0 / h[i]) * (pts_[i + 1] - pts_[i]); };

  m_.assign(segs + 1, Vec2{});
  if (closed) {
    // unknowns M_0 .. M_{segs-1}, M_segs == M_0
    std::vector<double> a(segs), b(segs), c(segs);
    std::vector<Vec2> r(segs);
    for (std::size_t i = 0; i < segs; ++i) {
      const std::size_t im = (i + segs - 1) % segs;
      a[i] = h[im];
      b[i] = 2.0 * (h[im] + h[i]);
      c[i] = h[i];
      r[i] = 6.0 * (slope(i) - slope(im));
    }
    solve_cyclic(a, b, c, r);
    for (std::size_t i = 0; i < segs; ++i) m_[i] = r[i];
    m_[segs] = m_[0];
  } else {
    // not-a-knot: unknowns M_1 .. M_{segs-1}
    const std::size_t k = segs - 1;
    std::vector<double> a(k, 0.0), b(k, 0.0), c(k, 0.0);
    std::vector<Vec2> r(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = j + 1;
      a[j] = h[i - 1];
      b[j] = 2.0 * (h[i - 1] + h[i]);
      c[j] = h[i];
      r[j] = 6.0 * (slope(i) - slope(i - 1));
    }
    const double h0 = h[0], h1 = h[1];
    b[0] = h0 * (h0 + h1) / h1 + 2.0 * (h0 + h1);
    c[0] = h1 - h0 * h0 / h1;
    const double hn = h[segs - 1], hm = h[segs - 2];
    b[k - 1] = hn * (hn + hm) / hm + 2.0 * (hm + hn);
    a[k - 1] = hm - hn * hn / hm;
    if (k == 1) {
      // degenerate small systems are excluded by the 4-point minimum (k >= 2)
    }
    solve_tridiagonal(a, b, c, r);
    for (std::size_t j = 0; j < k; ++j) m_[j + 1] = r[j];
    m_[0] = (1.0 / h1) * ((h0 + h1) * m_[1] - h0 * m_[2]);
    m_[segs] = (1.0 / hm) * ((hm + hn) * m_[segs - 1] - hn * m_[segs - 2]);
  }

  coef_.resize(segs);
  for (std::size_t i = 0; i < segs; ++i) {
    const double hi = h[i];
    coef_[i] = {pts_[i], slope(i) - (hi / 6.0) * (2.0 * m_[i] + m_[i + 1]), 0.5 * m_[i],
                (1.0 / (6.0 * hi)) * (m_[i + 1] - m_[i])};
  }

  arc_.resize(segs + 1);
  arc_[0] = 0.0;
  for (std::size_t i = 0; i < segs; ++i) arc_[i + 1] = arc_[i] + segment_arc(i, h[i]);
}

std::size_t CurveSpline::locate(double& u) const {
  const double total = knots_.back();
  if (closed_) {
    u = std::fmod(u, total);
    if (u < 0.0) u += total;
  } else {
    u = std::clamp(u, 0.0, total);
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  std::size_t seg = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(seg, segments() - 1);
}

Vec2 CurveSpline::eval(double u) const {
  const std::size_t i = locate(u);
  return segment_eval(i, u - knots_[i]);
}

Vec2 CurveSpline::d1(double u) const {
  const std::size_t i = locate(u);
  return segment_d1(i, u - knots_[i]);
}

Vec2 CurveSpline::d2(double u) const {
  const std::size_t i = locate(u);
  const Coef& c = coef_[i];
  return 2.0 * c.c2 + (6.0 * (u - knots_[i])) * c.c3;
}

Vec2 CurveSpline::d3(double u) const {
  const std::size_t i = locate(u);
  return 6.0 * coef_[i].c3;
}

double CurveSpline::curvature(double u) const {
  const Vec2 a = d1(u), b = d2(u);
  const double sp = norm(a);
  return cross(a, b) / (sp * sp * sp);
}

double CurveSpline::curvature_s(double u) const {
  const Vec2 a = d1(u), b = d2(u), c = d3(u);
  const double sp2 = dot(a, a);
  const double sp = std::sqrt(sp2);
  const double ku = cross(a, c) / (sp2 * sp) - 3.0 * cross(a, b) * dot(a, b) / (sp2 * sp2 * sp);
  return ku / sp;
}

double CurveSpline::arc_at(double u) const {
  const std::size_t i = locate(u);
  return arc_[i] + segment_arc(i, u - knots_[i]);
}

Vec2 CurveSpline::segment_eval(std::size_t seg, double t) const {
  const Coef& c = coef_[seg];
  return c.c0 + t * (c.c1 + t * (c.c2 + t * c.c3));
}

Vec2 CurveSpline::segment_d1(std::size_t seg, double t) const {
  const Coef& c = coef_[seg];
  return c.c1 + t * (2.0 * c.c2 + (3.0 * t) * c.c3);
}

double CurveSpline::segment_arc(std::size_t seg, double t) const {
  if (t <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < kGaussX.size(); ++k)
    acc += kGaussW[k] * norm(segment_d1(seg, 0.5 * t * (kGaussX[k] + 1.0)));
  return 0.5 * t * acc;
}

double CurveSpline::solve_in_segment(std::size_t seg, double target) const {
  const double h = knots_[seg + 1] - knots_[seg];
  const double seg_len = arc_[seg + 1] - arc_[seg];
  const double tol = 1e-14 * std::max(1.0, arc_.back());
  double lo = 0.0, hi = h;
  double t = seg_len > 0.0 ? std::clamp(h * target / seg_len, 0.0, h) : 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const double f = segment_arc(seg, t) - target;
    if (std::abs(f) < tol) break;
    if (f > 0.0) hi = t; else lo = t;
    const double speed = norm(segment_d1(seg, t));
    double next = speed > 0.0 ? t - f / speed : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

std::vector<Vec2> CurveSpline::points_at_arcs(std::span<const double> sorted_s) const {
  std::vector<Vec2> out(sorted_s.size());
  std::size_t seg = 0;
  const std::size_t last = segments() - 1;
  for (std::size_t k = 0; k < sorted_s.size(); ++k) {
    const double s = std::clamp(sorted_s[k], 0.0, arc_.back());
    while (seg < last && arc_[seg + 1] <= s) ++seg;
    out[k] = segment_eval(seg, solve_in_segment(seg, s - arc_[seg]));
  }
  return out;
}

double CurveSpline::param_at_arc(double s) const {
  const double total = arc_.back();
  if (closed_) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
  } else {
    s = std::clamp(s, 0.0, total);
  }
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  std::size_t seg = it == arc_.begin() ? 0 : static_cast<std::size_t>(it - arc_.begin()) - 1;
  seg = std::min(seg, segments() - 1);
  return knots_[seg] + solve_in_segment(seg, s - arc_[seg]);
}

}  // namespace csflab
