#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csflab/geometry.hpp"

namespace csflab {

// Parametric cubic spline through polyline vertices, parameterized by
// cumulative chord length. Closed curves use periodic end conditions, open
// curves not-a-knot.
class CurveSpline {
 public:
  CurveSpline(std::span<const Vec2> points, bool closed);

  bool closed() const noexcept { return closed_; }
  std::size_t segments() const noexcept { return knots_.size() - 1; }
  double param_length() const noexcept { return knots_.back(); }
  double arc_length() const noexcept { return arc_.back(); }
  // Arc length at the start of each segment (segments() + 1 entries).
  const std::vector<double>& arc_at_knots() const noexcept { return arc_; }

  Vec2 eval(double u) const;
  Vec2 d1(double u) const;
  Vec2 d2(double u) const;
  Vec2 d3(double u) const;
  // Signed curvature and its arc-length derivative at parameter u.
  double curvature(double u) const;
  double curvature_s(double u) const;
  const std::vector<double>& knots() const noexcept { return knots_; }
  // Arc length from u = 0 to u.
  double arc_at(double u) const;

  // Parameter u at which the spline arc length from u = 0 equals s.
  double param_at_arc(double s) const;
  // Spline points at a non-decreasing list of arc lengths in [0, arc_length()].
  std::vector<Vec2> points_at_arcs(std::span<const double> sorted_s) const;

 private:
  std::size_t locate(double& u) const;
  Vec2 segment_eval(std::size_t seg, double t) const;
  Vec2 segment_d1(std::size_t seg, double t) const;
  double segment_arc(std::size_t seg, double t) const;
  double solve_in_segment(std::size_t seg, double target) const;

  bool closed_;
  std::vector<double> knots_;
  std::vector<Vec2> pts_;  // segments() + 1 entries (closed curves repeat the first)
  std::vector<Vec2> m_;    // second derivatives at knots
  std::vector<double> arc_;
  struct Coef { Vec2 c0, c1, c2, c3; };  // power basis in t = u - knot
  std::vector<Coef> coef_;
};

}  // namespace csflab
