#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace csflab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
// J(x, y) = (-y, x): quarter turn counterclockwise.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

// Ordered planar polyline. Closed curves are stored without repeating the
// first point and are normalized to counterclockwise orientation.
class DiscreteCurve {
 public:
  static constexpr std::size_t kMinPoints = 8;

  // Throws Error(InvalidCurve) on fewer than kMinPoints points, non-finite
  // coordinates, or coincident consecutive points.
  DiscreteCurve(std::vector<Vec2> points, bool closed, std::optional<double> time = std::nullopt);

  const std::vector<Vec2>& points() const noexcept { return points_; }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t edge_count() const noexcept { return closed_ ? size() : size() - 1; }
  bool closed() const noexcept { return closed_; }
  std::optional<double> time() const noexcept { return time_; }

  DiscreteCurve with_time(std::optional<double> t) const;

  double length() const;
  // Shoelace area; positive for counterclockwise closed curves, 0 for open ones.
  double signed_area() const;
  // Diagonal of the axis-aligned bounding box.
  double extent() const;
  double min_edge() const;
  double max_edge() const;

 private:
  std::vector<Vec2> points_;
  bool closed_;
  std::optional<double> time_;
};

struct FrameData {
  std::vector<double> arclength;  // cumulative s at each vertex, s[0] = 0
  double total_length = 0.0;      // includes the closing edge for closed curves
  std::vector<Vec2> tangent;
  std::vector<Vec2> normal;       // normal = J * tangent
  std::vector<double> kappa;
  std::vector<double> kappa_s;
  std::vector<double> edge;       // length of edge i -> i + 1 (edge_count entries)
};

// Menger curvature on triples, second-order tangents, centred kappa_s.
// Throws Error(DegenerateSpacing) if an edge is shorter than 1e-12 * extent.
FrameData compute_frame(const DiscreteCurve& curve);

// Arc-length derivative of per-vertex values with the kappa_s stencils.
std::vector<double> derivative_s(const FrameData& frame, const std::vector<double>& values, bool closed);

// Where the line {y = const} meets the curve, read as a graph x = u(y):
// position, slope and second derivative (interpolated frame data), sorted by x.
struct GraphCrossing {
  double x = 0.0;
  double uy = 0.0;
  double uyy = 0.0;
};
std::vector<GraphCrossing> horizontal_crossings(const DiscreteCurve& curve, const FrameData& frame, double y);

// Signed curvature only; same estimator as compute_frame.
std::vector<double> curvature(const DiscreteCurve& curve);

// n points at uniform arc length along a cubic spline through the input.
DiscreteCurve resample(const DiscreteCurve& curve, std::size_t n);

// Curvature-adapted remeshing: target spacing
//   clamp(c / max(|kappa|, sqrt|kappa_s|), h_min, h_max),
// limited to grow by at most `grading` per unit arc length. The kappa_s term
// keeps the flanks of a sharp tip resolved where kappa decays quickly.
struct AdaptiveSpacing {
  double c = 0.15;
  double h_min = 1e-4;
  double h_max = 0.25;
  double grading = 0.3;
};
DiscreteCurve resample_adaptive(const DiscreteCurve& curve, const AdaptiveSpacing& spacing);

// Length of the interpolating cubic spline (the smooth curve the polyline samples).
double spline_length(const DiscreteCurve& curve);

// Integral of curvature from vertex i to vertex j following the orientation.
// For a closed curve and i == j the whole loop is traversed.
double turning_angle(const DiscreteCurve& curve, std::size_t i, std::size_t j);

// True iff two non-adjacent edges intersect (touching counts).
bool self_intersects(const DiscreteCurve& curve);

double distance_to_polyline(Vec2 p, const DiscreteCurve& curve);
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b);

DiscreteCurve rotated(const DiscreteCurve& curve, double angle, Vec2 about = {});
DiscreteCurve translated(const DiscreteCurve& curve, Vec2 offset);
DiscreteCurve scaled(const DiscreteCurve& curve, double factor);

}  // namespace csflab
