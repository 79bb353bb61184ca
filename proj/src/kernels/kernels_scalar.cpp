#include "csflab/kernels.hpp"

#include <cmath>

namespace csflab::kernels::scalar {
namespace {

double gaussian_sum(const WeightedPoints& pts, double cx, double cy, double inv4l,
                    const CubicCutoff& cut) {
  double acc = 0.0;
  const std::size_t n = pts.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts.x[i] - cx;
    const double dy = pts.y[i] - cy;
    const double q = dx * dx + dy * dy;
    double v = pts.w[i] * std::exp(-q * inv4l);
    if (cut.enabled) {
      const double base = 1.0 - (q - cut.shift) * cut.inv_r2;
      v *= base > 0.0 ? base * base * base : 0.0;
    }
    acc += v;
  }
  return acc;
}

double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f[i] * g[i];
  return acc;
}

void menger_curvature(std::span<const double> xp, std::span<const double> yp, CurvatureOut out) {
  const std::size_t n = out.kappa.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = xp[i + 1] - xp[i], ay = yp[i + 1] - yp[i];
    const double bx = xp[i + 2] - xp[i + 1], by = yp[i + 2] - yp[i + 1];
    const double cx = xp[i + 2] - xp[i], cy = yp[i + 2] - yp[i];
    const double la = std::sqrt(ax * ax + ay * ay);
    const double lb = std::sqrt(bx * bx + by * by);
    const double lc = std::sqrt(cx * cx + cy * cy);
    const double cross = ax * by - ay * bx;
    out.kappa[i] = 2.0 * cross / (la * lb * lc);
    out.edge[i] = lb;
  }
}

}  // namespace

const Table table{&gaussian_sum, &weighted_dot, &menger_curvature};

}  // namespace csflab::kernels::scalar
