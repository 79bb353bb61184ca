#pragma once

// Data-parallel inner loops shared by the geometry, density and spectral
// modules. Each kernel has a scalar reference implementation and an AVX2
// variant; the active backend is picked once at startup from CPUID and can be
// overridden (tests pin both and compare).

#include <cstddef>
#include <span>
#include <string_view>

namespace csflab::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);

// Optional cubic cutoff multiplying the Gaussian weight:
//   psi = (1 - (|p - c|^2 - shift) * inv_r2)_+^3
struct CubicCutoff {
  bool enabled = false;
  double inv_r2 = 0.0;
  double shift = 0.0;
};

// Structure-of-arrays view of a point cloud with per-point weights.
struct WeightedPoints {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> w;
};

// Menger curvature of every interior triple of a padded coordinate array.
// Inputs have n + 2 entries (index 0 and n + 1 are the neighbours of the
// first and last output vertex). Outputs have n entries: signed curvature
// and the length of the edge leaving each vertex.
struct CurvatureOut {
  std::span<double> kappa;
  std::span<double> edge;
};

struct Table {
  double (*gaussian_sum)(const WeightedPoints&, double cx, double cy, double inv4l,
                         const CubicCutoff&);
  double (*weighted_dot)(std::span<const double> w, std::span<const double> f,
                         std::span<const double> g);
  void (*menger_curvature)(std::span<const double> xpad, std::span<const double> ypad,
                           CurvatureOut out);
};

namespace scalar {
extern const Table table;
}
namespace avx2 {
extern const Table table;
}

bool avx2_supported();
Backend active_backend();
// Throws std::invalid_argument if the backend is not supported on this CPU.
void set_backend(Backend b);
const Table& table_for(Backend b);

// sum_i w_i * exp(-|p_i - c|^2 * inv4l) * psi_i
inline double gaussian_sum(const WeightedPoints& pts, double cx, double cy, double inv4l,
                           const CubicCutoff& cut = {}) {
  return table_for(active_backend()).gaussian_sum(pts, cx, cy, inv4l, cut);
}

// sum_i w_i * f_i * g_i
inline double weighted_dot(std::span<const double> w, std::span<const double> f,
                           std::span<const double> g) {
  return table_for(active_backend()).weighted_dot(w, f, g);
}

inline void menger_curvature(std::span<const double> xpad, std::span<const double> ypad,
                             CurvatureOut out) {
  table_for(active_backend()).menger_curvature(xpad, ypad, out);
}

}  // namespace csflab::kernels
