// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "csflab/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace csflab::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// exp(x) for x <= 0. Cody-Waite reduction to |r| <= ln2/2, degree-12 Taylor
// polynomial, exponent rebuilt from the rounded multiple of ln2. Lanes below
// -708 flush to zero.
inline __m256d exp_nonpos(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lower = _mm256_set1_pd(-708.0);

  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  // 1/j! for j = 12 .. 0
  static constexpr double c[13] = {
      2.08767569878680989792e-09, 2.50521083854417187751e-08, 2.75573192239858906526e-07,
      2.75573192239858906526e-06, 2.48015873015873015873e-05, 1.98412698412698412698e-04,
      1.38888888888888888889e-03, 8.33333333333333333333e-03, 4.16666666666666666667e-02,
      1.66666666666666666667e-01, 5.00000000000000000000e-01, 1.0,
      1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int j = 1; j < 13; ++j) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[j]));

  // 2^k through the 1.5 * 2^52 rounding trick (k is already integral).
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ki = _mm256_castpd_si256(_mm256_add_pd(k, magic));
  ki = _mm256_sub_epi64(ki, _mm256_castpd_si256(magic));
  ki = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(ki);

  return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

double gaussian_sum(const WeightedPoints& pts, double cx, double cy, double inv4l,
                    const CubicCutoff& cut) {
  const std::size_t n = pts.x.size();
  const double* px = pts.x.data();
  const double* py = pts.y.data();
  const double* pw = pts.w.data();
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vneg = _mm256_set1_pd(-inv4l);
  const __m256d vinv_r2 = _mm256_set1_pd(cut.inv_r2);
  const __m256d vshift = _mm256_set1_pd(cut.shift);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();

  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(px + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(py + i), vcy);
    const __m256d q = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
    __m256d v = _mm256_mul_pd(_mm256_loadu_pd(pw + i), exp_nonpos(_mm256_mul_pd(q, vneg)));
    if (cut.enabled) {
      __m256d base = _mm256_fnmadd_pd(_mm256_sub_pd(q, vshift), vinv_r2, one);
      base = _mm256_max_pd(base, zero);
      v = _mm256_mul_pd(v, _mm256_mul_pd(base, _mm256_mul_pd(base, base)));
    }
    acc = _mm256_add_pd(acc, v);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double dx = px[i] - cx;
    const double dy = py[i] - cy;
    const double q = dx * dx + dy * dy;
    double v = pw[i] * std::exp(-q * inv4l);
    if (cut.enabled) {
      const double base = 1.0 - (q - cut.shift) * cut.inv_r2;
      v *= base > 0.0 ? base * base * base : 0.0;
    }
    total += v;
  }
  return total;
}

double weighted_dot(std::span<const double> w, std::span<const double> f,
                    std::span<const double> g) {
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wf = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(f.data() + i));
    acc = _mm256_fmadd_pd(wf, _mm256_loadu_pd(g.data() + i), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += w[i] * f[i] * g[i];
  return total;
}

void menger_curvature(std::span<const double> xp, std::span<const double> yp, CurvatureOut out) {
  const std::size_t n = out.kappa.size();
  const double* x = xp.data();
  const double* y = yp.data();
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(x + i), x1 = _mm256_loadu_pd(x + i + 1),
                  x2 = _mm256_loadu_pd(x + i + 2);
    const __m256d y0 = _mm256_loadu_pd(y + i), y1 = _mm256_loadu_pd(y + i + 1),
                  y2 = _mm256_loadu_pd(y + i + 2);
    const __m256d ax = _mm256_sub_pd(x1, x0), ay = _mm256_sub_pd(y1, y0);
    const __m256d bx = _mm256_sub_pd(x2, x1), by = _mm256_sub_pd(y2, y1);
    const __m256d cx = _mm256_sub_pd(x2, x0), cy = _mm256_sub_pd(y2, y0);
    const __m256d la = _mm256_sqrt_pd(_mm256_fmadd_pd(ay, ay, _mm256_mul_pd(ax, ax)));
    const __m256d lb = _mm256_sqrt_pd(_mm256_fmadd_pd(by, by, _mm256_mul_pd(bx, bx)));
    const __m256d lc = _mm256_sqrt_pd(_mm256_fmadd_pd(cy, cy, _mm256_mul_pd(cx, cx)));
    const __m256d cross = _mm256_fmsub_pd(ax, by, _mm256_mul_pd(ay, bx));
    const __m256d denom = _mm256_mul_pd(_mm256_mul_pd(la, lb), lc);
    _mm256_storeu_pd(out.kappa.data() + i, _mm256_div_pd(_mm256_mul_pd(two, cross), denom));
    _mm256_storeu_pd(out.edge.data() + i, lb);
  }
  for (; i < n; ++i) {
    const double ax = x[i + 1] - x[i], ay = y[i + 1] - y[i];
    const double bx = x[i + 2] - x[i + 1], by = y[i + 2] - y[i + 1];
    const double cx = x[i + 2] - x[i], cy = y[i + 2] - y[i];
    const double la = std::sqrt(ax * ax + ay * ay);
    const double lb = std::sqrt(bx * bx + by * by);
    const double lc = std::sqrt(cx * cx + cy * cy);
    out.kappa[i] = 2.0 * (ax * by - ay * bx) / (la * lb * lc);
    out.edge[i] = lb;
  }
}

}  // namespace

const Table table{&gaussian_sum, &weighted_dot, &menger_curvature};

}  // namespace csflab::kernels::avx2
