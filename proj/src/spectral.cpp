#include "csflab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csflab/error.hpp"
#include "csflab/kernels.hpp"

namespace csflab {

std::size_t SpectralGrid::size() const {
  if (!(Y > 0.0 && h > 0.0)) throw Error(ErrorCode::GridMismatch, "grid needs Y > 0 and h > 0");
  const double m = 2.0 * Y / h;
  const auto intervals = static_cast<std::size_t>(std::llround(m));
  if (std::abs(m - static_cast<double>(intervals)) > 1e-9 * m || intervals % 2 != 0 || intervals < 2)
    throw Error(ErrorCode::GridMismatch, "2Y / h must be an even integer");
  return intervals + 1;
}

Sampled sample_function(const SpectralGrid& grid, const std::function<double(double)>& f) {
  Sampled s{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = f(grid.y(i));
  return s;
}

Sampled phi1(const SpectralGrid& g) {
  return sample_function(g, [](double) { return 1.0; });
}
Sampled phi2(const SpectralGrid& g) {
  return sample_function(g, [](double y) { return y / std::numbers::sqrt2; });
}
Sampled phi3(const SpectralGrid& g) {
  return sample_function(g, [](double y) { return (y * y - 2.0) / (2.0 * std::numbers::sqrt2); });
}

namespace {

std::vector<double> simpson_gauss_weights(const SpectralGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> w(n);
  const double c = g.h / 3.0 / std::sqrt(4.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double y = g.y(i);
    w[i] = c * s * std::exp(-0.25 * y * y);
  }
  return w;
}

const std::vector<double>& weights_for(const SpectralGrid& g) {
  thread_local SpectralGrid cached{-1.0, -1.0};
  thread_local std::vector<double> w;
  if (!(cached == g)) {
    w = simpson_gauss_weights(g);
    cached = g;
  }
  return w;
}

void require_same(const Sampled& f, const Sampled& g) {
  if (!(f.grid == g.grid) || f.v.size() != g.v.size())
    throw Error(ErrorCode::GridMismatch, "functions live on different grids");
}

}  // namespace

double inner_H(const Sampled& f, const Sampled& g) {
  require_same(f, g);
  const auto& w = weights_for(f.grid);
  if (w.size() != f.v.size()) throw Error(ErrorCode::GridMismatch, "sample count does not match the grid");
  return kernels::weighted_dot(w, f.v, g.v);
}

double norm_H(const Sampled& f) { return std::sqrt(std::max(inner_H(f, f), 0.0)); }

Sampled d_dy(const Sampled& f) {
  const std::size_t n = f.v.size();
  const double h = f.grid.h;
  Sampled d{f.grid, std::vector<double>(n)};
  for (std::size_t i = 1; i + 1 < n; ++i) d.v[i] = (f.v[i + 1] - f.v[i - 1]) / (2 * h);
  d.v[0] = (-3 * f.v[0] + 4 * f.v[1] - f.v[2]) / (2 * h);
  d.v[n - 1] = (3 * f.v[n - 1] - 4 * f.v[n - 2] + f.v[n - 3]) / (2 * h);
  return d;
}

Sampled L_apply(const Sampled& f) {
  const std::size_t n = f.v.size();
  const double h = f.grid.h;
  const Sampled fy = d_dy(f);
  Sampled out{f.grid, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double fyy;
    if (i == 0) fyy = (2 * f.v[0] - 5 * f.v[1] + 4 * f.v[2] - f.v[3]) / (h * h);
    else if (i + 1 == n) fyy = (2 * f.v[n - 1] - 5 * f.v[n - 2] + 4 * f.v[n - 3] - f.v[n - 4]) / (h * h);
    else fyy = (f.v[i + 1] - 2 * f.v[i] + f.v[i - 1]) / (h * h);
    out.v[i] = fyy - 0.5 * f.grid.y(i) * fy.v[i] + 0.5 * f.v[i];
  }
  return out;
}

double cutoff_eta(double s) {
  const double u = std::abs(s) - 1.0;
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_eta_d1(double s) {
  const double u = std::abs(s) - 1.0;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return -(s > 0 ? 1.0 : -1.0) * 30.0 * u * u * (1 - u) * (1 - u);
}

double cutoff_eta_d2(double s) {
  const double u = std::abs(s) - 1.0;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return -60.0 * u * (1 - u) * (1 - 2 * u);
}

std::vector<SheetProfile> extract_sheets(const DiscreteCurve& frame, std::size_t m, const SpectralGrid& grid,
                                         double r, double rotation) {
  if (m == 0 || !(r > 0.0)) throw Error(ErrorCode::OutOfDomain, "extract_sheets needs m >= 1 and r > 0");
  const DiscreteCurve c = rotation == 0.0 ? frame : rotated(frame, rotation);
  const FrameData f = compute_frame(c);
  const std::size_t n = grid.size();
  std::vector<SheetProfile> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i].tau = frame.time().value_or(0.0);
    out[i].sheet = i;
    out[i].grid = grid;
    out[i].r = r;
    out[i].u.assign(n, 0.0);
    out[i].u_y.assign(n, 0.0);
    out[i].u_yy.assign(n, 0.0);
  }
  const double reach = std::min(grid.Y, 2.0 * r);
  for (std::size_t j = 0; j < n; ++j) {
    const double y = grid.y(j);
    if (std::abs(y) > reach) continue;
    std::vector<GraphCrossing> x = horizontal_crossings(c, f, y);
    if (x.size() != m)
      throw Error(ErrorCode::SheetCountMismatch, "line y = " + std::to_string(y) + " meets the curve " +
                                                     std::to_string(x.size()) + " times, expected " +
                                                     std::to_string(m));
    std::reverse(x.begin(), x.end());
    for (std::size_t i = 0; i < m; ++i) {
      out[i].u[j] = x[i].x;
      out[i].u_y[j] = x[i].uy;
      out[i].u_yy[j] = x[i].uyy;
    }
  }
  return out;
}

SheetProfile profile_from(const SpectralGrid& grid, double r, double tau, const std::function<double(double)>& u,
                          const std::function<double(double)>& uy, const std::function<double(double)>& uyy) {
  SheetProfile p;
  p.tau = tau;
  p.grid = grid;
  p.r = r;
  p.u = sample_function(grid, u).v;
  p.u_y = sample_function(grid, uy).v;
  p.u_yy = sample_function(grid, uyy).v;
  return p;
}

namespace {
// L(u eta(y / r)) at one point
double cut_L(double u, double uy, double uyy, double y, double r) {
  const double z = y / r;
  const double e = cutoff_eta(z), e1 = cutoff_eta_d1(z), e2 = cutoff_eta_d2(z);
  const double uh_y = uy * e + u * e1 / r;
  const double uh_yy = uyy * e + 2 * uy * e1 / r + u * e2 / (r * r);
  return uh_yy - 0.5 * y * uh_y + 0.5 * u * e;
}
}  // namespace

Sampled cut_profile_L(const SheetProfile& p) {
  Sampled s{p.grid, std::vector<double>(p.u.size())};
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = cut_L(p.u[i], p.u_y[i], p.u_yy[i], p.grid.y(i), p.r);
  return s;
}

Sampled cut_profile(const SheetProfile& p) {
  Sampled s{p.grid, std::vector<double>(p.u.size())};
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = p.u[i] * cutoff_eta(p.grid.y(i) / p.r);
  return s;
}

Sampled cut_profile_dy(const SheetProfile& p) {
  Sampled s{p.grid, std::vector<double>(p.u.size())};
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    const double z = p.grid.y(i) / p.r;
    s.v[i] = p.u_y[i] * cutoff_eta(z) + p.u[i] * cutoff_eta_d1(z) / p.r;
  }
  return s;
}

SpectralProjection project(const SheetProfile& p) {
  const Sampled uh = cut_profile(p);
  const Sampled p1 = phi1(p.grid), p2 = phi2(p.grid);
  SpectralProjection r;
  r.a = inner_H(uh, p1);
  r.b = inner_H(uh, p2);
  Sampled minus = uh;
  for (std::size_t i = 0; i < minus.v.size(); ++i) minus.v[i] -= r.a * p1.v[i] + r.b * p2.v[i];
  r.stable_norm = norm_H(minus);
  r.grad_norm = norm_H(cut_profile_dy(p));
  r.total_norm = norm_H(uh);
  return r;
}

FlowError flow_error(const SheetProfile& p0, const SheetProfile& p1, double dtau) {
  if (!(p0.grid == p1.grid) || p0.r != p1.r || p0.u.size() != p1.u.size())
    throw Error(ErrorCode::GridMismatch, "profiles differ in grid or cutoff radius");
  if (!(dtau != 0.0)) throw Error(ErrorCode::OutOfDomain, "dtau must be nonzero");
  const SpectralGrid& g = p0.grid;
  const std::size_t n = p0.u.size();
  const double r = p0.r;
  FlowError fe;
  fe.E = {g, std::vector<double>(n)};
  Sampled split{g, std::vector<double>(n)}, grad{g, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double y = g.y(i), z = y / r;
    const double e = cutoff_eta(z), e1 = cutoff_eta_d1(z), e2 = cutoff_eta_d2(z);
    const double u = 0.5 * (p0.u[i] + p1.u[i]);
    const double uy = 0.5 * (p0.u_y[i] + p1.u_y[i]);
    const double uyy = 0.5 * (p0.u_yy[i] + p1.u_yy[i]);
    // L of the cut profile from the analytic derivatives (no second differencing of extracted data)
    const double uh_y = uy * e + u * e1 / r;
    const double uh_tau = (p1.u[i] - p0.u[i]) * e / dtau;
    fe.E.v[i] = uh_tau - cut_L(u, uy, uyy, y, r);
    grad.v[i] = uh_y;
    const double q = 1 + uy * uy;
    const double E1 = -uh_y * uh_y * uyy / q;
    const double E2 = -e2 * u / (r * r) - 2 * e1 * uy / r + y * e1 * u / (2 * r) +
                      uyy / q * (e * (e - 1) * uy * uy + 2 * e * e1 * u * uy / r + e1 * e1 * u * u / (r * r));
    split.v[i] = std::abs(E1) + std::abs(E2);
  }
  fe.norm = norm_H(fe.E);
  fe.unstable = std::abs(inner_H(fe.E, phi1(g)));
  fe.neutral = std::abs(inner_H(fe.E, phi2(g)));
  fe.split_norm = norm_H(split);
  fe.grad_sq = inner_H(grad, grad);
  fe.tail = std::pow(r, -1.5) * std::exp(-r * r / 8.0);
  fe.fitted_K = (fe.unstable + fe.neutral) / (fe.grad_sq + fe.tail);
  return fe;
}

double rotation_refine(const std::vector<SheetProfile>& sheets) {
  if (sheets.empty()) return 0.0;
  return std::atan(project(sheets.front()).b / std::numbers::sqrt2);
}

double c2_norm(const SheetProfile& p, double R) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    if (std::abs(p.grid.y(i)) > R) continue;
    m = std::max({m, std::abs(p.u[i]), std::abs(p.u_y[i]), std::abs(p.u_yy[i])});
  }
  return m;
}

DecayFit decay_fit(const std::vector<double>& tau, const std::vector<double>& value) {
  if (tau.size() != value.size() || tau.size() < 6)
    throw Error(ErrorCode::OutOfDomain, "decay_fit needs at least 6 (tau, value) pairs");
  const std::size_t n = tau.size();
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(value[i] > 0.0)) throw Error(ErrorCode::NonPositiveValue, "value " + std::to_string(value[i]) + " at tau " + std::to_string(tau[i]));
    ly[i] = std::log(value[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += tau[i], my += ly[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (tau[i] - mx) * (tau[i] - mx);
    sxy += (tau[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::OutOfDomain, "decay_fit needs distinct tau values");
  DecayFit f;
  f.rate = sxy / sxx;
  f.intercept = my - f.rate * mx;
  // a constant series is fitted exactly
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace csflab
