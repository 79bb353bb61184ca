#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "csflab/geometry.hpp"

namespace csflab {

// Uniform grid y_i = -Y + i h, i = 0..n-1, with an even number of intervals.
struct SpectralGrid {
  double Y = 12.0;
  double h = 0.01;

  std::size_t size() const;
  double y(std::size_t i) const { return -Y + static_cast<double>(i) * h; }
  bool operator==(const SpectralGrid& o) const { return Y == o.Y && h == o.h; }
};

struct Sampled {
  SpectralGrid grid;
  std::vector<double> v;
};

Sampled sample_function(const SpectralGrid& grid, const std::function<double(double)>& f);

// Hermite modes normalised in H: phi1 = 1, phi2 = y / sqrt2, phi3 = 2^{-3/2} (y^2 - 2).
Sampled phi1(const SpectralGrid& g);
Sampled phi2(const SpectralGrid& g);
Sampled phi3(const SpectralGrid& g);

// <f, g>_H = integral of f g (4 pi)^{-1/2} e^{-y^2/4} dy, composite Simpson.
// Throws Error(GridMismatch) if the grids differ.
double inner_H(const Sampled& f, const Sampled& g);
double norm_H(const Sampled& f);

// d/dy by centred differences, second-order one-sided at the ends.
Sampled d_dy(const Sampled& f);

// L f = f_yy - y f_y / 2 + f / 2.
Sampled L_apply(const Sampled& f);

// 1 on |s| <= 1, 0 on |s| >= 2, quintic smoothstep in between.
double cutoff_eta(double s);
double cutoff_eta_d1(double s);
double cutoff_eta_d2(double s);

struct SheetProfile {
  double tau = 0.0;
  std::size_t sheet = 0;  // 0 = largest x
  SpectralGrid grid;
  std::vector<double> u, u_y, u_yy;  // zero where |y| > min(Y, 2r)
  double r = 4.0;
};

// Sheets of a rescaled frame as graphs x = u^i(y) (after rotating by
// `rotation`), ordered u^0 > u^1 > ... Only |y| <= min(Y, 2r) is sampled,
// which is where the cutoff eta(y/r) is nonzero.
// Throws Error(SheetCountMismatch) where a grid line does not meet the curve m times.
std::vector<SheetProfile> extract_sheets(const DiscreteCurve& frame, std::size_t m, const SpectralGrid& grid,
                                         double r, double rotation = 0.0);

// Profile built from closed-form u, u_y, u_yy (tests and synthetic inputs).
SheetProfile profile_from(const SpectralGrid& grid, double r, double tau, const std::function<double(double)>& u,
                          const std::function<double(double)>& uy, const std::function<double(double)>& uyy);

// u-hat = u eta(y/r) and its first two y-derivatives.
Sampled cut_profile(const SheetProfile& p);
Sampled cut_profile_dy(const SheetProfile& p);
// L u-hat from the profile's own derivatives, without differencing.
Sampled cut_profile_L(const SheetProfile& p);

struct SpectralProjection {
  double a = 0.0;            // <u-hat, phi1>
  double b = 0.0;            // <u-hat, phi2>
  double stable_norm = 0.0;  // |P_- u-hat|
  double grad_norm = 0.0;    // |u-hat_y|
  double total_norm = 0.0;   // |u-hat|
};
SpectralProjection project(const SheetProfile& p);

struct FlowError {
  Sampled E;                // (u-hat_next - u-hat) / dtau - L u-hat_mid
  double norm = 0.0;
  double unstable = 0.0;    // |P_+ E|
  double neutral = 0.0;     // |P_0 E|
  double split_norm = 0.0;  // | |E1| + |E2| | from the analytic split at the midpoint
  double grad_sq = 0.0;     // |u-hat_y|^2 at the midpoint
  double tail = 0.0;        // r^{-3/2} e^{-r^2/8}
  double fitted_K = 0.0;    // (unstable + neutral) / (grad_sq + tail)
};
// Throws Error(GridMismatch) unless both profiles share the grid and r.
FlowError flow_error(const SheetProfile& p0, const SheetProfile& p1, double dtau);

// theta = arctan(b / sqrt2) of the top sheet; extracting again with
// rotation = theta removes the neutral tilt.
double rotation_refine(const std::vector<SheetProfile>& sheets);

// max over |y| <= R of max(|u|, |u_y|, |u_yy|).
double c2_norm(const SheetProfile& p, double R = 3.0);

struct DecayFit {
  double rate = 0.0;  // slope of log(value) against tau
  double intercept = 0.0;
  double r2 = 0.0;
};
// Throws Error(NonPositiveValue) on a value <= 0, Error(OutOfDomain) on < 6 samples.
DecayFit decay_fit(const std::vector<double>& tau, const std::vector<double>& value);

}  // namespace csflab
