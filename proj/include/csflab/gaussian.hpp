#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "csflab/flow.hpp"
#include "csflab/geometry.hpp"
#include "csflab/kernels.hpp"

namespace csflab {

enum class DensityKind { F, Entropy, Theta, ThetaLocalized };
std::string_view to_string(DensityKind k);

struct DensityReport {
  DensityKind kind = DensityKind::F;
  Vec2 center{};
  double scale = 0.0;  // lambda for F / entropy, r or sigma for the density ratios
  double value = 0.0;
  std::optional<double> cutoff;  // R for the localized ratio
  bool truncated = false;        // open curve: the supremum is taken over a clipped curve
};

// (4 pi lambda)^{-1/2} * integral of exp(-|x - x0|^2 / (4 lambda)) ds over the
// polyline. Midpoint rule with global level doubling and Richardson
// extrapolation until the relative change is below 1e-8; edges whose Gaussian
// weight is below e^{-40} everywhere are skipped.
double gaussian_length(const DiscreteCurve& curve, Vec2 x0, double lambda);

// Same quadrature with the weight multiplied by the cubic cutoff
// (1 - (|x - x0|^2 - shift) / R^2)_+^3.
double gaussian_length_cutoff(const DiscreteCurve& curve, Vec2 x0, double lambda, double R,
                              double shift);

struct EntropySearch {
  std::size_t grid = 21;  // per axis: lambda, cx, cy
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  std::size_t refine_starts = 5;
  int max_iterations = 400;
  double tolerance = 1e-11;  // simplex spread in F
};

// sup over (x0, lambda) of gaussian_length: log grid plus Nelder-Mead in
// (cx, cy, log lambda) from the best grid cells.
DensityReport entropy(const DiscreteCurve& curve, const EntropySearch& search = {});

// Gaussian density ratio at the spacetime point (x0, t0) and scale r, read
// from the frame at t0 - r^2 (values of neighbouring frames are linearly
// interpolated in time). Throws Error(OutOfWindow) when t0 - r^2 is not
// covered by the trajectory.
double theta(const FlowTrajectory& traj, Vec2 x0, double t0, double r);

// Localized ratio with cutoff psi = (1 - (|x - xbar|^2 - 2 (tbar - t)) / R^2)_+^3
// at scale sigma. Throws Error(NotProper) if an end point of the curve lies
// in the support of psi on any frame in [tbar - sigma^2, tbar].
double theta_localized(const FlowTrajectory& traj, Vec2 xbar, double tbar, double R, double sigma);

struct MonotonicityReport {
  std::vector<double> tau;
  std::vector<double> F;  // F(curve; 0, 1)
  double max_jump = 0.0;  // largest F[k + 1] - F[k] (0 if never increasing)
  std::size_t jump_index = 0;
  bool passed = true;     // max_jump <= tolerance
};
MonotonicityReport monotonicity_report(const FlowTrajectory& traj, double tolerance);

struct LemmaA1Result {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double d0 = 0.0;  // min |x| over the curve
  bool inside = false;
};

// value = (4 pi)^{-1/2} * integral of (1 - a^2 (|x|^2 - 2))_+^3 e^{-|x|^2/4} ds,
//   upper = 1 + C a^2 + C b,
//   lower = 1 - C d0^2 - C a - C b - C exp(-r / 4).
// Hypotheses (else Error(HypothesisViolated)): 0 <= a, b < delta, r > 1/delta,
// |kappa| <= b / r on the curve, curve end points on the circle |x| = r.
LemmaA1Result lemma_a1_check(double a, double b, double r, const DiscreteCurve& curve,
                             double C = 10.0, double delta = 0.05);

}  // namespace csflab
