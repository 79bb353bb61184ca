#pragma once

#include <cstddef>
#include <string_view>

#include "csflab/geometry.hpp"

namespace csflab {

enum class FamilyKind { Circle, Line, GrimReaper, PaperClip };

// Closed-form CSF solutions.
//   circle      radius sqrt(-2t), extinct at t = 0
//   line        static; direction `angle`, signed offset along its normal,
//               sampled on a segment of half-length `half_length`
//   grim_reaper y = t - log cos x on |x| <= window (< pi/2), open
//   paper_clip  cos x = e^t cosh y, t < 0; long axis vertical, tips at
//               (0, +-arccosh(e^-t)), knuckles at (+-arccos(e^t), 0)
struct ExactFamily {
  FamilyKind kind = FamilyKind::Circle;
  double angle = 0.0;
  double offset = 0.0;
  double half_length = 50.0;
  double window = 1.2;

  static ExactFamily circle() { return {FamilyKind::Circle}; }
  static ExactFamily line(double angle = 0.0, double offset = 0.0, double half_length = 50.0) {
    return {FamilyKind::Line, angle, offset, half_length};
  }
  static ExactFamily grim_reaper(double window = 1.2) {
    ExactFamily f{FamilyKind::GrimReaper};
    f.window = window;
    return f;
  }
  static ExactFamily paper_clip() { return {FamilyKind::PaperClip}; }
};

std::string_view to_string(FamilyKind k);
// Throws Error(InvalidCurve) on an unknown name.
FamilyKind family_from_string(std::string_view name);

// Throws Error(OutOfDomain) when t is outside the family's time domain.
void check_domain(const ExactFamily& family, double t);

// n points uniformly spaced in arc length on the exact curve at time t.
// Closed paper clips with n divisible by 4 place points on both tips and both
// knuckles; grim reapers with odd n place a point on the tip.
DiscreteCurve sample(const ExactFamily& family, double t, std::size_t n);

// Curvature-adapted spacing (same rule as resample_adaptive, but computed
// from the exact curvature). Spacing lengths are in the curve's own units.
DiscreteCurve sample_adaptive(const ExactFamily& family, double t, const AdaptiveSpacing& spacing);

// Rescaled frame at tau: the time -e^{-tau} curve scaled by e^{tau/2}; the
// returned curve carries time tau. Spacing lengths are in rescaled units.
DiscreteCurve sample_rescaled(const ExactFamily& family, double tau, std::size_t n);
DiscreteCurve sample_rescaled_adaptive(const ExactFamily& family, double tau,
                                       const AdaptiveSpacing& spacing);

// Exact signed curvature at a point of the locus at time t (the point is
// assumed to lie on it). Positive toward the inside / concave side.
double exact_curvature(const ExactFamily& family, double t, Vec2 p);

// Implicit description G(p, t) = 0 of the locus and its spatial gradient.
double implicit_value(const ExactFamily& family, double t, Vec2 p);
Vec2 implicit_gradient(const ExactFamily& family, double t, Vec2 p);

// max_i |v_n - kappa| where v_n is the normal displacement rate of sample(t)
// onto the exact locus at t + dt, and kappa the discrete curvature.
double flow_residual(const ExactFamily& family, double t, double dt, std::size_t n);

}  // namespace csflab
