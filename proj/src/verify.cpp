#include "csflab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "csflab/asymptotics.hpp"
#include "csflab/critical.hpp"
#include "csflab/error.hpp"
#include "csflab/exact.hpp"
#include "csflab/flow.hpp"
#include "csflab/gaussian.hpp"
#include "csflab/parallel.hpp"
#include "csflab/spectral.hpp"

namespace csflab {

namespace {

constexpr double kPi = std::numbers::pi;

VerifyCheck make(std::string name, double m, double e, double tol, Relation rel) {
  VerifyCheck c{std::move(name), m, e, tol, rel, false};
  switch (rel) {
    case Relation::Near: c.pass = std::abs(m - e) <= tol; break;
    case Relation::AtMost: c.pass = m <= e; break;
    case Relation::AtLeast: c.pass = m >= e; break;
    case Relation::Below: c.pass = m < e; break;
    case Relation::Above: c.pass = m > e; break;
    case Relation::Holds: c.pass = m == 1.0; break;
  }
  if (!std::isfinite(m)) c.pass = false;
  return c;
}

VerifyCheck near(std::string n, double m, double e, double tol) { return make(std::move(n), m, e, tol, Relation::Near); }
VerifyCheck at_most(std::string n, double m, double bound) { return make(std::move(n), m, bound, 0.0, Relation::AtMost); }
VerifyCheck at_least(std::string n, double m, double bound) { return make(std::move(n), m, bound, 0.0, Relation::AtLeast); }
VerifyCheck below(std::string n, double m, double bound) { return make(std::move(n), m, bound, 0.0, Relation::Below); }
VerifyCheck above(std::string n, double m, double bound) { return make(std::move(n), m, bound, 0.0, Relation::Above); }
VerifyCheck holds(std::string n, bool b) { return make(std::move(n), b ? 1.0 : 0.0, 1.0, 0.0, Relation::Holds); }

using Checks = std::vector<VerifyCheck>;

std::vector<double> grid_times(double from, double to, double step) {
  std::vector<double> t;
  const auto k = static_cast<int>(std::llround((to - from) / step));
  for (int i = 0; i <= k; ++i) t.push_back(from + step * i);
  return t;
}

FlowTrajectory physical_frames(const ExactFamily& fam, const std::vector<double>& times, std::size_t n) {
  FlowTrajectory tr;
  tr.mode = FlowMode::Physical;
  for (double t : times) tr.frames.push_back({sample(fam, t, n).with_time(t), t, FlowMode::Physical});
  return tr;
}

// Exact rescaled paper clip frames, curvature-adapted.
AdaptiveSpacing clip_spacing() {
  AdaptiveSpacing s;
  s.c = 0.03;
  s.h_max = 0.1;
  return s;
}

FlowTrajectory rescaled_clip(const std::vector<double>& taus) {
  FlowTrajectory tr;
  tr.mode = FlowMode::Rescaled;
  for (double tau : taus)
    tr.frames.push_back({sample_rescaled_adaptive(ExactFamily::paper_clip(), tau, clip_spacing()), tau,
                         FlowMode::Rescaled});
  return tr;
}

// Largest rise of a sequence read in order (0 if non-increasing).
double max_rise(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i] - v[i - 1]);
  return worst;
}

template <class F>
bool throws_code(ErrorCode code, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

Checks criterion_1() {
  Checks out;
  EvolveControls ec;
  ec.dt_max = 1e-4;
  ec.step.n = 512;
  ec.save_interval = 0.05;
  const auto circle = evolve({sample(ExactFamily::circle(), -0.5, 512), -0.5, FlowMode::Physical}, 0.45, ec, false);
  double err = 0.0;
  for (const FlowState& f : circle.frames) {
    const double r = std::sqrt(-2.0 * f.time);
    for (const Vec2& p : f.curve.points()) err = std::max(err, std::abs(norm(p) - r) / r);
  }
  out.push_back(below("circle max relative radius error, t in [-0.5, -0.05]", err, 1e-3));

  const auto clip = evolve({sample(ExactFamily::paper_clip(), -5, 512), -5, FlowMode::Physical}, 1.0, ec, false);
  const double h = hausdorff_distance(clip.frames.back().curve, sample(ExactFamily::paper_clip(), -4, 4096));
  out.push_back(below("paper clip Hausdorff distance to exact at t = -4", h, 5e-3));
  return out;
}

Checks criterion_2() {
  const double circle_value = std::sqrt(2 * kPi / std::exp(1.0));
  return {
      near("entropy of a length-100 line", entropy(sample(ExactFamily::line(0, 0, 50), 0, 1001)).value, 1.0, 1e-2),
      near("entropy of a circle", entropy(sample(ExactFamily::circle(), -1, 512)).value, circle_value, 5e-3),
      near("entropy of the rescaled paper clip at tau = -8",
           entropy(sample_rescaled(ExactFamily::paper_clip(), -8, 512)).value, 2.0, 5e-2),
  };
}

Checks criterion_3() {
  Checks out;
  AdaptiveSpacing sp;  // defaults: c = 0.15, h in [1e-4, 0.25]
  EvolveControls ec;
  ec.dt_max = 1e-2;
  ec.step.adaptive = true;
  ec.step.spacing = sp;
  ec.step.remesh_every = 10;
  ec.save_interval = 0.05;
  const auto tr = evolve({sample_rescaled_adaptive(ExactFamily::paper_clip(), -8, sp), -8, FlowMode::Rescaled},
                         4.0, ec, false);
  const auto mono = monotonicity_report(tr, 1e-4);
  out.push_back(near("simulation reached tau = -4", tr.frames.back().time, -4.0, 1e-9));
  out.push_back(at_most("F(0,1) largest rise along the simulated rescaled clip", mono.max_jump, 1e-4));

  const auto circle = physical_frames(ExactFamily::circle(), grid_times(-0.5, -0.05, 0.005), 512);
  std::vector<double> regular, extinction;
  for (double r : grid_times(0.02, 0.66, 0.02)) regular.push_back(theta(circle, {std::sqrt(0.1), 0.0}, -0.05, r));
  for (double r : grid_times(0.24, 0.70, 0.02)) extinction.push_back(theta(circle, {0.0, 0.0}, 0.0, r));
  auto largest_drop = [](const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i - 1] - v[i]);
    return worst;
  };
  out.push_back(at_most("theta drop as r grows, regular point of the circle", largest_drop(regular), 1e-5));
  out.push_back(at_most("theta drop as r grows, extinction point of the circle", largest_drop(extinction), 1e-5));
  return out;
}

Checks criterion_4() {
  const auto tr = rescaled_clip(grid_times(-8, -5, 0.1));
  std::size_t bad_knuckles = 0, bad_tips = 0, bad_sharp = 0, bad_flat_infl = 0, not_bumpy = 0;
  for (const FlowState& f : tr.frames) {
    const auto cr = detect_critical(distance_profile(f.curve, {}));
    const auto vr = detect_vertices(f.curve);
    bad_knuckles += cr.knuckles.size() != 2;
    bad_tips += cr.tips.size() != 2;
    bad_sharp += vr.sharp.size() != 2;
    bad_flat_infl += vr.flat.size() + vr.inflections.size() != 2;
    not_bumpy += !vr.bumpy;
  }
  const double frames = static_cast<double>(tr.frames.size());
  return {
      near("frames checked, tau in [-8, -5]", frames, 31, 0),
      at_most("frames with knuckles != 2", bad_knuckles, 0),
      at_most("frames with tips != 2", bad_tips, 0),
      at_most("frames with sharp vertices != 2", bad_sharp, 0),
      at_most("frames with flat vertices + inflections != 2", bad_flat_infl, 0),
      at_most("frames that are not bumpy", not_bumpy, 0),
  };
}

Checks criterion_5() {
  const auto tr = rescaled_clip(grid_times(-8, -5, 0.1));
  const auto paths = track_paths(tr, PathKind::SharpVertex);
  Checks out;
  std::size_t full = 0;
  double min_chi = INFINITY;
  bool monotone = true;
  for (const CriticalPath& p : paths.paths) {
    if (p.birth != 0 || p.death != tr.frames.size()) continue;
    ++full;
    const auto rep = vertex_ode_check(tr, p);
    min_chi = std::min(min_chi, rep.min_abs_chi);
    monotone = monotone && rep.monotone_in_minus_tau;
  }
  out.push_back(near("sharp-vertex paths spanning the window", full, 2, 0));
  out.push_back(at_least("min |chi| along the paths", min_chi, 1 / std::sqrt(2.0) - 0.02));
  out.push_back(holds("|chi| non-decreasing in -tau", monotone));
  return out;
}

Checks criterion_6() {
  auto fit = [](double t) {
    const auto tr = physical_frames(ExactFamily::paper_clip(), grid_times(t - 4, t, 0.5), 16384);
    const DiscreteCurve& c = tr.frames.back().curve;
    const auto v = detect_vertices(c);
    if (v.sharp.empty()) throw Error(ErrorCode::DegenerateVertexSet, "no sharp vertex on the paper clip");
    const double k = std::abs(curvature(c)[v.sharp.front()]);
    return grim_fit(tr, {tr.frames.size() - 1, v.sharp.front()}, 1.0 / k).c2_distance;
  };
  const double d8 = fit(-8), d10 = fit(-10), d5 = fit(-5);
  return {
      below("grim reaper C2 distance at t = -8", d8, 0.05),
      below("C2 distance at t = -10 minus that at t = -5", d10 - d5, 0.0),
  };
}

Checks criterion_7() {
  const auto c = sample_rescaled_adaptive(ExactFamily::paper_clip(), -8, clip_spacing());
  const auto cr = detect_critical(distance_profile(c, {}));
  Checks out;
  out.push_back(near("fingers at tau = -8", cr.fingers.size(), 2, 0));
  for (std::size_t i = 0; i < cr.fingers.size(); ++i) {
    const double a = turning_angle(c, cr.fingers[i].knuckle_a, cr.fingers[i].knuckle_b);
    out.push_back(near("knuckle-to-knuckle turning across finger " + std::to_string(i), std::abs(a), kPi, 0.05));
  }
  return out;
}

Checks criterion_8() {
  std::vector<double> dev;
  double area8 = NAN;
  for (double tau : {-8.0, -7.0, -6.0, -5.0}) {
    const auto c = sample_rescaled(ExactFamily::paper_clip(), tau, 512);
    const auto cr = detect_critical(distance_profile(c, {}));
    if (cr.fingers.empty()) throw Error(ErrorCode::DegenerateProfile, "no finger on the paper clip");
    double worst = 0.0;
    for (const Finger& f : cr.fingers) {
      const double a = finger_region_area(c, f);
      if (tau == -8.0 && std::isnan(area8)) area8 = a;
      worst = std::max(worst, std::abs(a - kPi));
    }
    dev.push_back(worst);
  }
  std::size_t rises = 0;
  for (std::size_t i = 1; i < dev.size(); ++i) rises += !(dev[i] < dev[i - 1]);
  return {
      near("finger area at tau = -8", area8, kPi, 0.15),
      at_most("steps where |A - pi| fails to decrease, tau = -8, -7, -6, -5", rises, 0),
  };
}

Checks criterion_9() {
  std::vector<Vec2> pts;
  const std::size_t n = 256;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2 * kPi * i / n;
    const double r = 1.0 + 0.08 * std::cos(3 * a) + 0.03 * std::sin(5 * a);
    pts.push_back({r * std::cos(a), r * std::sin(a)});
  }
  EvolveControls ec;
  ec.dt_max = 1e-4;
  ec.step.n = n;
  ec.save_interval = 0.01;
  const auto tr = evolve({DiscreteCurve(pts, true), 0.0, FlowMode::Physical}, 0.3, ec, false);
  const auto zm = zero_monotonicity_check(tr, ZeroField::KappaS);

  std::vector<double> u0;
  for (int i = 0; i < 400; ++i) {
    const double x = 2 * kPi * (i + 0.5) / 400;
    u0.push_back(std::sin(x) + std::sin(2 * x));
  }
  const auto heat = heat_zero_counts(u0, 1.0, 11);
  std::vector<double> hc(heat.begin(), heat.end());
  return {
      at_most("kappa_s zero-count increases along the perturbed circle", zm.violations.size(), 0),
      above("kappa_s zeros on the first frame", zm.counts.front(), 0),
      at_most("heat-flow zero-count increases", max_rise(hc), 0),
      near("heat-flow zeros at t = 0", hc.front(), 4, 0),
      near("heat-flow zeros at t = 1", hc.back(), 2, 0),
  };
}

Checks criterion_10() {
  std::size_t failures = 0;
  double first = NAN, last = NAN;
  for (double tau : grid_times(-8, -5, 0.5)) {
    const auto r = graphical_radius(sample_rescaled(ExactFamily::paper_clip(), tau, 2048), 0.0, 0.05, 2);
    failures += !r.passed();
    if (std::isnan(first)) first = r.rho_hat;
    last = r.rho_hat;
  }
  return {
      at_most("frames violating a graph bound, tau in [-8, -5]", failures, 0),
      above("rho_hat(-8) - rho_hat(-5)", first - last, 0.0),
  };
}

Checks criterion_11(std::uint64_t seed) {
  const SpectralGrid g;
  const Sampled p[3] = {phi1(g), phi2(g), phi3(g)};
  const double lam[3] = {0.5, 0.0, -0.5};
  Checks out;

  double eig = 0.0, ortho = 0.0;
  for (int i = 0; i < 3; ++i) {
    Sampled r = L_apply(p[i]);
    for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] -= lam[i] * p[i].v[k];
    eig = std::max(eig, norm_H(r));
    for (int j = 0; j < 3; ++j) ortho = std::max(ortho, std::abs(inner_H(p[i], p[j]) - (i == j ? 1.0 : 0.0)));
  }
  out.push_back(below("eigen-residual max over phi1, phi2, phi3", eig, 1e-5));
  out.push_back(at_most("orthonormality defect", ortho, 1e-8));

  const auto line = project(profile_from(
      g, 100.0, 0.0, [](double y) { return 3 + y; }, [](double) { return 1.0; }, [](double) { return 0.0; }));
  out.push_back(near("projection a of 3 + y", line.a, 3.0, 1e-6));
  out.push_back(near("projection b of 3 + y", line.b, std::sqrt(2.0), 1e-6));

  // Random polynomials of degree <= 6 times eta(y / 5), scaled to unit H norm.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double parseval = 0.0, ibp = 0.0, gap = -INFINITY;
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 7> c{};
    for (double& x : c) x = coef(rng);
    auto poly = [c](double y, int d) {
      double s = 0.0;
      for (int k = 6; k >= d; --k) {
        double f = 1.0;
        for (int m = 0; m < d; ++m) f *= k - m;
        s += c[k] * f * std::pow(y, k - d);
      }
      return s;
    };
    auto prof = profile_from(
        g, 5.0, 0.0, [&](double y) { return poly(y, 0); }, [&](double y) { return poly(y, 1); },
        [&](double y) { return poly(y, 2); });
    const double unit = 1.0 / norm_H(cut_profile(prof));
    for (auto* v : {&prof.u, &prof.u_y, &prof.u_yy})
      for (double& x : *v) x *= unit;
    const auto pr = project(prof);
    parseval = std::max(parseval, std::abs(pr.a * pr.a + pr.b * pr.b + pr.stable_norm * pr.stable_norm -
                                           pr.total_norm * pr.total_norm));

    const Sampled f = cut_profile(prof);
    const double fy = norm_H(cut_profile_dy(prof));
    const Sampled Lf = cut_profile_L(prof);
    ibp = std::max(ibp, std::abs(inner_H(f, Lf) - (0.5 * inner_H(f, f) - fy * fy)));

    Sampled minus = f;
    for (std::size_t k = 0; k < minus.v.size(); ++k) minus.v[k] -= pr.a * p[0].v[k] + pr.b * p[1].v[k];
    const double m2 = inner_H(minus, minus);
    // L phi1 = phi1 / 2, L phi2 = 0
    Sampled Lminus = Lf;
    for (std::size_t k = 0; k < Lminus.v.size(); ++k) Lminus.v[k] -= 0.5 * pr.a * p[0].v[k];
    gap = std::max(gap, inner_H(minus, Lminus) + 0.5 * m2);
  }
  out.push_back(at_most("Parseval defect over 20 random profiles", parseval, 1e-8));
  out.push_back(at_most("integration-by-parts defect", ibp, 1e-6));
  out.push_back(at_most("spectral gap: <P-f, L P-f> + |P-f|^2 / 2", gap, 1e-6));
  return out;
}

Checks criterion_12() {
  const SpectralGrid g;
  std::vector<double> taus, vals;
  for (double tau : grid_times(-9, -5, 0.5)) {
    const auto sheets = extract_sheets(sample_rescaled(ExactFamily::paper_clip(), tau, 2048), 2, g, 4.0);
    double v = 0.0;
    for (const auto& s : sheets) v = std::max(v, c2_norm(s, 3.0));
    taus.push_back(tau);
    vals.push_back(v);
  }
  const auto fit = decay_fit(taus, vals);
  return {above("fitted rate of max sheet C2(B3) norm", fit.rate, 0.0), above("fit r^2", fit.r2, 0.95)};
}

DiscreteCurve circle_arc_through_origin(double radius, double r, std::size_t n) {
  // circle centred at (0, radius) cut by |x| = r
  const double phi = std::acos(1 - r * r / (2 * radius * radius));
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -phi + 2 * phi * i / (n - 1);
    pts.push_back({radius * std::sin(a), radius * (1 - std::cos(a))});
  }
  return DiscreteCurve(pts, false);
}

DiscreteCurve chord(double d0, double r, std::size_t n) {
  const double half = std::sqrt(r * r - d0 * d0);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({-half + 2 * half * i / (n - 1), d0});
  return DiscreteCurve(pts, false);
}

Checks criterion_13() {
  Checks out;
  const auto diameter = lemma_a1_check(0.01, 0.0, 100.0, chord(0.0, 100.0, 2001));
  out.push_back(near("diameter line, value", diameter.value, 1.0, 1e-4));
  out.push_back(holds("diameter line inside the sandwich", diameter.inside));
  const auto arc = lemma_a1_check(0.01, 0.01, 100.0, circle_arc_through_origin(1e4, 100.0, 2001));
  out.push_back(holds("arc with |kappa| = b / r inside the sandwich", arc.inside));
  const auto shifted = lemma_a1_check(0.01, 0.0, 100.0, chord(0.05, 100.0, 2001));
  out.push_back(holds("chord at distance 0.05 inside the sandwich", shifted.inside));
  out.push_back(at_most("chord at distance 0.05, value", shifted.value, 1.0));

  auto rise_with_sigma = [](const FlowTrajectory& tr, Vec2 x, double t, double R, const std::vector<double>& sig) {
    // value(s1) <= value(s2) + slack for s1 < s2: report the largest drop as sigma grows
    double worst = 0.0, prev = NAN;
    for (double s : sig) {
      const double v = theta_localized(tr, x, t, R, s);
      if (!std::isnan(prev)) worst = std::max(worst, prev - v);
      prev = v;
    }
    return worst;
  };
  FlowTrajectory line;
  line.mode = FlowMode::Physical;
  const auto seg = sample(ExactFamily::line(0, 0, 100), 0, 2001);
  for (double t : grid_times(-2, 0, 0.05)) line.frames.push_back({seg.with_time(t), t, FlowMode::Physical});
  out.push_back(at_most("localized ratio drop as sigma grows, static line",
                        rise_with_sigma(line, {}, 0.0, 10.0, grid_times(0.1, 1.4, 0.1)), 1e-6));
  const auto circle = physical_frames(ExactFamily::circle(), grid_times(-1, -0.05, 0.01), 512);
  out.push_back(at_most("localized ratio drop as sigma grows, shrinking circle",
                        rise_with_sigma(circle, {std::sqrt(0.1), 0.0}, -0.05, 1.0, grid_times(0.05, 0.95, 0.05)),
                        1e-6));
  return out;
}

Checks criterion_14() {
  // an open polyline whose third leg crosses the first at the origin
  std::vector<Vec2> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back({-1 + 0.2 * i, -1 + 0.2 * i});
  for (int i = 1; i <= 10; ++i) pts.push_back({1.0, 1 - 0.2 * i});
  for (int i = 1; i <= 10; ++i) pts.push_back({1 - 0.2 * i, -1 + 0.2 * i});
  const DiscreteCurve crossing(pts, false);
  const bool rejected = throws_code(ErrorCode::InvalidCurve, [&] {
    evolve({crossing, 0.0, FlowMode::Physical}, 0.01, EvolveControls{}, false);
  });
  const auto circle = sample(ExactFamily::circle(), -0.5, 512);
  const auto rel = tip_relations_check(circle, 0, 0.5);
  return {
      holds("crossing lines detected as self-intersecting", self_intersects(crossing)),
      holds("crossing lines rejected by evolve", rejected),
      holds("circle rejected by the vertex detector",
            throws_code(ErrorCode::DegenerateVertexSet, [&] { detect_vertices(circle); })),
      above("tip relations on a circle with lambda = 0.5, max residual", std::max({rel.r0, rel.r1, rel.r2}), 0.1),
  };
}

}  // namespace

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Near: return "near";
    case Relation::AtMost: return "at_most";
    case Relation::AtLeast: return "at_least";
    case Relation::Below: return "below";
    case Relation::Above: return "above";
    case Relation::Holds: return "holds";
  }
  return "?";
}

static Relation relation_from_string(const std::string& s) {
  for (Relation r : {Relation::Near, Relation::AtMost, Relation::AtLeast, Relation::Below, Relation::Above,
                     Relation::Holds})
    if (to_string(r) == s) return r;
  throw Error(ErrorCode::Io, "unknown relation " + s);
}

std::string criterion_title(int id) {
  static const char* titles[kCriterionCount] = {
      "exact-flow reproduction",
      "entropy values",
      "monotonicity",
      "critical point and vertex counts",
      "vertex curvature bounds",
      "grim reaper asymptotics",
      "knuckle angle difference",
      "finger area",
      "zero counts",
      "graphical radius",
      "spectral identities",
      "decay",
      "localized density",
      "negative controls",
  };
  if (id < 1 || id > kCriterionCount) throw Error(ErrorCode::OutOfDomain, "no criterion " + std::to_string(id));
  return titles[id - 1];
}

VerifyOutcome run_criterion(int id, std::uint64_t seed) {
  VerifyOutcome o;
  o.id = id;
  o.title = criterion_title(id);
  try {
    switch (id) {
      case 1: o.checks = criterion_1(); break;
      case 2: o.checks = criterion_2(); break;
      case 3: o.checks = criterion_3(); break;
      case 4: o.checks = criterion_4(); break;
      case 5: o.checks = criterion_5(); break;
      case 6: o.checks = criterion_6(); break;
      case 7: o.checks = criterion_7(); break;
      case 8: o.checks = criterion_8(); break;
      case 9: o.checks = criterion_9(); break;
      case 10: o.checks = criterion_10(); break;
      case 11: o.checks = criterion_11(seed); break;
      case 12: o.checks = criterion_12(); break;
      case 13: o.checks = criterion_13(); break;
      case 14: o.checks = criterion_14(); break;
    }
  } catch (const Error& e) {
    o.error = e.what();
  }
  o.pass = o.error.empty() && !o.checks.empty() &&
           std::all_of(o.checks.begin(), o.checks.end(), [](const VerifyCheck& c) { return c.pass; });
  return o;
}

VerifyReport run_verify(const VerifyOptions& opt) {
  std::vector<int> ids = opt.ids;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  for (int id : ids) criterion_title(id);
  VerifyReport rep;
  rep.outcomes.resize(ids.size());
  parallel_for(ids.size(), [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    rep.outcomes[i] = run_criterion(ids[i], opt.seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.on_done) opt.on_done(rep.outcomes[i], secs);
  });
  rep.pass = std::all_of(rep.outcomes.begin(), rep.outcomes.end(), [](const VerifyOutcome& o) { return o.pass; });
  rep.exit_code = rep.pass ? 0 : 1;
  return rep;
}

std::vector<int> parse_suite(const std::string& suite) {
  std::vector<int> ids;
  if (suite == "all") return ids;
  std::stringstream ss(suite);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw Error(ErrorCode::OutOfDomain, "bad suite entry '" + tok + "'");
    criterion_title(id);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) throw Error(ErrorCode::OutOfDomain, "empty suite");
  return ids;
}

json to_json(const VerifyReport& r) {
  json outcomes = json::array();
  for (const VerifyOutcome& o : r.outcomes) {
    json checks = json::array();
    for (const VerifyCheck& c : o.checks)
      checks.push_back({{"name", c.name},
                        {"measured", finite_or_null(c.measured)},
                        {"expected", finite_or_null(c.expected)},
                        {"tolerance", finite_or_null(c.tolerance)},
                        {"relation", to_string(c.relation)},
                        {"pass", c.pass}});
    outcomes.push_back(
        {{"id", o.id}, {"title", o.title}, {"checks", checks}, {"error", o.error}, {"pass", o.pass}});
  }
  return {{"criteria", outcomes}, {"pass", r.pass}, {"exit_code", r.exit_code}};
}

VerifyReport verify_report_from_json(const json& j) {
  auto num = [](const json& v) { return v.is_null() ? NAN : v.get<double>(); };
  try {
    VerifyReport r;
    for (const json& o : j.at("criteria")) {
      VerifyOutcome out;
      out.id = o.at("id").get<int>();
      out.title = o.at("title").get<std::string>();
      out.error = o.at("error").get<std::string>();
      out.pass = o.at("pass").get<bool>();
      for (const json& c : o.at("checks"))
        out.checks.push_back({c.at("name").get<std::string>(), num(c.at("measured")), num(c.at("expected")),
                              num(c.at("tolerance")), relation_from_string(c.at("relation").get<std::string>()),
                              c.at("pass").get<bool>()});
      r.outcomes.push_back(std::move(out));
    }
    r.pass = j.at("pass").get<bool>();
    r.exit_code = j.at("exit_code").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("verify report: ") + e.what());
  }
}

}  // namespace csflab
