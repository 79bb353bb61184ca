#include "support.hpp"

#include "csflab/asymptotics.hpp"
#include "csflab/critical.hpp"

using namespace csflab;
using namespace support;

namespace {

FlowTrajectory physical(const ExactFamily& f, const std::vector<double>& ts, std::size_t n) {
  return frames(FlowMode::Physical, ts, [&](double t) { return sample(f, t, n); });
}

// Thin closed loop around the two vertical lines x = +-h, |y| <= L.
DiscreteCurve double_line(double h, double L, double dy) {
  std::vector<Vec2> p;
  const int nl = static_cast<int>(2 * L / dy);
  const int nc = 16;
  for (int k = 0; k < nl; ++k) p.push_back({h, -L + 2 * L * k / nl});
  for (int k = 0; k < nc; ++k) {
    const double a = pi * k / nc;
    p.push_back({h * std::cos(a), L + h * std::sin(a)});
  }
  for (int k = 0; k < nl; ++k) p.push_back({-h, L - 2 * L * k / nl});
  for (int k = 0; k < nc; ++k) {
    const double a = pi + pi * k / nc;
    p.push_back({h * std::cos(a), -L + h * std::sin(a)});
  }
  return DiscreteCurve(p, true);
}

std::size_t sharp_vertex(const DiscreteCurve& c) {
  const auto v = detect_vertices(c);
  REQUIRE_FALSE(v.sharp.empty());
  return v.sharp[0];
}

}  // namespace

TEST_CASE("regularity scale examples") {
  const auto reaper = physical(ExactFamily::grim_reaper(1.4), range(-2, 0, 0.1), 1001);
  const double lg = regularity_scale(reaper, {0, 0}, 0.0);
  CHECK(lg >= 0.5);
  CHECK(lg <= 1.5);

  const auto circ = physical(ExactFamily::circle(), range(-2, -0.5, 0.0375), 512);
  const double lc = regularity_scale(circ, {1, 0}, -0.5);
  CHECK(lc >= 0.5);
  CHECK(lc <= 1.0);

  // A static line is only limited by the window: sqrt(t - t_first) here.
  const auto line = sample(ExactFamily::line(0, 0, 100), 0, 2001);
  const auto lt = frames(FlowMode::Physical, range(-4, 0, 0.1), [&](double) { return line; });
  CHECK(regularity_scale(lt, {0, 0}, 0.0) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(regularity_scale(lt, {0, 0}, 0.0, 1.5) == doctest::Approx(1.5).epsilon(1e-3));

  CHECK_ERROR_CODE(regularity_scale(circ, {1, 0}, -3.0), ErrorCode::WindowTooSmall);
}

TEST_CASE("grim fit") {
  const auto reaper = physical(ExactFamily::grim_reaper(1.45), {-2, -1.5, -1, -0.5, 0}, 2001);
  const auto self = grim_fit(reaper, {4, 1000}, 1.0);
  CHECK(self.c2_distance < 1e-3);
  CHECK(self.frames_used >= 2);

  auto clip_fit = [](double t) {
    std::vector<double> ts;
    for (int i = 8; i >= 0; --i) ts.push_back(t - 0.5 * i);
    const auto tr = physical(ExactFamily::paper_clip(), ts, 16384);
    const auto& c = tr.frames.back().curve;
    const std::size_t v = sharp_vertex(c);
    return grim_fit(tr, {ts.size() - 1, v}, 1.0 / std::abs(curvature(c)[v]));
  };
  const auto at8 = clip_fit(-8);
  CHECK(at8.c2_distance < 0.05);
  CHECK(clip_fit(-10).c2_distance < clip_fit(-5).c2_distance);

  const auto seg = physical(ExactFamily::line(), {0, 1}, 101);
  CHECK_ERROR_CODE(grim_fit(seg, {1, 50}, 1.0), ErrorCode::OrientationAmbiguous);
}

TEST_CASE("grim fit is invariant under rigid motions and parabolic rescaling") {
  const auto base = physical(ExactFamily::grim_reaper(1.45), {-2, -1.5, -1, -0.5, 0}, 2001);
  const auto ref = grim_fit(base, {4, 1000}, 1.0);
  const double angle = 0.6, lam = 2.0;
  const Vec2 shift{1.5, -0.7};
  FlowTrajectory moved;
  moved.mode = FlowMode::Physical;
  for (const auto& f : base.frames) {
    const double t = lam * lam * f.time;
    moved.frames.push_back({translated(rotated(scaled(f.curve, lam), angle), shift).with_time(t), t, FlowMode::Physical});
  }
  const auto g = grim_fit(moved, {4, 1000}, lam);
  CHECK(std::abs(g.c2_distance - ref.c2_distance) < 1e-8);
}

TEST_CASE("vertex ODE along the rescaled paper clip") {
  AdaptiveSpacing sp;
  sp.c = 0.03;
  sp.h_max = 0.1;
  const auto traj = frames(FlowMode::Rescaled, range(-8, -4, 0.1),
                           [&](double tau) { return sample_rescaled_adaptive(ExactFamily::paper_clip(), tau, sp); });
  const auto paths = track_paths(traj, PathKind::SharpVertex);
  REQUIRE(paths.paths.size() == 2);
  for (const auto& p : paths.paths) {
    const auto rep = vertex_ode_check(traj, p);
    CHECK(rep.min_abs_chi >= 1 / std::sqrt(2.0) - 0.02);
    CHECK(rep.ode_ok);
    CHECK(rep.lower_ok);
    CHECK(rep.monotone_in_minus_tau);
    for (std::size_t k = 1; k < rep.chi.size(); ++k) CHECK(std::abs(rep.chi[k]) <= std::abs(rep.chi[k - 1]) + 0.02);
  }
  const auto circ = frames(FlowMode::Rescaled, range(-1, 0, 0.25),
                           [](double tau) { return sample_rescaled(ExactFamily::circle(), tau, 128); });
  CHECK_ERROR_CODE(detect_vertices(circ.frames[0].curve), ErrorCode::DegenerateVertexSet);
  CHECK(track_paths(circ, PathKind::SharpVertex).paths.empty());
}

TEST_CASE("tip relations") {
  const auto g = sample(ExactFamily::grim_reaper(1.45), 0, 2001);
  const auto r = tip_relations_check(g, 1000, 1.0, 1.3);
  CHECK(r.r0 < 1e-2);
  CHECK(r.r1 < 1e-2);
  CHECK(r.r2 < 1e-2);

  const auto clip = sample(ExactFamily::paper_clip(), -8, 16384);
  const std::size_t v = sharp_vertex(clip);
  CHECK(tip_relations_check(clip, v, 1.0 / std::abs(curvature(clip)[v])).r0 < 0.05);

  // Negative control: a circle is not a reaper.
  CHECK(tip_relations_check(circle(2, 512), 0, 0.5).r1 > 0.1);
  CHECK_ERROR_CODE(tip_relations_check(segment({0, 0}, {4, 0}, 64), 30, 1.0), ErrorCode::ZeroCurvature);
}

TEST_CASE("reaper identity residual halves as n doubles") {
  double prev = 0;
  for (std::size_t n : {1025u, 2049u}) {
    const auto g = sample(ExactFamily::grim_reaper(1.45), 0, n);
    const double r1 = tip_relations_check(g, n / 2, 1.0, 1.3).r1;
    if (n == 1025) CHECK(r1 < 1e-2);
    if (prev > 0) CHECK(r1 < 0.6 * prev);
    prev = r1;
  }
}

TEST_CASE("tail decay") {
  const auto reaper = physical(ExactFamily::grim_reaper(1.4), range(0, 1, 0.1), 1001);
  const auto rep = tail_decay_check(reaper);
  REQUIRE(rep.size() == reaper.frames.size());
  for (const auto& f : rep) {
    CHECK(f.tails == 2);
    CHECK(f.monotone);
    CHECK(std::isfinite(f.sup_kappa_times_r));
  }
  const auto clip = physical(ExactFamily::paper_clip(), {-6, -5}, 256);
  for (const auto& f : tail_decay_check(clip)) CHECK(f.tails == 0);
}

TEST_CASE("graphical radius") {
  SUBCASE("rescaled paper clip: two sheets, radius grows backward in tau") {
    const auto a = graphical_radius(sample_rescaled(ExactFamily::paper_clip(), -8, 2048), 0, 0.05, 2);
    const auto b = graphical_radius(sample_rescaled(ExactFamily::paper_clip(), -5, 2048), 0, 0.05, 2);
    CHECK(a.m == 2);
    CHECK(a.passed());
    CHECK(b.passed());
    CHECK(a.rho_hat > b.rho_hat);
  }
  SUBCASE("two parallel lines") {
    const double h = 1e-4;
    const auto r = graphical_radius(double_line(h, 50, 0.05), 0, 0.05, 2);
    CHECK(r.rho == doctest::Approx(std::pow(h, -0.25)).epsilon(1e-6));
    CHECK(r.passed());
    REQUIRE(r.unit_norms.size() == 2);
    for (const auto& n : r.unit_norms) {
      CHECK(n.sup_u == doctest::Approx(h).epsilon(1e-9));
      CHECK(n.sup_uy < 1e-9);
    }
  }
  CHECK_ERROR_CODE(graphical_radius(sample_rescaled(ExactFamily::circle(), 0, 512), 0, 0.05, 2),
                   ErrorCode::SheetCountMismatch);
}

TEST_CASE("trombone diagnostics") {
  AdaptiveSpacing sp;
  sp.c = 0.03;
  sp.h_max = 0.1;
  const auto traj = frames(FlowMode::Rescaled, range(-8, -5, 0.25),
                           [&](double tau) { return sample_rescaled_adaptive(ExactFamily::paper_clip(), tau, sp); });
  const auto rep = trombone_check(traj, 0.2);
  for (const auto& f : rep.frames) CHECK(f.all());
  REQUIRE(rep.trombone_tau.has_value());
  CHECK(*rep.trombone_tau == doctest::Approx(-5.0));
  CHECK(rep.prefix_structure);

  // An off-centre ellipse: knuckles seen from the origin are not antipodal.
  const auto ell = frames(FlowMode::Rescaled, {-3, -2.5},
                          [](double) { return translated(scaled(ellipse(2, 1, 512), 1.2), {0.4, 0.5}); });
  const auto er = trombone_check(ell, 0.2);
  for (const auto& f : er.frames) {
    CHECK_FALSE(f.knuckle_angles);
    CHECK_FALSE(f.all());
  }
  CHECK_FALSE(er.trombone_tau.has_value());
}
