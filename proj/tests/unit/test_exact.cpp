#include "support.hpp"

using namespace csflab;
using namespace support;

TEST_CASE("circle sample radius") {
  const auto c = sample(ExactFamily::circle(), -0.5, 256);
  CHECK(c.size() == 256);
  CHECK(c.closed());
  for (const Vec2& p : c.points()) CHECK(std::abs(norm(p) - 1.0) < 1e-12);
  const auto d = sample(ExactFamily::circle(), -2, 64);
  for (const Vec2& p : d.points()) CHECK(std::abs(norm(p) - 2.0) < 1e-12);
}

TEST_CASE("paper clip extents match the closed-form inversion") {
  const auto c = sample(ExactFamily::paper_clip(), -5, 512);
  double xm = 0, ym = 0;
  for (const Vec2& p : c.points()) {
    xm = std::max(xm, std::abs(p.x));
    ym = std::max(ym, std::abs(p.y));
  }
  CHECK(xm == doctest::Approx(std::acos(std::exp(-5.0))).epsilon(1e-9));
  CHECK(ym == doctest::Approx(std::acosh(std::exp(5.0))).epsilon(1e-9));
  CHECK(xm == doctest::Approx(1.5641).epsilon(1e-4));
  CHECK(ym == doctest::Approx(5.6931).epsilon(1e-4));
  // Every sample lies on cos x = e^t cosh y.
  for (const Vec2& p : c.points()) CHECK(std::abs(std::cos(p.x) - std::exp(-5.0) * std::cosh(p.y)) < 1e-10);
}

TEST_CASE("grim reaper tip and curvature") {
  const auto g = sample(ExactFamily::grim_reaper(1.2), 0, 257);
  CHECK_FALSE(g.closed());
  const Vec2 tip = g[128];
  CHECK(std::abs(tip.x) < 1e-12);
  CHECK(std::abs(tip.y) < 1e-12);
  CHECK(exact_curvature(ExactFamily::grim_reaper(1.2), 0, tip) == doctest::Approx(1.0));
  const auto f = compute_frame(g);
  CHECK(f.kappa[128] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("grim reaper tip traces (0, t)") {
  const auto g0 = sample(ExactFamily::grim_reaper(1.2), 0, 101);
  for (double t : {-3.0, -0.5, 2.0}) {
    const auto g = sample(ExactFamily::grim_reaper(1.2), t, 101);
    CHECK(g[50].x - g0[50].x == 0.0);
    CHECK(g[50].y - g0[50].y == doctest::Approx(t).epsilon(1e-14));
  }
}

TEST_CASE("flow residuals") {
  CHECK(flow_residual(ExactFamily::circle(), -1, 1e-4, 256) < 1e-3);
  CHECK(flow_residual(ExactFamily::grim_reaper(1.2), 0, 1e-4, 257) < 1e-3);
  CHECK(flow_residual(ExactFamily::paper_clip(), -3, 1e-4, 512) < 1e-2);
}

TEST_CASE("flow residual shrinks with dt") {
  for (const ExactFamily& f : {ExactFamily::circle(), ExactFamily::grim_reaper(1.2), ExactFamily::paper_clip()}) {
    const double t = f.kind == FamilyKind::GrimReaper ? 0.0 : -2.0;
    const double coarse = flow_residual(f, t, 4e-3, 513);
    const double fine = flow_residual(f, t, 1e-3, 513);
    CHECK(fine < coarse);
  }
}

TEST_CASE("paper clip is convex") {
  for (double t : {-10.0, -5.0, -1.0, -0.05}) {
    const auto c = sample(ExactFamily::paper_clip(), t, 512);
    const auto f = compute_frame(c);
    for (double k : f.kappa) CHECK(k > 0);
  }
}

TEST_CASE("paper clip at t = -10 is two grim reapers") {
  const double t = -10;
  const auto c = sample(ExactFamily::paper_clip(), t, 4096);
  double worst = 0;
  for (const Vec2& p : c.points())
    if (p.y > 0 && std::abs(p.x) <= 1) worst = std::max(worst, std::abs(p.y - (-t + std::log(2 * std::cos(p.x)))));
  CHECK(worst < 1e-3);
}

TEST_CASE("family domains") {
  CHECK_ERROR_CODE(check_domain(ExactFamily::circle(), 0.0), ErrorCode::OutOfDomain);
  CHECK_ERROR_CODE(check_domain(ExactFamily::paper_clip(), 0.1), ErrorCode::OutOfDomain);
  CHECK_ERROR_CODE(sample(ExactFamily::circle(), 0.2, 64), ErrorCode::OutOfDomain);
  CHECK_NOTHROW(check_domain(ExactFamily::line(), 5.0));
  CHECK(family_from_string("paper_clip") == FamilyKind::PaperClip);
  CHECK(to_string(FamilyKind::GrimReaper) == "grim_reaper");
  CHECK_ERROR_CODE(family_from_string("trombone"), ErrorCode::InvalidCurve);
}

TEST_CASE("implicit description vanishes on samples") {
  for (const ExactFamily& f : {ExactFamily::circle(), ExactFamily::paper_clip()}) {
    const auto c = sample(f, -2, 128);
    for (const Vec2& p : c.points()) CHECK(std::abs(implicit_value(f, -2, p)) < 1e-10);
  }
}

TEST_CASE("rescaled samples carry tau and the sqrt 2 circle is fixed") {
  for (double tau : {-3.0, 0.0, 2.0}) {
    const auto c = sample_rescaled(ExactFamily::circle(), tau, 128);
    REQUIRE(c.time().has_value());
    CHECK(*c.time() == tau);
    for (const Vec2& p : c.points()) CHECK(norm(p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("adaptive exact sampling follows the spacing rule") {
  AdaptiveSpacing s;
  s.c = 0.03;
  s.h_max = 0.1;
  const auto c = sample_rescaled_adaptive(ExactFamily::paper_clip(), -6, s);
  CHECK(c.max_edge() <= s.h_max * 1.01);
  CHECK(c.min_edge() >= s.h_min * 0.99);
  CHECK_FALSE(self_intersects(c));
}
