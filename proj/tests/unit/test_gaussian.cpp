#include "support.hpp"

#include "csflab/gaussian.hpp"

using namespace csflab;
using namespace support;

namespace {

const double kCircleEntropy = std::sqrt(2 * pi / std::exp(1.0));

// Periodic trapezoid rule on the exact circle (spectrally accurate).
double circle_F(double R, Vec2 c, Vec2 x0, double lambda) {
  const int m = 20000;
  double s = 0;
  for (int k = 0; k < m; ++k) {
    const double a = 2 * pi * k / m;
    const Vec2 p{c.x + R * std::cos(a) - x0.x, c.y + R * std::sin(a) - x0.y};
    s += std::exp(-dot(p, p) / (4 * lambda));
  }
  return s * (2 * pi * R / m) / std::sqrt(4 * pi * lambda);
}

FlowTrajectory static_frames(const DiscreteCurve& c, const std::vector<double>& times) {
  return frames(FlowMode::Physical, times, [&](double) { return c; });
}

// Closed stadium: two parallel segments y = +-w/2, |x| <= L, joined by half circles.
DiscreteCurve stadium(double L, double w, double h) {
  std::vector<Vec2> p;
  const int nl = static_cast<int>(2 * L / h);
  const int nc = 16;
  for (int k = 0; k < nl; ++k) p.push_back({-L + 2 * L * k / nl, -w / 2});
  for (int k = 0; k < nc; ++k) {
    const double a = -pi / 2 + pi * k / nc;
    p.push_back({L + w / 2 * std::cos(a), w / 2 * std::sin(a)});
  }
  for (int k = 0; k < nl; ++k) p.push_back({L - 2 * L * k / nl, w / 2});
  for (int k = 0; k < nc; ++k) {
    const double a = pi / 2 + pi * k / nc;
    p.push_back({-L + w / 2 * std::cos(a), w / 2 * std::sin(a)});
  }
  return DiscreteCurve(p, true);
}

}  // namespace

TEST_CASE("gaussian length closed forms") {
  const auto line = sample(ExactFamily::line(0, 0, 50), 0, 1001);
  CHECK(gaussian_length(line, {0, 0}, 1) == doctest::Approx(1.0).epsilon(1e-6));
  const auto c = circle(std::sqrt(2.0), 4096);
  CHECK(std::abs(gaussian_length(c, {0, 0}, 1) - kCircleEntropy) < 1e-4);
  // For large lambda the kernel flattens: F -> length / sqrt(4 pi lambda).
  const double flat = 2 * pi * std::sqrt(2.0) / std::sqrt(400 * pi);
  CHECK(std::abs(gaussian_length(c, {0, 0}, 100) - circle_F(std::sqrt(2.0), {}, {}, 100)) < 1e-6);
  CHECK(std::abs(gaussian_length(c, {0, 0}, 100) - flat) < 3e-3);
}

TEST_CASE("gaussian length matches quadrature off centre") {
  const auto c = circle(1.3, 4096, {0.2, -0.4});
  for (Vec2 x0 : {Vec2{0, 0}, Vec2{1.1, 0.3}, Vec2{-2, 1}})
    for (double lambda : {0.05, 0.5, 3.0})
      CHECK(std::abs(gaussian_length(c, x0, lambda) - circle_F(1.3, {0.2, -0.4}, x0, lambda)) < 1e-6);
}

TEST_CASE("gaussian length is rotation invariant about x0") {
  const auto e = ellipse(2, 0.7, 300);
  const Vec2 x0{0.4, 0.1};
  const double base = gaussian_length(e, x0, 0.6);
  for (double a : {0.3, 1.7, -2.2}) CHECK(std::abs(gaussian_length(rotated(e, a, x0), x0, 0.6) - base) < 1e-10);
}

TEST_CASE("entropy of lines, circles and the paper clip") {
  const auto line = sample(ExactFamily::line(0.4, 0.2, 50), 0, 1001);
  const auto el = entropy(line);
  CHECK(el.kind == DensityKind::Entropy);
  CHECK(el.value == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(el.truncated);
  for (double r : {0.5, 1.0, 3.0}) {
    const auto ec = entropy(circle(r, 512));
    CHECK(std::abs(ec.value - kCircleEntropy) < 5e-3);
    CHECK_FALSE(ec.truncated);
  }
  const auto clip = entropy(sample_rescaled(ExactFamily::paper_clip(), -8, 512));
  CHECK(std::abs(clip.value - 2.0) < 5e-2);
}

TEST_CASE("entropy dominates every probe") {
  const auto e = ellipse(1.5, 1, 256);
  const auto rep = entropy(e);
  CHECK(rep.value >= 1.0);
  for (Vec2 x0 : {Vec2{0, 0}, Vec2{0.5, 0.2}, Vec2{-1, 0.9}})
    for (double lambda : {0.01, 0.3, 1.0, 10.0}) CHECK(rep.value >= gaussian_length(e, x0, lambda) - 1e-12);
  CHECK(gaussian_length(e, rep.center, rep.scale) == doctest::Approx(rep.value).epsilon(1e-12));
}

TEST_CASE("theta on a static line is one") {
  const auto line = sample(ExactFamily::line(0, 0, 100), 0, 2001);
  const auto traj = static_frames(line, range(-4, 0, 0.1));
  for (double r : {0.1, 0.5, 1.5})
    for (Vec2 x0 : {Vec2{0, 0}, Vec2{3, 0}}) CHECK(theta(traj, x0, 0.0, r) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("theta of a shrinking circle") {
  const auto traj = frames(FlowMode::Physical, range(-1, -0.01, 0.01),
                           [](double t) { return sample(ExactFamily::circle(), t, 1024); });
  SUBCASE("extinction point: constant in r") {
    for (double r : {0.2, 0.5, 0.9}) CHECK(std::abs(theta(traj, {0, 0}, 0.0, r) - kCircleEntropy) < 1e-3);
  }
  SUBCASE("regular point: one as r goes to zero") {
    const double t0 = -0.05;
    const Vec2 x0{std::sqrt(0.1), 0};
    const auto fine = frames(FlowMode::Physical, range(-0.1, -0.0005, 0.0005),
                             [](double t) { return sample(ExactFamily::circle(), t, 1024); });
    CHECK(std::abs(theta(fine, x0, t0, 0.02) - 1.0) < 1e-2);
    double prev = 0;
    for (double r = 0.05; r <= 0.9; r += 0.05) {
      const double v = theta(traj, x0, t0, r);
      CHECK(v >= prev - 1e-5);
      prev = v;
    }
  }
  CHECK_ERROR_CODE(theta(traj, {0, 0}, 0.0, 2.0), ErrorCode::OutOfWindow);
}

TEST_CASE("localized ratio: static line and near-double line") {
  const auto line = sample(ExactFamily::line(0, 0, 100), 0, 2001);
  const auto traj = static_frames(line, range(-3, 0, 0.1));
  const double v = theta_localized(traj, {0, 0}, 0.0, 10.0, 1.0);
  CHECK(v >= 0.95);
  CHECK(v <= 1.05);
  const auto hairpin = stadium(40, 1e-3, 0.02);
  const auto t2 = static_frames(hairpin, range(-3, 0, 0.1));
  CHECK(std::abs(theta_localized(t2, {0, 0}, 0.0, 10.0, 1.0) - 2.0) < 0.1);
  CHECK(std::abs(theta(t2, {0, 0}, 0.0, 1.0) - 2.0) < 1e-2);
}

TEST_CASE("localized ratio stays under the cutoff envelope times theta") {
  const auto traj = frames(FlowMode::Physical, range(-1, -0.01, 0.01),
                           [](double t) { return sample(ExactFamily::circle(), t, 1024); });
  const Vec2 x{std::sqrt(0.1), 0};
  const double tbar = -0.05, R = 1.0;
  for (double s : {0.1, 0.3, 0.6, 0.9}) {
    const double envelope = std::pow(1 + 2 * s * s / (R * R), 3);
    CHECK(theta_localized(traj, x, tbar, R, s) <= envelope * theta(traj, x, tbar, s) + 1e-6);
  }
}

TEST_CASE("monotonicity of F along rescaled flows") {
  SUBCASE("rescaled circle: F constant") {
    const auto traj = frames(FlowMode::Rescaled, range(-2, 2, 0.25),
                             [](double tau) { return sample_rescaled(ExactFamily::circle(), tau, 1024); });
    const auto rep = monotonicity_report(traj, 1e-5);
    for (double f : rep.F) CHECK(std::abs(f - kCircleEntropy) < 1e-4);
    CHECK(rep.max_jump <= 1e-5);
    CHECK(rep.passed);
  }
  SUBCASE("rescaled paper clip over [-8, -4]") {
    const auto traj = frames(FlowMode::Rescaled, range(-8, -4, 0.25),
                             [](double tau) { return sample_rescaled(ExactFamily::paper_clip(), tau, 1024); });
    const auto rep = monotonicity_report(traj, 1e-4);
    CHECK(rep.passed);
    CHECK(rep.max_jump <= 1e-4);
    CHECK(rep.F.front() > rep.F.back());
  }
  SUBCASE("rescaled ellipse decreases") {
    EvolveControls ec;
    ec.dt_max = 1e-3;
    ec.save_interval = 0.1;
    ec.step.n = 256;
    const auto e = scaled(ellipse(1.6, 1.0, 256), std::sqrt(2.0));
    const auto traj = evolve({e, 0.0, FlowMode::Rescaled}, 1.0, ec, false);
    const auto rep = monotonicity_report(traj, 1e-4);
    CHECK(rep.passed);
    CHECK(rep.F.front() - rep.F.back() > 1e-4);
  }
  const auto phys = frames(FlowMode::Physical, {-2, -1}, [](double t) { return sample(ExactFamily::circle(), t, 64); });
  CHECK_THROWS_AS(monotonicity_report(phys, 1e-4), Error);
}

TEST_CASE("density of near-straight graphs is sandwiched by its bounds") {
  auto chord = [](double d, double r, int n) {
    const double half = std::sqrt(r * r - d * d);
    return segment({-half, d}, {half, d}, n);
  };
  const auto diameter = lemma_a1_check(0.01, 0.0, 100.0, chord(0, 100, 2001));
  CHECK(diameter.value == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(diameter.inside);
  CHECK(diameter.lower <= diameter.value);
  CHECK(diameter.value <= diameter.upper);

  const auto shifted = lemma_a1_check(0.01, 0.0, 100.0, chord(0.05, 100, 2001));
  CHECK(shifted.inside);
  CHECK(shifted.value <= 1.0);
  CHECK(shifted.d0 == doctest::Approx(0.05));

  // Arc of the circle of radius r / b through the origin, clipped to |x| <= r.
  const double r = 100, b = 0.01, R = r / b;
  const double half_angle = 2 * std::asin(r / (2 * R));
  std::vector<Vec2> arc;
  for (int k = 0; k <= 2000; ++k) {
    const double a = -half_angle + 2 * half_angle * k / 2000;
    arc.push_back({R * std::sin(a), R - R * std::cos(a)});
  }
  const auto res = lemma_a1_check(0.01, b, r, DiscreteCurve(arc, false));
  CHECK(res.inside);

  CHECK_ERROR_CODE(lemma_a1_check(0.2, 0.0, 100.0, chord(0, 100, 201)), ErrorCode::HypothesisViolated);
  CHECK_ERROR_CODE(lemma_a1_check(0.01, 0.0, 5.0, chord(0, 5, 201)), ErrorCode::HypothesisViolated);
}
