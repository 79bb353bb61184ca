#include "support.hpp"

using namespace csflab;
using namespace support;

namespace {

double mean_radius(const DiscreteCurve& c) {
  double s = 0;
  for (const Vec2& p : c.points()) s += norm(p);
  return s / static_cast<double>(c.size());
}

double max_radius_error(const DiscreteCurve& c, double r) {
  double m = 0;
  for (const Vec2& p : c.points()) m = std::max(m, std::abs(norm(p) - r));
  return m;
}

}  // namespace

TEST_CASE("one step shrinks the unit circle by the exact law") {
  StepControls sc;
  sc.n = 256;
  StepInfo info;
  const auto next = step({circle(1, 256), 0.0, FlowMode::Physical}, 1e-4, sc, &info);
  CHECK(info.dt == doctest::Approx(1e-4));
  CHECK(next.time == doctest::Approx(1e-4));
  CHECK(max_radius_error(next.curve, std::sqrt(1 - 2e-4)) < 1e-6);
  CHECK(std::abs(mean_radius(next.curve) - 0.9999) < 1e-6);
}

TEST_CASE("grim reaper translates at unit speed") {
  const auto g = sample(ExactFamily::grim_reaper(1.2), 0, 257);
  StepControls sc;
  sc.n = 257;
  sc.fixed_dt = true;
  const auto next = step({g, 0.0, FlowMode::Physical}, 1e-4, sc);
  // The tip is the lowest point.
  Vec2 tip = next.curve[0];
  for (const Vec2& p : next.curve.points())
    if (p.y < tip.y) tip = p;
  CHECK(std::abs(tip.x) < 1e-7);
  CHECK(std::abs(tip.y - 1e-4) < 1e-7);
}

TEST_CASE("rescaled sqrt 2 circle is a fixed point") {
  const auto c = circle(std::sqrt(2.0), 256);
  EvolveControls ec;
  ec.dt_max = 1e-3;
  ec.step.n = 256;
  const auto traj = evolve({c, 0.0, FlowMode::Rescaled}, 1.0, ec, false);
  CHECK(traj.frames.back().time == doctest::Approx(1.0));
  CHECK(max_radius_error(traj.frames.back().curve, std::sqrt(2.0)) < 1e-5);
}

TEST_CASE("step commutes with rigid motions") {
  const auto e = ellipse(2, 1, 200);
  StepControls sc;
  sc.n = 200;
  const double angle = 0.9;
  const Vec2 shift{3, -1};
  const auto a = step({translated(rotated(e, angle), shift), 0.0, FlowMode::Physical}, 1e-4, sc);
  const auto b = step({e, 0.0, FlowMode::Physical}, 1e-4, sc);
  const auto b_moved = translated(rotated(b.curve, angle), shift);
  CHECK(hausdorff_distance(a.curve, b_moved) < 1e-10);
}

TEST_CASE("evolve shrinks the unit circle to sqrt 0.1 at t = 0.45") {
  EvolveControls ec;
  ec.dt_max = 1e-4;
  ec.step.n = 512;
  const auto traj = evolve({circle(1, 512), 0.0, FlowMode::Physical}, 0.45, ec, false);
  CHECK(traj.stop_reason == "horizon");
  CHECK(traj.frames.back().time == 0.45);
  CHECK(std::abs(mean_radius(traj.frames.back().curve) - std::sqrt(0.1)) < 1e-3);
}

TEST_CASE("circle radius error converges in dt") {
  double err[3];
  int i = 0;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    EvolveControls ec;
    ec.dt_max = dt;
    ec.step.n = 64;
    ec.step.fixed_dt = true;
    const auto traj = evolve({circle(1, 64), 0.0, FlowMode::Physical}, 0.3, ec, false);
    err[i++] = max_radius_error(traj.frames.back().curve, std::sqrt(1 - 0.6));
  }
  // O(dt) or better: halving dt must not increase the error by more than round-off.
  CHECK(err[1] <= err[0] * 0.55 + 1e-12);
  CHECK(err[2] <= err[1] * 0.55 + 1e-12);
}

TEST_CASE("paper clip evolution stays close to the exact solution") {
  EvolveControls ec;
  ec.dt_max = 1e-4;
  ec.step.n = 512;
  const auto traj = evolve({sample(ExactFamily::paper_clip(), -5, 512), -5.0, FlowMode::Physical}, 1.0, ec, false);
  CHECK(traj.frames.back().time == -4.0);
  CHECK(hausdorff_distance(traj.frames.back().curve, sample(ExactFamily::paper_clip(), -4, 4096)) < 5e-3);
}

TEST_CASE("ellipse flow: length and isoperimetric ratio decrease") {
  EvolveControls ec;
  ec.dt_max = 1e-4;
  ec.save_interval = 0.02;
  ec.step.n = 256;
  const auto traj = evolve({ellipse(2, 1, 256), 0.0, FlowMode::Physical}, 0.4, ec, false);
  REQUIRE(traj.frames.size() >= 20);
  for (std::size_t k = 1; k < traj.frames.size(); ++k) {
    const auto& a = traj.frames[k - 1].curve;
    const auto& b = traj.frames[k].curve;
    CHECK(b.length() < a.length());
    const double qa = a.length() * a.length() / (4 * pi * a.signed_area());
    const double qb = b.length() * b.length() / (4 * pi * b.signed_area());
    CHECK(qb < qa);
  }
  for (std::size_t k = 1; k < traj.frames.size(); ++k) CHECK(traj.frames[k].time > traj.frames[k - 1].time);
}

TEST_CASE("evolve rejects a crossing initial curve") {
  const DiscreteCurve cross({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {3, 1}, {2, 1}, {1.5, -1}, {1, -2}}, false);
  EvolveControls ec;
  CHECK_ERROR_CODE(evolve({cross, 0.0, FlowMode::Physical}, 0.1, ec), ErrorCode::InvalidCurve);
}

TEST_CASE("a forced oversized step is rejected") {
  StepControls sc;
  sc.n = 128;
  sc.fixed_dt = true;
  sc.max_halvings = 0;
  CHECK_ERROR_CODE(step({circle(1, 128), 0.0, FlowMode::Physical}, 0.8, sc), ErrorCode::StepRejected);
}

TEST_CASE("rescale_frame") {
  SUBCASE("circle at t = -2 becomes the sqrt 2 circle") {
    const auto r = rescale_frame({circle(2, 128), -2.0, FlowMode::Physical});
    CHECK(r.mode == FlowMode::Rescaled);
    CHECK(r.time == doctest::Approx(-std::log(2.0)));
    CHECK(max_radius_error(r.curve, std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("paper clip at t = -e^3 is the tau = -3 frame") {
    const double t = -std::exp(3.0);
    const auto r = rescale_frame({sample(ExactFamily::paper_clip(), t, 512), t, FlowMode::Physical});
    CHECK(r.time == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(hausdorff_distance(r.curve, sample_rescaled(ExactFamily::paper_clip(), -3, 512)) < 1e-9);
  }
  SUBCASE("line through the origin is unchanged") {
    const auto l = segment({-5, -5}, {5, 5}, 41);
    const auto r = rescale_frame({l, -4.0, FlowMode::Physical});
    for (const Vec2& p : r.curve.points()) CHECK(std::abs(p.x - p.y) < 1e-12);
  }
  CHECK_ERROR_CODE(rescale_frame({circle(1, 64), 0.5, FlowMode::Physical}), ErrorCode::OutOfDomain);
}

TEST_CASE("align_rotation on axis-aligned and rotated clip frames") {
  const auto taus = range(-8, -5, 0.5);
  auto make = [](double angle) {
    return frames(FlowMode::Rescaled, range(-8, -5, 0.5), [&](double tau) {
      return rotated(sample_rescaled(ExactFamily::paper_clip(), tau, 512), angle);
    });
  };
  // With n divisible by 4 the right knuckle sits at a fixed index; find it.
  const auto first = sample_rescaled(ExactFamily::paper_clip(), -8, 512);
  std::size_t knuckle = 0;
  for (std::size_t i = 0; i < first.size(); ++i)
    if (first[i].x > first[knuckle].x) knuckle = i;
  std::vector<std::optional<std::size_t>> idx(taus.size(), knuckle);
  for (double angle : {0.0, 0.3}) {
    const auto al = align_rotation(make(angle), idx);
    REQUIRE(al.size() == taus.size());
    for (const auto& a : al) CHECK(std::abs(a.angle - angle) < 1e-3);
  }
  idx[2].reset();
  CHECK_ERROR_CODE(align_rotation(make(0.0), idx), ErrorCode::PathBroken);
}

TEST_CASE("frame lookup by time") {
  const auto traj = frames(FlowMode::Physical, {-3, -2, -1}, [](double t) { return sample(ExactFamily::circle(), t, 64); });
  CHECK(traj.frame_at_or_before(-2.5) == 0);
  CHECK(traj.frame_at_or_before(-1.0) == 2);
  CHECK(to_string(FlowMode::Rescaled) == "rescaled");
  CHECK(flow_mode_from_string("physical") == FlowMode::Physical);
}
