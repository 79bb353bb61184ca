#include "support.hpp"

#include "csflab/critical.hpp"

using namespace csflab;
using namespace support;

TEST_CASE("distance profile of the unit circle about its centre is flat") {
  const auto p = distance_profile(circle(1, 256), {0, 0});
  for (std::size_t i = 0; i < p.phi.size(); ++i) {
    CHECK(p.phi[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.phi_s[i]) < 1e-8);
    CHECK(std::abs(p.phi_ss[i]) < 1e-8);
  }
}

TEST_CASE("distance profile derivatives match the frame formulas") {
  const auto e = ellipse(2, 1, 2048);
  const Vec2 x0{0.3, -0.1};
  const double t = -0.7;
  const auto p = distance_profile(e, x0, t);
  const auto f = compute_frame(e);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Vec2 d = e[i] - x0;
    CHECK(std::abs(p.phi[i] - (dot(d, d) + 2 * t)) < 1e-12);
    CHECK(std::abs(p.phi_s[i] - 2 * dot(d, f.tangent[i])) < 1e-8);
    CHECK(std::abs(p.phi_ss[i] - (2 + 2 * f.kappa[i] * dot(d, f.normal[i]))) < 1e-8);
  }
}

TEST_CASE("ellipse: phi_s vanishes at the axis points") {
  const auto e = ellipse(2, 1, 512);
  const auto p = distance_profile(e, {0, 0});
  for (std::size_t i : {0u, 128u, 256u, 384u}) CHECK(std::abs(p.phi_s[i]) < 1e-10);
  const auto rep = detect_critical(p);
  CHECK(rep.tips.size() == 2);
  CHECK(rep.knuckles.size() == 2);
  CHECK(rep.fingers.size() == 2);
  for (std::size_t t : rep.tips) CHECK(std::abs(std::abs(e[t].x) - 2) < 1e-9);
  for (std::size_t k : rep.knuckles) CHECK(std::abs(std::abs(e[k].y) - 1) < 1e-9);
}

TEST_CASE("segment below a point has a single knuckle at the foot") {
  const auto s = segment({-1, 0}, {1, 0}, 201);
  const auto rep = detect_critical(distance_profile(s, {0, 0.5}));
  REQUIRE(rep.knuckles.size() == 1);
  CHECK(std::abs(s[rep.knuckles[0]].x) < 1e-12);
  CHECK(rep.tips.empty());
}

TEST_CASE("paper clip and grim reaper critical structure") {
  const auto clip = sample(ExactFamily::paper_clip(), -6, 512);
  const auto rc = detect_critical(distance_profile(clip, {0, 0}));
  CHECK(rc.knuckles.size() == 2);
  CHECK(rc.tips.size() == 2);
  CHECK(rc.fingers.size() == 2);
  CHECK(rc.tails.empty());

  const auto g = sample(ExactFamily::grim_reaper(1.4), 0, 401);
  const auto rg = detect_critical(distance_profile(g, {0, -3}));
  // Brute-force oracle for the nearest sample.
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (norm(g[i] - Vec2{0, -3}) < norm(g[best] - Vec2{0, -3})) best = i;
  REQUIRE(rg.knuckles.size() == 1);
  CHECK(rg.knuckles[0] == best);
  CHECK(rg.tails.size() == 2);
  CHECK(rg.tips.empty());
}

TEST_CASE("tips and knuckles alternate on closed curves") {
  const auto wobbly = [] {
    std::vector<Vec2> p;
    for (int k = 0; k < 600; ++k) {
      const double a = 2 * pi * k / 600;
      const double r = 1 + 0.2 * std::cos(5 * a) + 0.05 * std::sin(2 * a);
      p.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return DiscreteCurve(p, true);
  }();
  const auto rep = detect_critical(distance_profile(wobbly, {0.05, 0.02}));
  CHECK(rep.tips.size() == rep.knuckles.size());
  std::vector<std::pair<std::size_t, int>> all;
  for (auto t : rep.tips) all.push_back({t, 1});
  for (auto k : rep.knuckles) all.push_back({k, 0});
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].second != all[(i + 1) % all.size()].second);
  CHECK(rep.fingers.size() == rep.knuckles.size());
}

TEST_CASE("critical points commute with rigid motions") {
  const auto e = ellipse(2, 1, 400);
  const Vec2 x0{0.2, 0.1};
  const auto a = detect_critical(distance_profile(e, x0));
  const double angle = 0.8;
  const Vec2 shift{-3, 2};
  const auto moved = translated(rotated(e, angle), shift);
  const Vec2 rx0{std::cos(angle) * x0.x - std::sin(angle) * x0.y + shift.x,
                 std::sin(angle) * x0.x + std::cos(angle) * x0.y + shift.y};
  const auto b = detect_critical(distance_profile(moved, rx0));
  CHECK(a.tips == b.tips);
  CHECK(a.knuckles == b.knuckles);
}

TEST_CASE("finger region areas") {
  const auto rc = sample_rescaled(ExactFamily::paper_clip(), -6, 512);
  const auto rep = detect_critical(distance_profile(rc, {0, 0}));
  REQUIRE(rep.fingers.size() == 2);
  for (const auto& f : rep.fingers) CHECK(std::abs(finger_region_area(rc, f) - pi) < 0.15);

  // Unit circle about the origin, knuckles at (+-1, 0) seen from (0, -0.5):
  // each finger is a half disc closed by the diameter.
  std::vector<Vec2> pts;
  for (int k = 0; k < 4000; ++k) {
    const double a = 2 * pi * k / 4000;
    pts.push_back({std::cos(a), std::sin(a)});
  }
  const DiscreteCurve c(pts, true);
  const Finger upper{0, 2000, 1000};
  CHECK(std::abs(finger_region_area(c, upper) - pi / 2) < 1e-4);

  // A nearly straight finger has almost no area.
  std::vector<Vec2> flat;
  for (int k = 0; k < 400; ++k) {
    const double a = 2 * pi * k / 400;
    flat.push_back({5 * std::cos(a), 0.01 * std::sin(a)});
  }
  const DiscreteCurve thin(flat, true);
  CHECK(finger_region_area(thin, Finger{0, 200, 100}) < 0.1);
}

TEST_CASE("vertex detection") {
  SUBCASE("ellipse") {
    const auto v = detect_vertices(ellipse(2, 1, 512));
    CHECK(v.sharp.size() == 2);
    CHECK(v.flat.size() == 2);
    CHECK(v.inflections.empty());
    CHECK(v.bumpy);
    CHECK(v.edges_ok);
  }
  SUBCASE("paper clip") {
    const auto v = detect_vertices(sample(ExactFamily::paper_clip(), -6, 512));
    CHECK(v.sharp.size() == 2);
    CHECK(v.flat.size() == 2);
    CHECK(v.inflections.empty());
  }
  SUBCASE("grim reaper: one sharp vertex at the tip, monotone arms") {
    const auto g = sample(ExactFamily::grim_reaper(1.4), 0, 401);
    const auto v = detect_vertices(g);
    REQUIRE(v.sharp.size() == 1);
    CHECK(v.sharp[0] == 200);
    const auto k = curvature(g);
    for (std::size_t i = 201; i < g.size(); ++i) CHECK(std::abs(k[i]) <= std::abs(k[i - 1]) + 1e-12);
    for (std::size_t i = 0; i < 200; ++i) CHECK(std::abs(k[i]) <= std::abs(k[i + 1]) + 1e-12);
  }
  SUBCASE("limacon with an inner dent has inflections on mixed-sign edges") {
    std::vector<Vec2> p;
    for (int k = 0; k < 800; ++k) {
      const double a = 2 * pi * k / 800;
      const double r = 1 + 0.9 * std::cos(a);
      p.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const auto v = detect_vertices(DiscreteCurve(p, true));
    CHECK(v.inflections.size() == 2);
    CHECK(v.edges_ok);
  }
  CHECK_ERROR_CODE(detect_vertices(sample(ExactFamily::circle(), -0.5, 64)), ErrorCode::DegenerateVertexSet);
}

TEST_CASE("zero counting") {
  std::vector<double> s1, s2;
  for (int i = 0; i < 400; ++i) {
    const double x = 2 * pi * (i + 0.5) / 400;
    s1.push_back(std::sin(x));
    s2.push_back(std::sin(x) + std::sin(2 * x));
  }
  CHECK(count_zeros(s1, ZeroBoundary::Periodic).count == 2);
  CHECK_FALSE(count_zeros(s1, ZeroBoundary::Periodic).multiple);
  CHECK(count_zeros(s2, ZeroBoundary::Periodic).count == 4);

  // x^2 - eps with eps below the noise floor: a touching zero.
  std::vector<double> q;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1 + i / 100.0;
    q.push_back(x * x - 1e-14);
  }
  CHECK(count_zeros(q, ZeroBoundary::Periodic, 1e-9).multiple);

  std::vector<double> bad{0.0, 1.0, -1.0, 2.0};
  CHECK_ERROR_CODE(count_zeros(bad, ZeroBoundary::Nonvanishing), ErrorCode::BoundaryViolated);
  std::vector<double> ok{1.0, -1.0, -2.0, 3.0};
  CHECK(count_zeros(ok, ZeroBoundary::Nonvanishing).count == 2);
}

TEST_CASE("heat flow zero counts drop from 4 to 2") {
  std::vector<double> u0;
  for (int i = 0; i < 400; ++i) {
    const double x = 2 * pi * (i + 0.5) / 400;
    u0.push_back(std::sin(x) + std::sin(2 * x));
  }
  const auto counts = heat_zero_counts(u0, 1.0, 11);
  REQUIRE(counts.size() == 11);
  CHECK(counts.front() == 4);
  CHECK(counts.back() == 2);
  for (std::size_t k = 1; k < counts.size(); ++k) CHECK(counts[k] <= counts[k - 1]);
}

TEST_CASE("curvature extrema counts never increase along flows") {
  auto run = [](const DiscreteCurve& c, double horizon) {
    EvolveControls ec;
    ec.dt_max = 1e-4;
    ec.save_interval = horizon / 20;
    ec.step.n = c.size();
    return evolve({c, 0.0, FlowMode::Physical}, horizon, ec, false);
  };
  auto polar = [](auto r, std::size_t n) {
    std::vector<Vec2> p;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = 2 * pi * k / n;
      p.push_back({r(a) * std::cos(a), r(a) * std::sin(a)});
    }
    return DiscreteCurve(p, true);
  };
  const DiscreteCurve curves[] = {
      polar([](double a) { return 1 + 0.08 * std::cos(3 * a); }, 256),
      polar([](double a) { return 1 + 0.08 * std::cos(3 * a) + 0.03 * std::sin(5 * a); }, 256),
      ellipse(1.5, 1, 256),
  };
  for (const auto& c : curves) {
    const auto z = zero_monotonicity_check(run(c, 0.3), ZeroField::KappaS);
    CHECK(z.violations.empty());
    CHECK(z.counts.front() >= 4);
  }
}

TEST_CASE("paper clip keeps four curvature extrema") {
  const auto traj = frames(FlowMode::Physical, range(-8, -4, 0.5),
                           [](double t) { return sample(ExactFamily::paper_clip(), t, 1024); });
  const auto z = zero_monotonicity_check(traj, ZeroField::KappaS);
  for (std::size_t c : z.counts) CHECK(c == 4);
  CHECK(z.violations.empty());
}

TEST_CASE("paths on the paper clip") {
  const auto taus = range(-8, -4, 0.25);
  const auto traj = frames(FlowMode::Physical, range(-8, -4, 0.25),
                           [](double t) { return sample(ExactFamily::paper_clip(), t, 512); });
  const auto tips = track_paths(traj, PathKind::Tip);
  CHECK(tips.paths.size() == 2);
  for (const auto& p : tips.paths) {
    CHECK(p.birth == 0);
    CHECK(p.death == taus.size());
  }
  const auto knuckles = track_paths(traj, PathKind::Knuckle);
  CHECK(knuckles.paths.size() == 2);
  CHECK(extremum_path_check(traj, knuckles).passed());
  CHECK(extremum_path_check(traj, tips).phi_monotone);
}

TEST_CASE("knuckle paths on the rescaled clip stay in B_2 with one per sheet") {
  const auto traj = frames(FlowMode::Rescaled, range(-8, -4, 0.5),
                           [](double tau) { return sample_rescaled(ExactFamily::paper_clip(), tau, 512); });
  for (const auto& f : traj.frames) {
    const auto rep = detect_critical(distance_profile(f.curve, {0, 0}));
    REQUIRE(rep.knuckles.size() == 2);
    int left = 0, right = 0;
    for (auto k : rep.knuckles) {
      CHECK(norm(f.curve[k]) < 2);
      (f.curve[k].x > 0 ? right : left)++;
    }
    CHECK(left == 1);
    CHECK(right == 1);
  }
}

TEST_CASE("shrinking circle: flat distance profile passes with slack") {
  const auto traj = frames(FlowMode::Physical, range(-1, -0.2, 0.1),
                           [](double t) { return sample(ExactFamily::circle(), t, 256); });
  const auto paths = track_paths(traj, PathKind::Knuckle);
  const auto check = extremum_path_check(traj, paths, {0, 0}, 1e-6);
  CHECK(check.phi_monotone);
}

TEST_CASE("ellipse to circle: vertex paths only disappear") {
  EvolveControls ec;
  ec.dt_max = 1e-4;
  ec.save_interval = 0.05;
  ec.step.n = 256;
  const auto traj = evolve({ellipse(2, 1, 256), 0.0, FlowMode::Physical}, 1.2, ec, false);
  const auto sharp = track_paths(traj, PathKind::SharpVertex);
  const auto flat = track_paths(traj, PathKind::FlatVertex);
  CHECK(sharp.paths.size() == 2);
  CHECK(flat.paths.size() == 2);
  for (const auto* set : {&sharp, &flat})
    for (const auto& p : set->paths) CHECK(p.birth == 0);
}

TEST_CASE("osculating centre classification") {
  const auto c = sample(ExactFamily::circle(), -0.5, 64);
  CHECK(classify_center(c, 3, 2.0) == CenterClass::LocalMax);
  CHECK(classify_center(c, 3, 0.5) == CenterClass::LocalMin);
  CHECK(classify_center(c, 3, 1.0) == CenterClass::OsculatingDegenerate);
  CHECK_ERROR_CODE(classify_center(segment({0, 0}, {1, 0}, 16), 5, 1.0), ErrorCode::ZeroCurvature);
}
