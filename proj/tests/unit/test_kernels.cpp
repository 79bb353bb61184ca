#include "support.hpp"

#include <random>

#include "csflab/kernels.hpp"

using namespace csflab;
namespace k = csflab::kernels;

namespace {

struct Cloud {
  std::vector<double> x, y, w;
  k::WeightedPoints view() const { return {x, y, w}; }
};

Cloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-3, 3), W(0, 1);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x.push_back(U(rng));
    c.y.push_back(U(rng));
    c.w.push_back(W(rng));
  }
  return c;
}

double oracle_gaussian(const Cloud& c, double cx, double cy, double inv4l, const k::CubicCutoff& cut) {
  long double s = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    const double d2 = (c.x[i] - cx) * (c.x[i] - cx) + (c.y[i] - cy) * (c.y[i] - cy);
    double psi = 1;
    if (cut.enabled) psi = std::pow(std::max(0.0, 1 - (d2 - cut.shift) * cut.inv_r2), 3);
    s += c.w[i] * std::exp(-d2 * inv4l) * psi;
  }
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("scalar kernels match direct sums") {
  const auto& t = k::table_for(k::Backend::Scalar);
  for (std::size_t n : {0u, 1u, 7u, 1000u}) {
    const auto c = random_cloud(n, n + 1);
    for (k::CubicCutoff cut : {k::CubicCutoff{}, k::CubicCutoff{true, 0.2, 0.5}}) {
      const double ref = oracle_gaussian(c, 0.3, -0.2, 0.7, cut);
      CHECK(std::abs(t.gaussian_sum(c.view(), 0.3, -0.2, 0.7, cut) - ref) <= 1e-12 * std::max(1.0, ref));
    }
    double dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += c.w[i] * c.x[i] * c.y[i];
    CHECK(std::abs(t.weighted_dot(c.w, c.x, c.y) - dot) < 1e-11);
  }
}

TEST_CASE("menger curvature of circle samples is exact") {
  const std::size_t n = 37;
  const double R = 2.5;
  std::vector<double> x(n + 2), y(n + 2), kap(n), edge(n);
  for (std::size_t i = 0; i < n + 2; ++i) {
    const double a = 2 * support::pi * (static_cast<double>(i) - 1) / n;
    x[i] = R * std::cos(a);
    y[i] = R * std::sin(a);
  }
  k::table_for(k::Backend::Scalar).menger_curvature(x, y, {kap, edge});
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(kap[i] == doctest::Approx(1 / R).epsilon(1e-12));
    CHECK(edge[i] == doctest::Approx(2 * R * std::sin(support::pi / n)).epsilon(1e-12));
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!k::avx2_supported()) {
    MESSAGE("AVX2 not available; equivalence skipped");
    CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2), std::invalid_argument);
    return;
  }
  const auto& s = k::table_for(k::Backend::Scalar);
  const auto& v = k::table_for(k::Backend::Avx2);
  // Sizes straddle the 4-lane width so remainder loops are exercised.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 257u, 4099u}) {
    const auto c = random_cloud(n, 100 + n);
    for (k::CubicCutoff cut : {k::CubicCutoff{}, k::CubicCutoff{true, 0.15, -0.3}, k::CubicCutoff{true, 2.0, 0.0}}) {
      for (double inv4l : {0.01, 1.0, 50.0}) {
        const double a = s.gaussian_sum(c.view(), 0.1, 0.4, inv4l, cut);
        const double b = v.gaussian_sum(c.view(), 0.1, 0.4, inv4l, cut);
        CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a)) + 1e-300);
      }
    }
    const double a = s.weighted_dot(c.w, c.x, c.y), b = v.weighted_dot(c.w, c.x, c.y);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));

    if (n == 0) continue;
    std::vector<double> xp(n + 2), yp(n + 2);
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> U(-1, 1);
    for (std::size_t i = 0; i < n + 2; ++i) {
      xp[i] = static_cast<double>(i) + 0.3 * U(rng);
      yp[i] = U(rng);
    }
    std::vector<double> k1(n), e1(n), k2(n), e2(n);
    s.menger_curvature(xp, yp, {k1, e1});
    v.menger_curvature(xp, yp, {k2, e2});
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(k1[i] - k2[i]) <= 1e-12 * std::max(1.0, std::abs(k1[i])));
      CHECK(std::abs(e1[i] - e2[i]) <= 1e-14 * e1[i]);
    }
  }
}

TEST_CASE("backend switch changes results only at round-off") {
  const auto before = k::active_backend();
  const auto e = support::ellipse(2, 1, 300);
  k::set_backend(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);
  const auto ks = curvature(e);
  const double ls = e.length();
  if (k::avx2_supported()) {
    k::set_backend(k::Backend::Avx2);
    const auto kv = curvature(e);
    for (std::size_t i = 0; i < ks.size(); ++i) CHECK(std::abs(ks[i] - kv[i]) < 1e-12);
    CHECK(std::abs(e.length() - ls) < 1e-12);
  }
  k::set_backend(before);
  CHECK(k::to_string(k::Backend::Scalar) == "scalar");
}
