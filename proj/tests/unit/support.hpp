#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "csflab/error.hpp"
#include "csflab/exact.hpp"
#include "csflab/flow.hpp"
#include "csflab/geometry.hpp"

namespace support {

using csflab::DiscreteCurve;
using csflab::Vec2;
constexpr double pi = std::numbers::pi;

inline DiscreteCurve circle(double r, std::size_t n, Vec2 c = {}) {
  std::vector<Vec2> p;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2 * pi * static_cast<double>(k) / static_cast<double>(n);
    p.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return DiscreteCurve(std::move(p), true);
}

inline DiscreteCurve ellipse(double ax, double by, std::size_t n) {
  std::vector<Vec2> p;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2 * pi * static_cast<double>(k) / static_cast<double>(n);
    p.push_back({ax * std::cos(a), by * std::sin(a)});
  }
  return DiscreteCurve(std::move(p), true);
}

inline DiscreteCurve segment(Vec2 a, Vec2 b, std::size_t n) {
  std::vector<Vec2> p;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n - 1);
    p.push_back(a + s * (b - a));
  }
  return DiscreteCurve(std::move(p), false);
}

// Graph x -> (x, f(x)) on [a, b].
template <class F>
DiscreteCurve graph(F f, double a, double b, std::size_t n) {
  std::vector<Vec2> p;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    p.push_back({x, f(x)});
  }
  return DiscreteCurve(std::move(p), false);
}

// Trajectory made of exact frames (no simulation).
template <class Make>
csflab::FlowTrajectory frames(csflab::FlowMode mode, const std::vector<double>& times, Make make) {
  csflab::FlowTrajectory traj;
  traj.mode = mode;
  for (double t : times) traj.frames.push_back({make(t).with_time(t), t, mode});
  return traj;
}

inline std::vector<double> range(double a, double b, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::lround((b - a) / step));
  for (int k = 0; k <= n; ++k) v.push_back(a + step * k);
  return v;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

#define CHECK_ERROR_CODE(expr, code_)                   \
  do {                                                  \
    bool thrown_ = false;                               \
    try {                                               \
      (void)(expr);                                     \
    } catch (const csflab::Error& e_) {                 \
      thrown_ = true;                                   \
      CHECK_MESSAGE(e_.code() == (code_), e_.what());   \
    }                                                   \
    CHECK_MESSAGE(thrown_, "expected csflab::Error");   \
  } while (0)

}  // namespace support
