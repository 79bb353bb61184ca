#include "csflab/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "csflab/error.hpp"

namespace csflab {

std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Circle: return "circle";
    case FamilyKind::Line: return "line";
    case FamilyKind::GrimReaper: return "grim_reaper";
    case FamilyKind::PaperClip: return "paper_clip";
  }
  return "unknown";
}

FamilyKind family_from_string(std::string_view name) {
  if (name == "circle") return FamilyKind::Circle;
  if (name == "line") return FamilyKind::Line;
  if (name == "grim_reaper" || name == "grim-reaper") return FamilyKind::GrimReaper;
  if (name == "paper_clip" || name == "paper-clip") return FamilyKind::PaperClip;
  throw Error(ErrorCode::InvalidCurve, "unknown family '" + std::string(name) + "'");
}

void check_domain(const ExactFamily& f, double t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::OutOfDomain, "non-finite time");
  if ((f.kind == FamilyKind::Circle || f.kind == FamilyKind::PaperClip) && t >= 0.0)
    throw Error(ErrorCode::OutOfDomain, std::string(to_string(f.kind)) + " requires t < 0");
  if (f.kind == FamilyKind::GrimReaper && !(f.window > 0.0 && f.window < std::numbers::pi / 2))
    throw Error(ErrorCode::OutOfDomain, "grim reaper window must lie in (0, pi/2)");
}

namespace {


double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// arccosh(e^L) for L >= 0 without forming e^L.
double acosh_exp(double L) { return L + std::log1p(std::sqrt(-std::expm1(-2.0 * L))); }

constexpr std::array<double, 8> kGx{-0.9602898564975363, -0.7966664774136267,
                                    -0.5255324099163290, -0.1834346424956498,
                                    0.1834346424956498,  0.5255324099163290,
                                    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGw{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                    0.2223810344533745, 0.1012285362903763};

// One quarter of the paper clip, from the knuckle (x_k, 0) to the tip
// (0, y_max), parameterized by w in [0, 2]. On [0, 1] x is a function of y
// (y graded toward the switch point), on [1, 2] y is a function of x.
class PaperClipQuarter {
 public:
  PaperClipQuarter(double t, std::size_t nodes = 4096) : t_(t) {
    xk_ = std::acos(std::exp(t));
    xs_ = 0.5 * xk_;
    ys_ = acosh_exp(-t + std::log(std::cos(xs_)));
    d0_ = std::min(1e-3, ys_ / 100.0);
    alpha_ = std::log1p(ys_ / d0_);
    scale_ = 1.0 / std::sqrt(-std::expm1(2.0 * t));

    w_.resize(2 * nodes + 1);
    for (std::size_t i = 0; i <= 2 * nodes; ++i)
      w_[i] = static_cast<double>(i) / static_cast<double>(nodes);
    s_.assign(w_.size(), 0.0);
    for (std::size_t i = 1; i < w_.size(); ++i) {
      double acc = 0.0;
      const double a = w_[i - 1], b = w_[i];
      for (std::size_t k = 0; k < kGx.size(); ++k) {
        const double w = 0.5 * (a + b) + 0.5 * (b - a) * kGx[k];
        acc += kGw[k] * speed(w);
      }
      s_[i] = s_[i - 1] + 0.5 * (b - a) * acc;
    }
  }

  double length() const { return s_.back(); }
  const std::vector<double>& arc() const { return s_; }
  const std::vector<double>& params() const { return w_; }

  Vec2 point(double w) const {
    if (w <= 1.0) {
      const double y = ys_ - d0_ * std::expm1(alpha_ * (1.0 - w));
      return {std::acos(std::exp(t_ + log_cosh(y))), std::max(y, 0.0)};
    }
    const double x = xs_ * (2.0 - w);
    return {std::max(x, 0.0), acosh_exp(-t_ + std::log(std::cos(x)))};
  }

  // cos x / sqrt(1 - e^{2t}), cos x taken from e^t cosh y on the first piece
  double curvature(double w) const {
    if (w <= 1.0) {
      const double y = ys_ - d0_ * std::expm1(alpha_ * (1.0 - w));
      return std::exp(t_ + log_cosh(y)) * scale_;
    }
    return std::cos(xs_ * (2.0 - w)) * scale_;
  }

  // |d kappa / ds| = sin x cos x |tanh y| / (1 - e^{2t})
  double curvature_s(double w) const {
    const Vec2 p = point(w);
    const double c = w <= 1.0 ? std::exp(t_ + log_cosh(p.y)) : std::cos(p.x);
    const double sn = std::sqrt(std::max(0.0, (1.0 - c) * (1.0 + c)));
    return sn * c * std::tanh(p.y) * scale_ * scale_;
  }

  // |d point / d w|
  double speed(double w) const {
    if (w <= 1.0) {
      const double dist = d0_ * std::expm1(alpha_ * (1.0 - w));
      const double dy = alpha_ * (dist + d0_);
      const double y = ys_ - dist;
      const double c = std::exp(t_ + log_cosh(y));
      const double dxdy = std::tanh(y) * c / std::sqrt((1.0 - c) * (1.0 + c));
      return dy * std::sqrt(1.0 + dxdy * dxdy);
    }
    const double x = xs_ * (2.0 - w);
    const double L = -t_ + std::log(std::cos(x));
    const double dydx = std::tan(x) / std::sqrt(-std::expm1(-2.0 * L));
    return xs_ * std::sqrt(1.0 + dydx * dydx);
  }

  double param_at(double s) const {
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    if (i + 1 >= s_.size()) return w_.back();
    // one Newton correction on top of the linear guess
    double w = w_[i] + (s - s_[i]) / (s_[i + 1] - s_[i]) * (w_[i + 1] - w_[i]);
    double acc = 0.0;
    const double a = w_[i];
    for (std::size_t k = 0; k < kGx.size(); ++k) {
      const double u = 0.5 * (a + w) + 0.5 * (w - a) * kGx[k];
      acc += kGw[k] * speed(u);
    }
    const double sw = s_[i] + 0.5 * (w - a) * acc;
    w -= (sw - s) / speed(w);
    return std::clamp(w, w_[i], w_[i + 1]);
  }

 private:
  double t_, xk_, xs_, ys_, d0_, alpha_, scale_;
  std::vector<double> w_, s_;
};

// Arc-length positions in [0, S) with spacing following h (given on the
// nodes s), after a grading sweep; the count per segment is an integer so a
// segment end lands on a point.
std::vector<double> place_by_density(const std::vector<double>& s, std::vector<double> h,
                                     double grading) {
  const std::size_t m = s.size();
  for (std::size_t k = 1; k < m; ++k) h[k] = std::min(h[k], h[k - 1] + grading * (s[k] - s[k - 1]));
  for (std::size_t k = m - 1; k-- > 0;) h[k] = std::min(h[k], h[k + 1] + grading * (s[k + 1] - s[k]));
  std::vector<double> cum(m, 0.0);
  for (std::size_t k = 1; k < m; ++k)
    cum[k] = cum[k - 1] + 0.5 * (s[k] - s[k - 1]) * (1.0 / h[k - 1] + 1.0 / h[k]);
  const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cum.back())));
  std::vector<double> out(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = cum.back() * static_cast<double>(k) / static_cast<double>(count);
    while (seg + 2 < m && cum[seg + 1] < target) ++seg;
    const double f = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out[k] = s[seg] + f * (s[seg + 1] - s[seg]);
  }
  return out;
}

double spacing_target(double kappa, double kappa_s, const AdaptiveSpacing& a) {
  const double k = std::max(std::abs(kappa), std::sqrt(std::abs(kappa_s)));
  return std::clamp(a.c / std::max(k, 1e-300), a.h_min, a.h_max);
}

Vec2 line_dir(const ExactFamily& f) { return {std::cos(f.angle), std::sin(f.angle)}; }

// Grim reaper by arc length from the tip: x = atan(sinh s).
Vec2 reaper_point(double s, double t) {
  const double x = std::atan(std::sinh(s));
  return {x, t + std::log(std::cosh(s))};  // -log cos x = log cosh s
}

DiscreteCurve assemble_paper_clip(const PaperClipQuarter& q, const std::vector<double>& quarter_s,
                                  double t) {
  const double lq = q.length();
  std::vector<Vec2> pts;
  pts.reserve(4 * quarter_s.size());
  // odd quadrants run tip -> knuckle: the tip, then the same arc positions reversed
  std::vector<double> rev{lq};
  for (std::size_t k = quarter_s.size(); k-- > 1;) rev.push_back(quarter_s[k]);
  for (int quad = 0; quad < 4; ++quad) {
    for (double s : quad % 2 == 0 ? quarter_s : rev) {
      Vec2 p = q.point(q.param_at(s));
      if (quad == 1 || quad == 2) p.x = -p.x;
      if (quad == 2 || quad == 3) p.y = -p.y;
      pts.push_back(p);
    }
  }
  return DiscreteCurve(std::move(pts), true, t);
}

}  // namespace

DiscreteCurve sample(const ExactFamily& f, double t, std::size_t n) {
  check_domain(f, t);
  if (n < DiscreteCurve::kMinPoints)
    throw Error(ErrorCode::InvalidCurve, "sample needs n >= 8");
  std::vector<Vec2> pts(n);
  const double dn = static_cast<double>(n);
  switch (f.kind) {
    case FamilyKind::Circle: {
      const double r = std::sqrt(-2.0 * t);
      for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / dn;
        pts[k] = {r * std::cos(a), r * std::sin(a)};
      }
      return DiscreteCurve(std::move(pts), true, t);
    }
    case FamilyKind::Line: {
      const Vec2 d = line_dir(f);
      const Vec2 base = f.offset * perp(d);
      for (std::size_t k = 0; k < n; ++k) {
        const double s = -f.half_length + 2.0 * f.half_length * static_cast<double>(k) / (dn - 1.0);
        pts[k] = base + s * d;
      }
      return DiscreteCurve(std::move(pts), false, t);
    }
    case FamilyKind::GrimReaper: {
      const double smax = std::asinh(std::tan(f.window));
      for (std::size_t k = 0; k < n; ++k) {
        const double s = -smax + 2.0 * smax * static_cast<double>(k) / (dn - 1.0);
        pts[k] = reaper_point(s, t);
      }
      if (n % 2 == 1) pts[n / 2] = {0.0, t};
      return DiscreteCurve(std::move(pts), false, t);
    }
    case FamilyKind::PaperClip: {
      const PaperClipQuarter q(t);
      const double total = 4.0 * q.length();
      const double lq = q.length();
      for (std::size_t k = 0; k < n; ++k) {
        const double s = total * static_cast<double>(k) / dn;
        const int quad = std::min(3, static_cast<int>(s / lq));
        const double r = s - quad * lq;
        Vec2 p = q.point(q.param_at(quad % 2 == 1 ? lq - r : r));
        if (quad == 1 || quad == 2) p.x = -p.x;
        if (quad == 2 || quad == 3) p.y = -p.y;
        pts[k] = p;
      }
      return DiscreteCurve(std::move(pts), true, t);
    }
  }
  throw Error(ErrorCode::InvalidCurve, "unknown family");
}

DiscreteCurve sample_adaptive(const ExactFamily& f, double t, const AdaptiveSpacing& a) {
  check_domain(f, t);
  switch (f.kind) {
    case FamilyKind::Circle: {
      const double r = std::sqrt(-2.0 * t);
      const double h = spacing_target(1.0 / r, 0.0, a);
      const auto n = std::max<std::size_t>(DiscreteCurve::kMinPoints,
                                           static_cast<std::size_t>(std::ceil(2 * std::numbers::pi * r / h)));
      return sample(f, t, n);
    }
    case FamilyKind::Line: {
      const auto n = std::max<std::size_t>(DiscreteCurve::kMinPoints,
                                           static_cast<std::size_t>(std::ceil(2 * f.half_length / a.h_max)) + 1);
      return sample(f, t, n);
    }
    case FamilyKind::GrimReaper: {
      // symmetric: place on s in [0, smax], mirror
      const double smax = std::asinh(std::tan(f.window));
      const std::size_t nodes = 8192;
      std::vector<double> s(nodes + 1), h(nodes + 1);
      for (std::size_t i = 0; i <= nodes; ++i) {
        s[i] = smax * static_cast<double>(i) / nodes;
        h[i] = spacing_target(1.0 / std::cosh(s[i]), std::tanh(s[i]) / std::cosh(s[i]), a);
      }
      std::vector<double> half = place_by_density(s, h, a.grading);
      std::vector<Vec2> pts{reaper_point(-smax, t)};
      for (std::size_t i = half.size(); i-- > 1;) pts.push_back(reaper_point(-half[i], t));
      for (double si : half) pts.push_back(reaper_point(si, t));
      pts.push_back(reaper_point(smax, t));
      if (pts.size() < DiscreteCurve::kMinPoints) return sample(f, t, DiscreteCurve::kMinPoints + 1);
      return DiscreteCurve(std::move(pts), false, t);
    }
    case FamilyKind::PaperClip: {
      const PaperClipQuarter q(t);
      const auto& w = q.params();
      std::vector<double> h(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) h[i] = spacing_target(q.curvature(w[i]), q.curvature_s(w[i]), a);
      std::vector<double> qs = place_by_density(q.arc(), h, a.grading);
      if (qs.size() < 2) qs = {0.0, 0.5 * q.length()};
      return assemble_paper_clip(q, qs, t);
    }
  }
  throw Error(ErrorCode::InvalidCurve, "unknown family");
}

DiscreteCurve sample_rescaled(const ExactFamily& f, double tau, std::size_t n) {
  const double t = -std::exp(-tau);
  return scaled(sample(f, t, n), std::exp(0.5 * tau)).with_time(tau);
}

DiscreteCurve sample_rescaled_adaptive(const ExactFamily& f, double tau, const AdaptiveSpacing& a) {
  const double t = -std::exp(-tau);
  const double up = std::exp(-0.5 * tau);
  AdaptiveSpacing phys = a;
  phys.h_min *= up;
  phys.h_max *= up;
  return scaled(sample_adaptive(f, t, phys), 1.0 / up).with_time(tau);
}

double exact_curvature(const ExactFamily& f, double t, Vec2 p) {
  switch (f.kind) {
    case FamilyKind::Circle: return 1.0 / std::sqrt(-2.0 * t);
    case FamilyKind::Line: return 0.0;
    case FamilyKind::GrimReaper: return std::cos(p.x);
    case FamilyKind::PaperClip:
      return std::exp(t + log_cosh(p.y)) / std::sqrt(-std::expm1(2.0 * t));
  }
  return 0.0;
}

double implicit_value(const ExactFamily& f, double t, Vec2 p) {
  switch (f.kind) {
    case FamilyKind::Circle: return norm(p) - std::sqrt(-2.0 * t);
    case FamilyKind::Line: return dot(p, perp(line_dir(f))) - f.offset;
    case FamilyKind::GrimReaper: return p.y - t + std::log(std::cos(p.x));
    case FamilyKind::PaperClip: return std::log(std::cos(p.x)) - t - log_cosh(p.y);
  }
  return 0.0;
}

Vec2 implicit_gradient(const ExactFamily& f, double, Vec2 p) {
  switch (f.kind) {
    case FamilyKind::Circle: return (1.0 / norm(p)) * p;
    case FamilyKind::Line: return perp(line_dir(f));
    case FamilyKind::GrimReaper: return {-std::tan(p.x), 1.0};
    case FamilyKind::PaperClip: return {-std::tan(p.x), -std::tanh(p.y)};
  }
  return {};
}

double flow_residual(const ExactFamily& f, double t, double dt, std::size_t n) {
  if (!(dt > 0.0)) throw Error(ErrorCode::OutOfDomain, "flow_residual needs dt > 0");
  check_domain(f, t);
  check_domain(f, t + dt);
  const DiscreteCurve c = sample(f, t, n);
  const FrameData fr = compute_frame(c);
  const double t1 = t + dt;
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2 p = c[i], nv = fr.normal[i];
    double d = 0.0;
    for (int it = 0; it < 30; ++it) {
      const Vec2 q = p + d * nv;
      const double g = implicit_value(f, t1, q);
      const double dg = dot(implicit_gradient(f, t1, q), nv);
      if (dg == 0.0) break;
      const double step = g / dg;
      d -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(d))) break;
    }
    worst = std::max(worst, std::abs(d / dt - fr.kappa[i]));
  }
  return worst;
}

}  // namespace csflab
