#include "csflab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csflab/error.hpp"
#include "csflab/parallel.hpp"

namespace csflab {

std::string_view to_string(PathKind k) {
  switch (k) {
    case PathKind::Tip: return "tip";
    case PathKind::Knuckle: return "knuckle";
    case PathKind::SharpVertex: return "sharp_vertex";
    case PathKind::FlatVertex: return "flat_vertex";
    case PathKind::Inflection: return "inflection";
  }
  return "?";
}

std::string_view to_string(CenterClass c) {
  switch (c) {
    case CenterClass::LocalMax: return "local_max";
    case CenterClass::LocalMin: return "local_min";
    case CenterClass::OsculatingDegenerate: return "osculating_degenerate";
  }
  return "?";
}

namespace {

// Consecutive above-floor samples `first`, `last` (last may exceed n on a
// periodic wrap) and their signs. Sub-floor samples in between have no sign.
struct SignEvent {
  std::size_t first = 0;
  std::size_t last = 0;
  int from = 0;
  int to = 0;
  bool crossing() const { return from != to; }
  std::size_t gap() const { return last - first - 1; }
};

struct SignScan {
  std::vector<SignEvent> events;  // crossings and same-sign sub-floor excursions
  bool all_subfloor = false;
};

SignScan scan_signs(const std::vector<double>& v, double floor, bool periodic) {
  SignScan out;
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > floor) s.push_back(i);
  if (s.empty()) {
    out.all_subfloor = true;
    return out;
  }
  auto sign = [&](std::size_t i) { return v[i % v.size()] > 0 ? 1 : -1; };
  auto add = [&](std::size_t a, std::size_t b) {
    SignEvent e{a, b, sign(a), sign(b)};
    if (e.crossing() || b > a + 1) out.events.push_back(e);
  };
  for (std::size_t k = 0; k + 1 < s.size(); ++k) add(s[k], s[k + 1]);
  if (periodic) add(s.back(), s.front() + v.size());
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class Better>
std::size_t best_in(std::size_t first, std::size_t last, std::size_t n, Better better) {
  std::size_t best = first % n;
  for (std::size_t i = first + 1; i <= last; ++i)
    if (better(i % n, best)) best = i % n;
  return best;
}

// Middle sample of a sub-floor plateau (wrapped index).
std::size_t plateau_middle(const SignEvent& e, std::size_t n) { return ((e.first + e.last) / 2) % n; }

double phi_floor(const DistanceProfile& p) {
  double r = 0.0;
  for (double v : p.phi) r = std::max(r, v - 2.0 * p.t);
  return 1e-10 * 2.0 * std::sqrt(std::max(r, 0.0)) + 1e-300;
}

struct VertexFloors {
  double kappa_s;
  double kappa;
};

VertexFloors vertex_floors(const FrameData& f, const VertexTolerance& tol) {
  const double mk = max_abs(f.kappa);
  return {std::max(tol.rel * max_abs(f.kappa_s), tol.abs * mk * mk) + 1e-300, tol.rel * mk + 1e-300};
}

bool cyclic_between(std::size_t a, std::size_t b, std::size_t x, bool closed) {
  if (!closed || a < b) return a < x && x < b;
  if (a == b) return x != a;
  return x > a || x < b;  // wraps
}

void sort_unique(std::vector<std::size_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

DistanceProfile distance_profile(const DiscreteCurve& curve, Vec2 x0, double t) {
  const FrameData f = compute_frame(curve);
  DistanceProfile p;
  p.x0 = x0;
  p.t = t;
  p.closed = curve.closed();
  p.arclength = f.arclength;
  const std::size_t n = curve.size();
  p.phi.resize(n);
  p.phi_s.resize(n);
  p.phi_ss.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = curve[i] - x0;
    p.phi[i] = dot(d, d) + 2.0 * t;
    p.phi_s[i] = 2.0 * dot(d, f.tangent[i]);
    p.phi_ss[i] = 2.0 + 2.0 * f.kappa[i] * dot(d, f.normal[i]);
  }
  return p;
}

CriticalReport detect_critical(const DistanceProfile& p, double multiple_tol) {
  const std::size_t n = p.phi.size();
  const SignScan scan = scan_signs(p.phi_s, phi_floor(p), p.closed);
  if (scan.all_subfloor)
    throw Error(ErrorCode::DegenerateProfile, "phi_s vanishes identically (curve is a circle about x0)");
  CriticalReport r;
  struct Crit {
    std::size_t index;
    bool tip;
    Multiplicity m;
  };
  std::vector<Crit> crits;
  for (const SignEvent& e : scan.events) {
    if (!e.crossing()) continue;  // touching: phi_s returns to its sign, no extremum
    const bool tip = e.from > 0;
    const std::size_t idx = tip ? best_in(e.first, e.last, n, [&](auto a, auto b) { return p.phi[a] > p.phi[b]; })
                                : best_in(e.first, e.last, n, [&](auto a, auto b) { return p.phi[a] < p.phi[b]; });
    const bool multiple = std::abs(p.phi_ss[idx]) < multiple_tol || e.gap() >= 2;
    crits.push_back({idx, tip, multiple ? Multiplicity::Multiple : Multiplicity::Simple});
  }
  std::sort(crits.begin(), crits.end(), [](const Crit& a, const Crit& b) { return a.index < b.index; });
  for (const Crit& c : crits) {
    (c.tip ? r.tips : r.knuckles).push_back(c.index);
    (c.tip ? r.tip_multiplicity : r.knuckle_multiplicity).push_back(c.m);
  }

  // Fingers: arcs between consecutive knuckles containing a tip.
  const std::size_t k = r.knuckles.size();
  const std::size_t pairs = p.closed ? (k >= 1 ? k : 0) : (k >= 1 ? k - 1 : 0);
  for (std::size_t j = 0; j < pairs; ++j) {
    const std::size_t a = r.knuckles[j], b = r.knuckles[(j + 1) % k];
    for (std::size_t tip : r.tips) {
      if (cyclic_between(a, b, tip, p.closed)) {
        r.fingers.push_back({a, b, tip});
        break;
      }
    }
  }
  if (!p.closed && k >= 1) {
    r.tails.push_back({r.knuckles.front(), 0});
    r.tails.push_back({r.knuckles.back(), n - 1});
  }
  return r;
}

double finger_region_area(const DiscreteCurve& curve, const Finger& finger) {
  const std::size_t n = curve.size();
  const std::size_t a = finger.knuckle_a, b = finger.knuckle_b;
  if (a >= n || b >= n || finger.tip >= n)
    throw Error(ErrorCode::OutOfDomain, "finger index out of range");
  if (!curve.closed() && a >= b) throw Error(ErrorCode::OutOfDomain, "open-curve finger needs knuckle_a < knuckle_b");
  std::vector<Vec2> arc;
  for (std::size_t i = a;; i = (i + 1) % n) {
    arc.push_back(curve[i]);
    if (i == b && arc.size() > 1) break;
  }
  const Vec2 p = arc.front(), q = arc.back();
  // Chord against arc edges that do not touch the chord's end points.
  auto orient = [](Vec2 o, Vec2 u, Vec2 v) { return cross(u - o, v - o); };
  for (std::size_t i = 1; i + 2 < arc.size(); ++i) {
    const Vec2 c = arc[i], d = arc[i + 1];
    const double o1 = orient(p, q, c), o2 = orient(p, q, d);
    const double o3 = orient(c, d, p), o4 = orient(c, d, q);
    if (((o1 > 0) != (o2 > 0) || o1 == 0 || o2 == 0) && ((o3 > 0) != (o4 > 0) || o3 == 0 || o4 == 0) &&
        !(o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0))
      throw Error(ErrorCode::SelfCrossingChord, "chord between knuckles crosses the finger arc");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < arc.size(); ++i) s += cross(arc[i], arc[(i + 1) % arc.size()]);
  return 0.5 * std::abs(s);
}

VertexReport detect_vertices(const DiscreteCurve& curve, const VertexTolerance& tol) {
  const FrameData f = compute_frame(curve);
  const std::size_t n = curve.size();
  const VertexFloors fl = vertex_floors(f, tol);
  const SignScan ks = scan_signs(f.kappa_s, fl.kappa_s, curve.closed());
  if (ks.all_subfloor)
    throw Error(ErrorCode::DegenerateVertexSet, "kappa_s vanishes identically; vertices are not isolated");
  VertexReport r;
  auto absk = [&](std::size_t i) { return std::abs(f.kappa[i]); };
  for (const SignEvent& e : ks.events) {
    if (!e.crossing()) {
      r.bumpy = false;  // kappa_s touches zero without changing sign
      continue;
    }
    const std::size_t mid = (e.gap() > 0) ? plateau_middle(e, n) : e.first % n;
    const double kmid = f.kappa[mid] != 0.0 ? f.kappa[mid] : f.kappa[e.first % n];
    const bool kappa_max = e.from > 0;  // kappa_s + -> -
    const bool sharp = (kappa_max == (kmid > 0));
    if (sharp) {
      r.sharp.push_back(best_in(e.first, e.last, n, [&](auto a, auto b) { return absk(a) > absk(b); }));
    } else if (e.gap() >= 2) {
      r.flat.push_back(plateau_middle(e, n));
    } else {
      r.flat.push_back(best_in(e.first, e.last, n, [&](auto a, auto b) { return absk(a) < absk(b); }));
    }
  }
  const SignScan kz = scan_signs(f.kappa, fl.kappa, curve.closed());
  for (const SignEvent& e : kz.events) {
    if (!e.crossing()) continue;  // same-sign sub-floor run: small curvature, not an inflection
    const std::size_t idx = best_in(e.first, e.last, n, [&](auto a, auto b) { return absk(a) < absk(b); });
    r.inflections.push_back(idx);
    if (std::abs(f.kappa_s[idx]) <= fl.kappa_s && e.gap() == 0) r.bumpy = false;
  }
  sort_unique(r.sharp);
  sort_unique(r.flat);
  sort_unique(r.inflections);

  const std::size_t m = r.sharp.size();
  const std::size_t pairs = curve.closed() ? m : (m >= 1 ? m - 1 : 0);
  for (std::size_t j = 0; j < pairs; ++j) {
    const std::size_t a = r.sharp[j], b = r.sharp[(j + 1) % m];
    r.edges.emplace_back(a, b);
    auto inside = [&](const std::vector<std::size_t>& v) {
      return std::count_if(v.begin(), v.end(), [&](std::size_t x) { return cyclic_between(a, b, x, curve.closed()); });
    };
    const bool same = (f.kappa[a] > 0) == (f.kappa[b] > 0);
    const auto infl = inside(r.inflections), flat = inside(r.flat);
    if (same ? (flat != 1 || infl % 2 != 0) : (infl != 1)) r.edges_ok = false;
  }
  return r;
}

namespace {

ZeroCount count_events(const std::vector<double>& v, bool periodic, double tol) {
  const SignScan s = scan_signs(v, tol, periodic);
  ZeroCount z;
  for (const SignEvent& e : s.events) {
    if (e.crossing()) {
      ++z.count;
      if (e.gap() >= 2) z.multiple = true;
    } else {
      z.multiple = true;
    }
  }
  if (s.all_subfloor) z.multiple = true;
  return z;
}

}  // namespace

ZeroCount count_zeros(const std::vector<double>& v, ZeroBoundary boundary, double tol) {
  if (v.empty()) return {};
  if (tol < 0.0) tol = 1e-9 * max_abs(v);
  if (boundary == ZeroBoundary::Nonvanishing && (std::abs(v.front()) <= tol || std::abs(v.back()) <= tol))
    throw Error(ErrorCode::BoundaryViolated, "samples vanish at the boundary");
  return count_events(v, boundary == ZeroBoundary::Periodic, tol);
}

ZeroMonotonicity zero_monotonicity_check(const FlowTrajectory& traj, ZeroField field, Vec2 x0) {
  ZeroMonotonicity out;
  const std::size_t nf = traj.frames.size();
  out.time.resize(nf);
  out.counts.resize(nf);
  out.multiple.assign(nf, false);
  std::vector<char> mult(nf, 0);
  parallel_for(nf, [&](std::size_t k) {
    const FlowState& s = traj.frames[k];
    out.time[k] = s.time;
    ZeroCount z;
    if (field == ZeroField::PhiS) {
      const DistanceProfile p = distance_profile(s.curve, x0, s.time);
      z = count_events(p.phi_s, s.curve.closed(), phi_floor(p));
    } else {
      const FrameData f = compute_frame(s.curve);
      const VertexFloors fl = vertex_floors(f, {});
      z = field == ZeroField::Kappa ? count_events(f.kappa, s.curve.closed(), fl.kappa)
                                    : count_events(f.kappa_s, s.curve.closed(), fl.kappa_s);
    }
    out.counts[k] = z.count;
    mult[k] = z.multiple;
  });
  for (std::size_t k = 0; k < nf; ++k) out.multiple[k] = mult[k] != 0;
  for (std::size_t k = 0; k + 1 < nf; ++k)
    if (out.counts[k + 1] > out.counts[k]) out.violations.push_back(k);
  return out;
}

std::vector<std::size_t> heat_zero_counts(const std::vector<double>& u0, double t_end, std::size_t frames) {
  const std::size_t n = u0.size();
  if (n < 3 || frames < 2 || !(t_end > 0.0)) throw Error(ErrorCode::OutOfDomain, "heat_zero_counts needs n >= 3, frames >= 2, t_end > 0");
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double frame_dt = t_end / static_cast<double>(frames - 1);
  const auto sub = static_cast<std::size_t>(std::ceil(frame_dt / (0.25 * h * h)));
  const double dt = frame_dt / static_cast<double>(sub);
  const double mu = dt / (h * h);
  std::vector<double> u = u0, next(n);
  std::vector<std::size_t> counts;
  counts.push_back(count_zeros(u, ZeroBoundary::Periodic).count);
  for (std::size_t f = 1; f < frames; ++f) {
    for (std::size_t s = 0; s < sub; ++s) {
      for (std::size_t i = 0; i < n; ++i)
        next[i] = u[i] + mu * (u[(i + n - 1) % n] - 2.0 * u[i] + u[(i + 1) % n]);
      u.swap(next);
    }
    counts.push_back(count_zeros(u, ZeroBoundary::Periodic).count);
  }
  return counts;
}

namespace {

std::vector<std::size_t> candidates(const FlowState& s, PathKind kind, Vec2 x0) {
  try {
    if (kind == PathKind::Tip || kind == PathKind::Knuckle) {
      const CriticalReport r = detect_critical(distance_profile(s.curve, x0, s.time));
      return kind == PathKind::Tip ? r.tips : r.knuckles;
    }
    const VertexReport v = detect_vertices(s.curve);
    if (kind == PathKind::SharpVertex) return v.sharp;
    if (kind == PathKind::FlatVertex) return v.flat;
    return v.inflections;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateProfile || e.code() == ErrorCode::DegenerateVertexSet) return {};
    throw;
  }
}

double max_point_speed(const FlowState& s, FlowMode mode) {
  const FrameData f = compute_frame(s.curve);
  double v = 0.0;
  for (std::size_t i = 0; i < s.curve.size(); ++i) {
    double sp = f.kappa[i];
    if (mode == FlowMode::Rescaled) sp += 0.5 * dot(s.curve[i], f.normal[i]);
    v = std::max(v, std::abs(sp));
  }
  return v;
}

}  // namespace

PathSet track_paths(const FlowTrajectory& traj, PathKind kind, Vec2 x0) {
  PathSet set;
  set.kind = kind;
  const std::size_t nf = traj.frames.size();
  std::vector<std::vector<std::size_t>> cand(nf);
  std::vector<std::vector<double>> frac(nf);
  std::vector<double> speed(nf);
  parallel_for(nf, [&](std::size_t k) {
    const FlowState& s = traj.frames[k];
    cand[k] = candidates(s, kind, x0);
    const FrameData f = compute_frame(s.curve);
    for (std::size_t i : cand[k]) frac[k].push_back(f.arclength[i] / f.total_length);
    speed[k] = max_point_speed(s, traj.mode);
  });

  std::vector<std::size_t> live;  // path ids alive at the previous frame
  auto new_path = [&](std::size_t frame, std::size_t idx) {
    CriticalPath p;
    p.id = static_cast<int>(set.paths.size());
    p.kind = kind;
    p.birth = frame;
    p.death = frame + 1;
    p.index.assign(nf, std::nullopt);
    p.index[frame] = idx;
    set.paths.push_back(std::move(p));
    return set.paths.size() - 1;
  };
  if (nf == 0) return set;
  for (std::size_t i : cand[0]) live.push_back(new_path(0, i));

  for (std::size_t k = 1; k < nf; ++k) {
    const DiscreteCurve& prev = traj.frames[k - 1].curve;
    const DiscreteCurve& cur = traj.frames[k].curve;
    const bool closed = cur.closed();
    const double dt = std::abs(traj.frames[k].time - traj.frames[k - 1].time);
    const double gate = 5.0 * std::max(speed[k - 1], speed[k]) * dt + 2.0 * std::max(prev.max_edge(), cur.max_edge());
    struct Pair {
      double d;
      std::size_t path;
      std::size_t c;
    };
    std::vector<Pair> pairs;
    for (std::size_t pid : live) {
      const std::size_t pi = *set.paths[pid].index[k - 1];
      const auto pos = std::find(cand[k - 1].begin(), cand[k - 1].end(), pi) - cand[k - 1].begin();
      const double fp = frac[k - 1][static_cast<std::size_t>(pos)];
      for (std::size_t c = 0; c < cand[k].size(); ++c) {
        double d = std::abs(frac[k][c] - fp);
        if (closed) d = std::min(d, 1.0 - d);
        if (norm(cur[cand[k][c]] - prev[pi]) > gate) continue;
        pairs.push_back({d, pid, c});
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      return a.d < b.d || (a.d == b.d && a.c < b.c);
    });
    for (std::size_t j = 0; j + 1 < pairs.size(); ++j)
      if (pairs[j + 1].d - pairs[j].d <= 1e-9 && (pairs[j + 1].path == pairs[j].path || pairs[j + 1].c == pairs[j].c)) {
        set.ambiguous_frames.push_back(k);
        break;
      }
    std::vector<bool> path_done(set.paths.size(), false), cand_done(cand[k].size(), false);
    std::vector<std::size_t> next_live;
    for (const Pair& p : pairs) {
      if (path_done[p.path] || cand_done[p.c]) continue;
      path_done[p.path] = cand_done[p.c] = true;
      set.paths[p.path].index[k] = cand[k][p.c];
      set.paths[p.path].death = k + 1;
      next_live.push_back(p.path);
    }
    for (std::size_t c = 0; c < cand[k].size(); ++c)
      if (!cand_done[c]) next_live.push_back(new_path(k, cand[k][c]));
    live = std::move(next_live);
  }
  return set;
}

namespace {

// Extremal value of phi near vertex i from the parabola through i-1, i, i+1.
double refined_phi(const DistanceProfile& p, std::size_t i, double total_length) {
  const std::size_t n = p.phi.size();
  if (!p.closed && (i == 0 || i + 1 == n)) return p.phi[i];
  const std::size_t a = (i + n - 1) % n, b = (i + 1) % n;
  double sa = p.arclength[a] - p.arclength[i], sb = p.arclength[b] - p.arclength[i];
  if (sa > 0) sa -= total_length;
  if (sb < 0) sb += total_length;
  const double fa = p.phi[a] - p.phi[i], fb = p.phi[b] - p.phi[i];
  // f(s) = c1 s + c2 s^2 through (sa, fa), (sb, fb)
  const double det = sa * sb * (sb - sa);
  if (det == 0.0) return p.phi[i];
  const double c2 = (fb * sa - fa * sb) / det;
  const double c1 = (fa * sb * sb - fb * sa * sa) / det;
  if (c2 == 0.0) return p.phi[i];
  const double s = -c1 / (2.0 * c2);
  if (s < sa || s > sb) return p.phi[i];
  return p.phi[i] + c1 * s + c2 * s * s;
}

}  // namespace

ExtremumPathCheck extremum_path_check(const FlowTrajectory& traj, const PathSet& paths, Vec2 x0, double slack) {
  if (traj.mode != FlowMode::Physical)
    throw Error(ErrorCode::OutOfDomain, "extremum_path_check expects a physical-time trajectory");
  ExtremumPathCheck out;
  if (paths.kind != PathKind::Tip && paths.kind != PathKind::Knuckle) return out;
  const bool knuckle = paths.kind == PathKind::Knuckle;
  for (const CriticalPath& path : paths.paths) {
    double prev_phi = 0.0, prev_scaled = 0.0;
    bool have = false;
    for (std::size_t k = path.birth; k < path.death; ++k) {
      if (!path.index[k]) {
        have = false;
        continue;
      }
      const FlowState& s = traj.frames[k];
      if (!(s.time < 0.0)) throw Error(ErrorCode::OutOfDomain, "extremum_path_check needs t < 0");
      const DistanceProfile p = distance_profile(s.curve, x0, s.time);
      const double total = compute_frame(s.curve).total_length;
      const double phi = refined_phi(p, *path.index[k], total);
      const double scaled = (phi - 2.0 * s.time) / (-s.time);
      if (have) {
        const double dphi = knuckle ? prev_phi - phi : phi - prev_phi;
        if (dphi > slack) out.phi_monotone = false;
        out.worst_phi_violation = std::max(out.worst_phi_violation, dphi);
        if (knuckle) {
          const double ds = prev_scaled - scaled;
          if (ds > slack) out.scaled_monotone = false;
          out.worst_scaled_violation = std::max(out.worst_scaled_violation, ds);
        }
      }
      prev_phi = phi;
      prev_scaled = scaled;
      have = true;
    }
  }
  return out;
}

CenterClass classify_center(const DiscreteCurve& curve, std::size_t s0, double beta) {
  if (s0 >= curve.size()) throw Error(ErrorCode::OutOfDomain, "vertex index out of range");
  const FrameData f = compute_frame(curve);
  const double k = f.kappa[s0];
  if (beta != 0.0 && std::abs(k) * curve.extent() < 1e-12)
    throw Error(ErrorCode::ZeroCurvature, "curvature vanishes at the requested vertex");
  const Vec2 x0 = beta == 0.0 ? curve[s0] : curve[s0] + (beta / k) * f.normal[s0];
  const Vec2 d = curve[s0] - x0;
  const double phi_ss = 2.0 + 2.0 * k * dot(d, f.normal[s0]);
  if (std::abs(phi_ss) < 1e-8) return CenterClass::OsculatingDegenerate;
  return phi_ss > 0 ? CenterClass::LocalMin : CenterClass::LocalMax;
}

}  // namespace csflab
