#pragma once

#include "number.hpp"

#include <algorithm>
#include <cassert>
#include <utility>
#include <vector>

namespace treepart {

// Non-decreasing piecewise-linear cumulative function on [0, inf).
// Value is 0 before the first point, linear between points, constant after the last.
// Two consecutive points with equal abscissa encode an upward jump (right-continuous).
template <class Num>
struct PLFn {
  struct Pt {
    Num t, y;
  };
  std::vector<Pt> pts;

  static PLFn step(const Num& w) {
    PLFn f;
    f.pts.push_back({Num(0), Num(0)});
    if (w != 0) f.pts.push_back({Num(0), w});
    return f;
  }

  bool empty() const { return pts.empty(); }
  Num total() const { return pts.empty() ? Num(0) : pts.back().y; }

  Num operator()(const Num& t) const {
    if (pts.empty() || t < pts.front().t) return Num(0);
    auto it = std::upper_bound(pts.begin(), pts.end(), t, [](const Num& x, const Pt& p) { return x < p.t; });
    if (it == pts.end()) return pts.back().y;
    const Pt& b = *it;
    const Pt& a = *(it - 1);
    if (a.t == b.t) return a.y;
    return a.y + (b.y - a.y) * (t - a.t) / (b.t - a.t);
  }

  // Earliest time the final value is reached.
  Num completion() const {
    if (pts.empty()) return Num(0);
    const Num tot = pts.back().y;
    if (tot == 0 || near_eq(tot, Num(0))) return Num(0);
    for (const Pt& p : pts)
      if (p.y == tot || near_eq(p.y, tot)) return p.t;
    return pts.back().t;
  }
};

namespace detail {

template <class Num>
bool collinear(const typename PLFn<Num>::Pt& a, const typename PLFn<Num>::Pt& b,
               const typename PLFn<Num>::Pt& c) {
  if (a.t == b.t || b.t == c.t) return false;
  Num lhs = (b.y - a.y) * (c.t - b.t);
  Num rhs = (c.y - b.y) * (b.t - a.t);
  if constexpr (num_traits<Num>::exact) {
    return lhs == rhs;
  } else {
    double scale = std::max({1.0, std::abs(to_double(lhs)), std::abs(to_double(rhs))});
    return std::abs(to_double(lhs - rhs)) <= 1e-12 * scale;
  }
}

}  // namespace detail

// Drops repeated points, interior collinear points and a trailing flat tail.
template <class Num>
void canonicalize(PLFn<Num>& f) {
  using Pt = typename PLFn<Num>::Pt;
  std::vector<Pt> out;
  out.reserve(f.pts.size());
  for (const Pt& p : f.pts) {
    Pt q = p;
    if (!out.empty()) {
      if (q.t < out.back().t) q.t = out.back().t;
      if (q.y < out.back().y) q.y = out.back().y;
      if constexpr (!num_traits<Num>::exact) {
        if (near_eq(q.t, out.back().t)) q.t = out.back().t;
      }
      if (q.t == out.back().t && q.y == out.back().y) continue;
    }
    while (out.size() >= 2 && detail::collinear<Num>(out[out.size() - 2], out.back(), q)) out.pop_back();
    out.push_back(q);
  }
  while (out.size() >= 2 && out[out.size() - 2].y == out.back().y && out[out.size() - 2].t != out.back().t)
    out.pop_back();
  f.pts = std::move(out);
}

// Sum of two cumulative functions.
template <class Num>
PLFn<Num> pl_add(const PLFn<Num>& f, const PLFn<Num>& g) {
  using Pt = typename PLFn<Num>::Pt;
  if (f.pts.empty()) return g;
  if (g.pts.empty()) return f;
  PLFn<Num> h;
  h.pts.reserve(f.pts.size() + g.pts.size());
  // Cursor evaluating left and right values at non-decreasing query times.
  struct Cur {
    const std::vector<Pt>& p;
    std::size_t i = 0;  // first index with p[i].t >= query
    Num left(const Num& t) const {
      if (i == 0) return Num(0);
      if (i == p.size()) return p.back().y;
      const Pt& a = p[i - 1];
      const Pt& b = p[i];
      if (a.t == b.t) return a.y;
      return a.y + (b.y - a.y) * (t - a.t) / (b.t - a.t);
    }
  };
  Cur cf{f.pts}, cg{g.pts};
  std::size_t i = 0, j = 0;
  while (i < f.pts.size() || j < g.pts.size()) {
    Num t;
    if (j >= g.pts.size() || (i < f.pts.size() && f.pts[i].t <= g.pts[j].t))
      t = f.pts[i].t;
    else
      t = g.pts[j].t;
    cf.i = i;
    cg.i = j;
    Num lf = cf.left(t), lg = cg.left(t);
    std::size_t i2 = i, j2 = j;
    while (i2 < f.pts.size() && f.pts[i2].t == t) ++i2;
    while (j2 < g.pts.size() && g.pts[j2].t == t) ++j2;
    Num rf = i2 > i ? f.pts[i2 - 1].y : lf;
    Num rg = j2 > j ? g.pts[j2 - 1].y : lg;
    Num l = lf + lg, r = rf + rg;
    h.pts.push_back({t, l});
    if (r != l) h.pts.push_back({t, r});
    i = i2;
    j = j2;
  }
  canonicalize(h);
  return h;
}

// Shift right by d; the result is 0 on [0, d).
template <class Num>
PLFn<Num> pl_shift(const PLFn<Num>& f, const Num& d) {
  PLFn<Num> h;
  if (f.pts.empty()) return h;
  h.pts.reserve(f.pts.size() + 1);
  h.pts.push_back({Num(0), Num(0)});
  for (const auto& p : f.pts) h.pts.push_back({p.t + d, p.y});
  canonicalize(h);
  return h;
}

// Rate-limited departures: E(t) = min_{s <= t} (F(s-) + c (t - s)), F(0-) = 0.
// Written as E(t) = c t + running minimum of g(s) = F(s-) - c s.
template <class Num>
PLFn<Num> pl_rate_limit(const PLFn<Num>& f, const Num& c) {
  using Pt = typename PLFn<Num>::Pt;
  PLFn<Num> e;
  if (f.pts.empty()) return e;
  std::vector<Pt> src;
  src.reserve(f.pts.size() + 1);
  if (!(f.pts.front().t == 0 && f.pts.front().y == 0)) src.push_back({Num(0), Num(0)});
  for (const Pt& p : f.pts) src.push_back(p);
  e.pts.reserve(src.size() * 2 + 2);
  Num m = 0;  // running minimum of g
  e.pts.push_back({Num(0), Num(0)});
  Num gprev = 0;
  Num tprev = 0;
  for (std::size_t i = 1; i < src.size(); ++i) {
    const Pt& b = src[i];
    Num gb = b.y - c * b.t;
    if (b.t == tprev) {
      gprev = gb;  // upward jump: the left limit already counted
      continue;
    }
    if (gb < m) {
      if (gprev > m) {
        // crossing inside the segment
        Num tx = tprev + (gprev - m) * (b.t - tprev) / (gprev - gb);
        e.pts.push_back({tx, c * tx + m});
      }
      m = gb;
    }
    e.pts.push_back({b.t, c * b.t + m});
    gprev = gb;
    tprev = b.t;
  }
  const Num tot = src.back().y;
  // After the last breakpoint g decreases with slope -c.
  if (gprev > m) {
    Num tx = tprev + (gprev - m) / c;
    e.pts.push_back({tx, tot});
  } else {
    e.pts.back().y = tot;
  }
  canonicalize(e);
  return e;
}

}  // namespace treepart
