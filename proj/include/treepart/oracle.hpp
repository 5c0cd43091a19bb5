#pragma once

#include "dynflow.hpp"
#include "region.hpp"
#include "tree.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace treepart {

struct UnsupportedContinuous : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoFeasiblePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownOracle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cost of a side V' rooted at y as the sink slides along an edge (y,z) at distance d from y.
template <class Num>
struct SideProfile {
  Cost<Num> at0;  // sink exactly at y
  enum class Kind { Linear, Lines, Generic } kind = Kind::Generic;
  // Linear: interior(d) = base + d when positive, 0 otherwise.
  bool positive = false;
  Num base{0};
  // Lines: interior(d) = max w (dist + d).
  std::vector<std::pair<Num, Num>> lines;
  std::function<Cost<Num>(const Num&)> generic;

  Cost<Num> interior(const Num& d) const {
    switch (kind) {
      case Kind::Linear:
        return positive ? Cost<Num>(Num(base + d)) : Cost<Num>(Num(0));
      case Kind::Lines: {
        Num best = 0;
        for (const auto& [w, dist] : lines) {
          Num c = w * (dist + d);
          if (c > best) best = c;
        }
        return Cost<Num>(best);
      }
      case Kind::Generic:
        return generic(d);
    }
    return Cost<Num>::infinity();
  }
  Cost<Num> at(const Num& d) const { return d == 0 ? at0 : interior(d); }

  // Largest d > 0 with interior(d) <= T if a closed form exists.
  std::optional<std::optional<Num>> sup_le(const Cost<Num>& T) const {
    if (T.is_inf()) return std::optional<Num>();
    if (kind == Kind::Linear) {
      if (!positive) return std::optional<Num>();
      return std::optional<Num>(Num(T.v - base));
    }
    if (kind == Kind::Lines) {
      std::optional<Num> best;
      for (const auto& [w, dist] : lines) {
        if (w == 0) continue;
        Num x = T.v / w - dist;
        if (!best || x < *best) best = x;
      }
      return best;
    }
    return std::nullopt;
  }
};

template <class Num>
class CostOracle {
 public:
  virtual ~CostOracle() = default;
  virtual std::string name() const = 0;
  // Relaxed oracles lack path monotonicity.
  virtual bool relaxed() const { return false; }
  virtual bool continuous() const { return false; }

  // Cost of the region with the sink at its root.
  virtual Cost<Num> eval_region(const TreeGraph<Num>& t, const Region& r) const = 0;

  // Profile for the region rooted at y with the sink moving along edge e away from the region.
  virtual SideProfile<Num> side_profile(const TreeGraph<Num>&, const Region&, int) const {
    throw UnsupportedContinuous(name() + " does not support continuous sinks");
  }

  // f(U, s) for an arbitrary vertex set and sink location.
  Cost<Num> eval(const TreeGraph<Num>& t, const std::vector<int>& U, const SinkLocation<Num>& s) const {
    std::vector<char> in(t.n(), 0);
    for (int x : U) {
      if (x < 0 || x >= t.n()) return Cost<Num>::infinity();
      in[x] = 1;
    }
    if (U.empty() || !is_connected_set(t, U)) return Cost<Num>::infinity();
    if (!s.on_edge) {
      if (s.vertex < 0 || s.vertex >= t.n() || !in[s.vertex]) return Cost<Num>::infinity();
      return eval_region(t, region_of_set(t, s.vertex, in));
    }
    const int e = t.edge_between(s.u, s.v);
    if (e < 0) return Cost<Num>::infinity();
    const Num& tau = t.edges[e].tau;
    if (s.offset < 0 || s.offset > tau) return Cost<Num>::infinity();
    if (s.offset == 0) return eval(t, U, SinkLocation<Num>::at(s.u));
    if (s.offset == tau) return eval(t, U, SinkLocation<Num>::at(s.v));
    if (!in[s.u] && !in[s.v]) return Cost<Num>::infinity();
    Cost<Num> best(Num(0));
    for (int side = 0; side < 2; ++side) {
      const int a = side ? s.v : s.u, b = side ? s.u : s.v;
      if (!in[a]) continue;
      Region r = grow_region(t, a, [&](int x, int y) { return in[y] && !(x == a && y == b); });
      best = cmax(best, side_profile(t, r, e).interior(side ? Num(tau - s.offset) : s.offset));
    }
    return best;
  }

  Cost<Num> eval(const TreeGraph<Num>& t, const SubtreeView<Num>& U, const SinkLocation<Num>& s) const {
    return eval(t, U.members(), s);
  }
};

// max_u w_u d(s,u)
template <class Num>
class KCenterOracle : public CostOracle<Num> {
 public:
  std::string name() const override { return "kcenter"; }
  bool continuous() const override { return true; }

  Cost<Num> eval_region(const TreeGraph<Num>& t, const Region& r) const override {
    std::vector<Num> dist(r.size());
    Num best = 0;
    for (int i = 1; i < r.size(); ++i) {
      dist[i] = dist[r.par[i]] + t.edges[r.pedge[i]].tau;
      Num c = t.weight[r.order[i]] * dist[i];
      if (c > best) best = c;
    }
    return Cost<Num>(best);
  }

  SideProfile<Num> side_profile(const TreeGraph<Num>& t, const Region& r, int) const override {
    SideProfile<Num> p;
    p.at0 = eval_region(t, r);
    p.kind = SideProfile<Num>::Kind::Lines;
    std::vector<Num> dist(r.size());
    for (int i = 0; i < r.size(); ++i) {
      if (i > 0) dist[i] = dist[r.par[i]] + t.edges[r.pedge[i]].tau;
      if (t.weight[r.order[i]] != 0) p.lines.push_back({t.weight[r.order[i]], dist[i]});
    }
    return p;
  }
};

// k-center with per-slice weight cap and/or hop bound; +inf when a slice violates either.
template <class Num>
class KCenterCappedOracle : public CostOracle<Num> {
 public:
  std::optional<Num> weight_cap;
  std::optional<int> hop_cap;

  KCenterCappedOracle(std::optional<Num> w, std::optional<int> h) : weight_cap(std::move(w)), hop_cap(h) {}

  std::string name() const override { return "kcenter-capped"; }

  Cost<Num> eval_region(const TreeGraph<Num>& t, const Region& r) const override {
    const int m = r.size();
    std::vector<Num> dist(m);
    std::vector<int> hops(m, 0), slice(m, 0);
    std::vector<Num> slice_w(m, Num(0));
    Num best = 0;
    for (int i = 1; i < m; ++i) {
      const int p = r.par[i];
      dist[i] = dist[p] + t.edges[r.pedge[i]].tau;
      hops[i] = hops[p] + 1;
      slice[i] = p == 0 ? i : slice[p];
      slice_w[slice[i]] += t.weight[r.order[i]];
      if (hop_cap && hops[i] > *hop_cap) return Cost<Num>::infinity();
      Num c = t.weight[r.order[i]] * dist[i];
      if (c > best) best = c;
    }
    if (weight_cap)
      for (int i = 1; i < m; ++i)
        if (r.par[i] == 0 && slice_w[i] > *weight_cap) return Cost<Num>::infinity();
    return Cost<Num>(best);
  }
};

// Relaxed range cost: per slice, max |c(u,s) - c(v,s)| from a table (missing entries are 0).
template <class Num>
class RangeOracle : public CostOracle<Num> {
 public:
  std::unordered_map<long long, Num> table;

  static long long key(int u, int s) { return (static_cast<long long>(u) << 32) | static_cast<unsigned>(s); }
  void set(int u, int s, const Num& c) {
    Num& slot = table[key(u, s)];
    slot = c;
    normalize(slot);
  }
  Num get(int u, int s) const {
    auto it = table.find(key(u, s));
    return it == table.end() ? Num(0) : it->second;
  }

  std::string name() const override { return "range"; }
  bool relaxed() const override { return true; }

  Cost<Num> eval_region(const TreeGraph<Num>& t, const Region& r) const override {
    const int m = r.size();
    const int s = t.origin[r.root()];
    std::vector<int> slice(m, 0);
    std::vector<Num> lo(m), hi(m);
    for (int i = 1; i < m; ++i) {
      const int p = r.par[i];
      slice[i] = p == 0 ? i : slice[p];
      Num c = get(t.origin[r.order[i]], s);
      if (p == 0) {
        lo[i] = hi[i] = c;
      } else {
        if (c < lo[slice[i]]) lo[slice[i]] = c;
        if (c > hi[slice[i]]) hi[slice[i]] = c;
      }
    }
    Num best = 0;
    for (int i = 1; i < m; ++i)
      if (r.par[i] == 0 && hi[i] - lo[i] > best) best = hi[i] - lo[i];
    return Cost<Num>(best);
  }
};

// Confluent-flow evacuation completion time.
template <class Num>
class EvacOracle : public CostOracle<Num> {
 public:
  std::string name() const override { return "evac"; }
  bool continuous() const override { return true; }

  Cost<Num> eval_region(const TreeGraph<Num>& t, const Region& r) const override {
    return Cost<Num>(evac_root_cost(t, r));
  }

  SideProfile<Num> side_profile(const TreeGraph<Num>& t, const Region& r, int e) const override {
    EvacSideProfile<Num> ep = evac_side_profile(t, r, t.edges[e].cap);
    SideProfile<Num> p;
    p.at0 = Cost<Num>(ep.at_root);
    p.kind = SideProfile<Num>::Kind::Linear;
    p.positive = ep.positive;
    p.base = ep.depart;
    return p;
  }
};

struct OracleParams {
  std::string name = "evac";
  std::optional<std::string> cap_weight;
  std::optional<int> cap_hops;
};

template <class Num>
std::unique_ptr<CostOracle<Num>> make_oracle(const OracleParams& p) {
  if (p.name == "kcenter") return std::make_unique<KCenterOracle<Num>>();
  if (p.name == "evac") return std::make_unique<EvacOracle<Num>>();
  if (p.name == "range") return std::make_unique<RangeOracle<Num>>();
  if (p.name == "kcenter-capped") {
    std::optional<Num> w;
    if (p.cap_weight) w = parse_num<Num>(*p.cap_weight);
    return std::make_unique<KCenterCappedOracle<Num>>(w, p.cap_hops);
  }
  throw UnknownOracle("unknown oracle: " + p.name);
}

// Bisection tolerance relative to the edge length.
template <class Num>
Num bisect_tol(const Num& tau) {
  return Num(tau > 1 ? tau : Num(1)) * Num(1e-9) / Num(4);
}

// sup { x in [0, tau] : side cost at x <= T }; the limit just past the u-end must be feasible.
template <class Num>
Num farthest_feasible_point(const SideProfile<Num>& p, const Num& tau, const Cost<Num>& T) {
  if (p.at0 > T || p.interior(Num(0)) > T) throw NoFeasiblePoint("side cost next to the edge end exceeds the threshold");
  if (T.is_inf()) return tau;
  if (auto cf = p.sup_le(T)) {
    if (!*cf) return tau;
    if (!(**cf > 0)) return Num(0);
    return **cf < tau ? **cf : tau;
  }
  if (p.interior(tau) <= T) return tau;
  Num lo = 0, hi = tau;
  const Num tol = bisect_tol(tau);
  while (hi - lo > tol) {
    Num mid = (lo + hi) / 2;
    if (p.interior(mid) <= T)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Line (w, dist) attaining interior(d) for closed-form profiles.
template <class Num>
std::optional<std::pair<Num, Num>> active_line(const SideProfile<Num>& p, const Num& d) {
  using K = typename SideProfile<Num>::Kind;
  if (p.kind == K::Linear) {
    if (!p.positive) return std::pair<Num, Num>(Num(0), Num(0));
    return std::pair<Num, Num>(Num(1), p.base);
  }
  if (p.kind != K::Lines) return std::nullopt;
  std::pair<Num, Num> best(Num(0), Num(0));
  Num top = 0;
  for (const auto& [w, dist] : p.lines) {
    Num c = w * (dist + d);
    if (c > top) {
      top = c;
      best = {w, dist};
    }
  }
  return best;
}

template <class Num>
struct EdgeMinimax {
  Num offset{0};  // distance from the left end
  Cost<Num> cost;
};

// min over x in [0, tau] of max(left at x, right at tau - x).
template <class Num>
EdgeMinimax<Num> edge_minimax(const SideProfile<Num>& left, const SideProfile<Num>& right, const Num& tau) {
  EdgeMinimax<Num> best;
  bool have = false;
  auto consider = [&](const Num& x) {
    if (x < 0 || x > tau) return;
    Cost<Num> c = cmax(left.at(x), right.at(Num(tau - x)));
    if (!have || c < best.cost) {
      best.offset = x;
      best.cost = c;
      have = true;
    }
  };
  consider(Num(0));
  consider(tau);
  using K = typename SideProfile<Num>::Kind;
  if (left.kind == K::Linear && right.kind == K::Linear) {
    if (left.positive && right.positive) consider(Num((right.base + tau - left.base) / 2));
    return best;
  }
  // Left interior is non-decreasing, right interior non-increasing in x: bisect the crossing.
  Num lo = 0, hi = tau;
  const Num tol = bisect_tol(tau);
  while (hi - lo > tol) {
    Num mid = (lo + hi) / 2;
    if (left.interior(mid) < right.interior(Num(tau - mid)))
      lo = mid;
    else
      hi = mid;
  }
  if (lo > 0) consider(lo);
  if (hi < tau) consider(hi);
  // Closed-form sides: the optimum is the crossing of the lines active near the bracket.
  for (const Num& a : {lo, hi})
    for (const Num& b : {lo, hi}) {
      auto l = active_line(left, a), r = active_line(right, Num(tau - b));
      if (!l || !r) continue;
      const Num den = l->first + r->first;
      if (den == 0) continue;
      consider(Num((r->first * (r->second + tau) - l->first * l->second) / den));
    }
  return best;
}

}  // namespace treepart
